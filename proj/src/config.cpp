#include "semiconj/config.hpp"

#include <fstream>
#include <sstream>

#include "semiconj/error.hpp"

namespace semiconj {

namespace {

using nlohmann::json;

const json& member(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key)) throw ConfigError(std::string(where) + ": missing \"" + key + "\"");
    return obj.at(key);
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + ": expected a number");
    return v.get<double>();
}

int integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw ConfigError(what + ": expected an integer");
    return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& what) {
    if (!v.is_array()) throw ConfigError(what + ": expected an array of numbers");
    std::vector<double> out;
    for (const json& e : v) out.push_back(number(e, what));
    return out;
}

std::string text(const json& v, const std::string& what) {
    if (!v.is_string()) throw ConfigError(what + ": expected a string");
    return v.get<std::string>();
}

void require_length(const std::vector<double>& v, int expected, const std::string& what) {
    if (static_cast<int>(v.size()) != expected)
        throw ConfigError(what + ": expected " + std::to_string(expected) + " entries, got " +
                          std::to_string(v.size()));
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig cfg;
    const bool has_eq = doc.contains("equation");
    const bool has_synth = doc.contains("synth");
    if (has_eq == has_synth) throw ConfigError("config: exactly one of \"equation\" or \"synth\" is required");

    if (has_eq) {
        const json& e = doc.at("equation");
        EquationInput in;
        in.k = integer(member(e, "k", "equation"), "equation.k");
        if (in.k < 1) throw ConfigError("equation.k: must be >= 1");
        in.a = numbers(member(e, "a", "equation"), "equation.a");
        in.b = numbers(member(e, "b", "equation"), "equation.b");
        in.g = text(member(e, "g", "equation"), "equation.g");
        require_length(in.a, in.k + 1, "equation.a");
        require_length(in.b, in.k + 1, "equation.b");
        cfg.equation = std::move(in);
    } else {
        const json& s = doc.at("synth");
        SynthInput in;
        in.k = integer(member(s, "k", "synth"), "synth.k");
        if (in.k < 2) throw ConfigError("synth.k: must be >= 2");
        in.mu = number(member(s, "mu", "synth"), "synth.mu");
        in.theta = number(member(s, "theta", "synth"), "synth.theta");
        in.a_free = numbers(member(s, "a_free", "synth"), "synth.a_free");
        in.b_free = numbers(member(s, "b_free", "synth"), "synth.b_free");
        in.g = text(member(s, "g", "synth"), "synth.g");
        require_length(in.a_free, in.k - 1, "synth.a_free");
        require_length(in.b_free, in.k - 1, "synth.b_free");
        cfg.synth = std::move(in);
    }

    if (doc.contains("init")) {
        cfg.init = numbers(doc.at("init"), "init");
        require_length(*cfg.init, cfg.k() + 1, "init");
    }
    if (doc.contains("steps")) {
        cfg.steps = integer(doc.at("steps"), "steps");
        if (cfg.steps < 1) throw ConfigError("steps: must be >= 1");
    }
    if (doc.contains("max_period")) {
        cfg.max_period = integer(doc.at("max_period"), "max_period");
        if (cfg.max_period < 1) throw ConfigError("max_period: must be >= 1");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("tolerances")) {
        const json& t = doc.at("tolerances");
        if (!t.is_object()) throw ConfigError("tolerances: expected an object");
        if (t.contains("root")) cfg.tolerances.root = number(t.at("root"), "tolerances.root");
        if (t.contains("cycle")) cfg.tolerances.cycle = number(t.at("cycle"), "tolerances.cycle");
        if (t.contains("equivalence"))
            cfg.tolerances.equivalence = number(t.at("equivalence"), "tolerances.equivalence");
    }
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        if (!o.is_object()) throw ConfigError("output: expected an object");
        if (o.contains("format")) {
            const std::string f = text(o.at("format"), "output.format");
            if (f == "csv") {
                cfg.output.format = OutputFormat::Csv;
            } else if (f == "json") {
                cfg.output.format = OutputFormat::Json;
            } else {
                throw ConfigError("output.format: expected \"csv\" or \"json\"");
            }
        }
        if (o.contains("path")) cfg.output.path = text(o.at("path"), "output.path");
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

EquationSpec build_equation(const RunConfig& config) {
    try {
        if (config.equation) {
            const EquationInput& e = *config.equation;
            return EquationSpec(e.k, e.a, e.b, parse(e.g));
        }
        const SynthInput& s = *config.synth;
        return synth_equation(s.k, s.mu, s.theta, s.a_free, s.b_free, parse(s.g));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const DegenerateAngle& e) {
        throw ConfigError(e.what());
    }
}

std::vector<double> default_init(int k) {
    std::vector<double> init;
    for (int i = k; i >= 0; --i) init.push_back(1.0 + static_cast<double>(i) / 10.0);
    return init;
}

std::vector<double> initial_values(const RunConfig& config) {
    return config.init ? *config.init : default_init(config.k());
}

}  // namespace semiconj
