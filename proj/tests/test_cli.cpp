#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "semiconj/cli.hpp"
#include "semiconj/error.hpp"

using namespace semiconj;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* const kSynthExample = R"J({
  "synth": {"k": 2, "mu": 0.70710678118654757, "theta": 0.78539816339744828,
            "a_free": [0], "b_free": [1], "g": "1/u"}
})J";

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / ("semiconj_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path path = scratch_dir() / name;
    std::ofstream(path) << body;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

// Runs the installed binary through the shell, capturing both streams.
Run run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = scratch_dir();
    const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = std::string("\"") + SEMICONJ_CLI_PATH + "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return Run{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

RunConfig config_from(const std::string& text) { return parse_config(json::parse(text)); }

}  // namespace

TEST_CASE("config parsing") {
    SUBCASE("synth config with defaults") {
        const RunConfig cfg = config_from(kSynthExample);
        REQUIRE(cfg.synth);
        CHECK_FALSE(cfg.equation);
        CHECK(cfg.k() == 2);
        CHECK(cfg.steps == 200);
        CHECK(cfg.seed == 1);
        CHECK(cfg.tolerances.root == 1e-8);
        CHECK(cfg.output.format == OutputFormat::Csv);
        CHECK(initial_values(cfg) == std::vector{1.2, 1.1, 1.0});
    }
    SUBCASE("equation config with every field") {
        const RunConfig cfg = config_from(R"J({
            "equation": {"k": 1, "a": [0.5, 0.1], "b": [1, -1], "g": "tanh(u)"},
            "init": [0.3, 0.4], "steps": 50, "max_period": 4, "seed": 9,
            "tolerances": {"root": 1e-7, "cycle": 1e-6, "equivalence": 1e-9},
            "output": {"format": "json", "path": "o.json"}})J");
        REQUIRE(cfg.equation);
        CHECK(cfg.equation->a == std::vector{0.5, 0.1});
        CHECK(*cfg.init == std::vector{0.3, 0.4});
        CHECK(cfg.steps == 50);
        CHECK(cfg.max_period == 4);
        CHECK(cfg.seed == 9);
        CHECK(cfg.tolerances.cycle == 1e-6);
        CHECK(cfg.output.format == OutputFormat::Json);
        CHECK(*cfg.output.path == "o.json");
        const EquationSpec eq = build_equation(cfg);
        CHECK(eq.k() == 1);
    }
    SUBCASE("schema violations") {
        const char* bad[] = {
            R"J([])J",
            R"J({})J",
            R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1], "g": "u"},
                "synth": {"k": 2, "mu": 1, "theta": 1, "a_free": [0], "b_free": [1], "g": "u"}})J",
            R"J({"equation": {"k": 1, "a": [1], "b": [1, 1], "g": "u"}})J",
            R"J({"equation": {"k": 1.5, "a": [1, 0], "b": [1, 1], "g": "u"}})J",
            R"J({"equation": {"k": 1, "a": [1, "x"], "b": [1, 1], "g": "u"}})J",
            R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1]}})J",
            R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1], "g": "u"}, "init": [1, 2, 3]})J",
            R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1], "g": "u"}, "steps": 0})J",
            R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1], "g": "u"}, "seed": -1})J",
            R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1], "g": "u"}, "output": {"format": "xml"}})J",
            R"J({"synth": {"k": 2, "mu": 1, "theta": 1, "a_free": [0, 1], "b_free": [1], "g": "u"}})J",
            R"J({"synth": {"k": 1, "mu": 1, "theta": 1, "a_free": [], "b_free": [], "g": "u"}})J",
        };
        for (const char* text : bad) CHECK_THROWS_AS(config_from(text), ConfigError);
    }
    SUBCASE("equation-level errors become config errors") {
        CHECK_THROWS_AS(build_equation(config_from(R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 0], "g": "u"}})J")),
                        ConfigError);
        CHECK_THROWS_AS(build_equation(config_from(
                            R"J({"synth": {"k": 2, "mu": 1, "theta": 0, "a_free": [0], "b_free": [1], "g": "u"}})J")),
                        ConfigError);
        CHECK_THROWS_AS(build_equation(config_from(R"J({"equation": {"k": 1, "a": [1, 0], "b": [1, 1], "g": "u +"}})J")),
                        SyntaxError);
    }
    SUBCASE("default initial values") {
        CHECK(default_init(1) == std::vector{1.1, 1.0});
        CHECK(default_init(3) == std::vector{1.3, 1.2, 1.1, 1.0});
    }
    SUBCASE("unreadable files") {
        CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()), ConfigError);
        CHECK_THROWS_AS(load_config(write_config("broken.json", "{ not json").string()), ConfigError);
    }
}

TEST_CASE("cmd_analyze on the worked synth config") {
    std::ostringstream out;
    CHECK(cli::cmd_analyze(config_from(kSynthExample), {}, out) == cli::kOk);
    const json report = json::parse(out.str());
    REQUIRE(report["factorizations"].size() == 1);
    const json& f = report["factorizations"][0];
    CHECK(f["type"] == "ConjugatePair");
    CHECK(f["p_prime"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f["q_prime"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report["common_roots"].size() == 2);
    CHECK(report["P"].size() == 4);

    std::ostringstream none;
    CHECK(cli::cmd_analyze(config_from(R"J({"equation": {"k": 1, "a": [0.3, 0.2], "b": [1, 0.7], "g": "u"}})J"), {},
                           none) == cli::kOk);
    CHECK(json::parse(none.str())["factorizations"].empty());
}

TEST_CASE("cmd_simulate summaries") {
    SUBCASE("worked example converges to a 2-cycle") {
        const RunConfig cfg = config_from(R"J({
            "synth": {"k": 2, "mu": 0.70710678118654757, "theta": 0.78539816339744828,
                      "a_free": [0], "b_free": [1], "g": "1/u + u"},
            "steps": 400, "tolerances": {"cycle": 1e-10}})J");
        std::ostringstream out;
        CHECK(cli::cmd_simulate(cfg, {}, out) == cli::kOk);
        const json s = json::parse(out.str());
        CHECK(s["status"] == "Completed");
        REQUIRE(s["cycle"].is_object());
        CHECK(s["cycle"]["prime_period"] == 2);
        CHECK(s["equivalence"]["pass"] == true);
        CHECK(s["bound_certificate"]["verified"] == true);
        // r0 = x0 + b1 x_{-1} + b2 x_{-2} with the default start 1.2, 1.1, 1.0
        const double r0 = 1.0 - 1.1 + 0.5 * 1.2;
        const double D = 1.5 * 1.5 - 1.0;
        const double xi0 = (r0 * r0 * 1.5 + 1.0) / (r0 * D);
        const double xi1 = (1.5 + r0 * r0) / (r0 * D);
        std::vector<double> values = s["cycle"]["values"].get<std::vector<double>>();
        std::sort(values.begin(), values.end());
        CHECK(values[0] == doctest::Approx(std::min(xi0, xi1)).epsilon(1e-6));
        CHECK(values[1] == doctest::Approx(std::max(xi0, xi1)).epsilon(1e-6));
    }
    SUBCASE("forbidden plane") {
        const RunConfig cfg = config_from(R"J({
            "synth": {"k": 2, "mu": 0.70710678118654757, "theta": 0.78539816339744828,
                      "a_free": [0], "b_free": [1], "g": "1/u + u"},
            "init": [2, 3, 2]})J");
        std::ostringstream out;
        CHECK(cli::cmd_simulate(cfg, {}, out) == cli::kOk);
        const json s = json::parse(out.str());
        CHECK(s["status"] == "ForbiddenSet");
        CHECK(s["halt_step"] == 0);
        CHECK(s["cycle"].is_null());
    }
    SUBCASE("expanding pair has no certificate") {
        const RunConfig cfg = config_from(R"J({
            "synth": {"k": 2, "mu": 1.25, "theta": 1.0, "a_free": [0.2], "b_free": [1], "g": "tanh(u)"},
            "steps": 50})J");
        std::ostringstream out;
        CHECK(cli::cmd_simulate(cfg, {}, out) == cli::kOk);
        const json s = json::parse(out.str());
        CHECK(s["bound_certificate"].is_null());
        CHECK(s["note"].get<std::string>().find("not contracting") != std::string::npos);
    }
}

TEST_CASE("golden scenarios") {
    std::ostringstream p2;
    CHECK(cli::cmd_paper_example("period2", {}, p2) == cli::kOk);
    CHECK(json::parse(p2.str())["pass"] == true);
    std::ostringstream p3;
    CHECK(cli::cmd_paper_example("threecycle", {}, p3) == cli::kOk);
    const json three = json::parse(p3.str());
    CHECK(three["pass"] == true);
    CHECK(three["lifted_cycle"]["prime_period"] == 3);
    std::ostringstream unknown;
    CHECK_THROWS_AS(cli::cmd_paper_example("four", {}, unknown), ConfigError);
}

TEST_CASE("command-line exit codes and determinism") {
    const fs::path synth = write_config("synth.json", kSynthExample);
    const fs::path bad_g = write_config("bad_g.json", R"J({"equation": {"k": 1, "a": [0.5, 0.1], "b": [1, 0], "g": "1/(u"}})J");
    const fs::path bad_json = write_config("bad.json", "{\"equation\": ");
    const fs::path tanh_cfg = write_config("tanh.json", R"J({
        "synth": {"k": 3, "mu": 0.8, "theta": 1.2, "a_free": [0.1, -0.2], "b_free": [1, 0.3], "g": "0.9*tanh(u - 0.2)"},
        "steps": 150})J");

    SUBCASE("success") {
        const Run a = run_cli("analyze \"" + synth.string() + "\"");
        CHECK(a.code == 0);
        CHECK(json::parse(a.out)["factorizations"][0]["type"] == "ConjugatePair");
        CHECK(run_cli("paper-example period2").code == 0);
        CHECK(run_cli("paper-example threecycle").code == 0);
        CHECK(run_cli("cycles \"" + tanh_cfg.string() + "\" --max-period 4").code == 0);
        CHECK(run_cli("verify \"" + tanh_cfg.string() + "\" --trials 5 --seed 4").code == 0);
        CHECK(run_cli("--help").code == 0);
    }
    SUBCASE("configuration and parse errors exit with 2") {
        const Run g = run_cli("analyze \"" + bad_g.string() + "\"");
        CHECK(g.code == 2);
        CHECK(g.err.find("offset 4") != std::string::npos);
        CHECK(run_cli("analyze \"" + bad_json.string() + "\"").code == 2);
        CHECK(run_cli("analyze \"" + (scratch_dir() / "nope.json").string() + "\"").code == 2);
        CHECK(run_cli("paper-example fourcycle").code == 2);
        CHECK(run_cli("frobnicate").code == 2);
        CHECK(run_cli("").code == 2);
    }
    SUBCASE("numerical failure exits with 3") {
        // The expanding factor map r -> 1/r - r amplifies rounding, so the
        // direct and factored orbits separate and verification fails.
        const fs::path chaotic = write_config("chaotic.json", kSynthExample);
        const Run v = run_cli("verify \"" + chaotic.string() + "\" --trials 5 --seed 3");
        CHECK(v.code == 3);
        CHECK(json::parse(v.out)["pass"] == false);
    }
    SUBCASE("global flags and output files") {
        const fs::path csv = scratch_dir() / "orbit.csv";
        const Run s = run_cli("simulate \"" + tanh_cfg.string() + "\" --steps 20 --out \"" + csv.string() + "\"");
        CHECK(s.code == 0);
        CHECK(json::parse(s.out)["steps"] == 20);
        const std::string text = slurp(csv);
        CHECK(text.rfind("n,x_n,r_n\n", 0) == 0);
        CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 + 20);
        CHECK(run_cli("--tol 1e-6 analyze \"" + synth.string() + "\"").code == 0);
        CHECK(json::parse(run_cli("--tol 1e-6 analyze \"" + synth.string() + "\"").out)["tol"] == 1e-6);
    }
    SUBCASE("identical runs are byte-identical") {
        for (const std::string& args : {"analyze \"" + synth.string() + "\"", "simulate \"" + tanh_cfg.string() + "\"",
                                       "cycles \"" + tanh_cfg.string() + "\"",
                                       "verify \"" + tanh_cfg.string() + "\" --trials 4 --seed 11",
                                       std::string("paper-example period2"), std::string("paper-example threecycle")}) {
            const Run first = run_cli(args);
            const Run second = run_cli(args);
            CHECK(first.code == second.code);
            CHECK_FALSE(first.out.empty());
            CHECK(first.out == second.out);
        }
        const Run s1 = run_cli("verify \"" + tanh_cfg.string() + "\" --trials 4 --seed 11");
        const Run s2 = run_cli("verify \"" + tanh_cfg.string() + "\" --trials 4 --seed 12");
        CHECK(json::parse(s1.out)["seed"] == 11);
        CHECK(s1.out != s2.out);
    }
}
