#include "semiconj/report.hpp"

#include <cmath>
#include <cstdio>

namespace semiconj {

namespace {

using nlohmann::json;

void write(const json& v, int indent, int depth, std::string& out) {
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                out += json(it.key()).dump();
                out += indent > 0 ? ": " : ":";
                write(it.value(), indent, depth + 1, out);
            }
            out += nl;
            out += close_pad + "}";
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const json& e : v) {
                if (!first) out += indent > 0 ? ", " : ",";
                first = false;
                write(e, indent, depth + 1, out);
            }
            out += "]";
            return;
        }
        case json::value_t::number_float: out += format_double(v.get<double>()); return;
        default: out += v.dump(); return;
    }
}

json real_vector(const std::vector<double>& v) { return json(v); }

json complex_vector(const std::vector<Complex>& v) {
    json arr = json::array();
    for (Complex z : v) arr.push_back(to_json(z));
    return arr;
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) return "null";
    if (v == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string dump_json(const json& doc, int indent) {
    std::string out;
    write(doc, indent, 0, out);
    out += "\n";
    return out;
}

json to_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const Poly& p) {
    if (p.is_real()) {
        json arr = json::array();
        for (Complex c : p.coeffs()) arr.push_back(c.real());
        return arr;
    }
    return complex_vector(std::vector<Complex>(p.coeffs().begin(), p.coeffs().end()));
}

json to_json(const EquationSpec& eq) {
    return json{{"k", eq.k()},
                {"a", std::vector<double>(eq.a().begin(), eq.a().end())},
                {"b", std::vector<double>(eq.b().begin(), eq.b().end())},
                {"g", print(eq.g())}};
}

json to_json(const Factorization& f, const EquationSpec& eq) {
    if (const auto* s = std::get_if<SingleReal>(&f)) {
        return json{{"type", "SingleReal"}, {"rho", s->rho}, {"p", real_vector(s->p)}, {"q", real_vector(s->q)},
                    {"cofactor", json{{"order", 1}, {"rho", s->rho}}}};
    }
    if (const auto* c = std::get_if<ConjugatePair>(&f)) {
        const TrailingResiduals res = trailing_residuals(eq, *c);
        return json{{"type", "ConjugatePair"},
                    {"mu", c->mu},
                    {"theta", c->theta},
                    {"p_prime", real_vector(c->p_prime)},
                    {"q_prime", real_vector(c->q_prime)},
                    {"cofactor", json{{"order", 2},
                                      {"two_mu_cos_theta", 2.0 * c->mu * std::cos(c->theta)},
                                      {"minus_mu_squared", -c->mu * c->mu}}},
                    {"trailing_identity_residuals", json{{"a_k", res.a_k},
                                                         {"a_k_minus_1", res.a_k_minus_1},
                                                         {"b_k", res.b_k},
                                                         {"b_k_minus_1", res.b_k_minus_1}}}};
    }
    const auto& ch = std::get<ComplexChain>(f);
    return json{{"type", "ComplexChain"},
                {"rho", to_json(ch.rho)},
                {"gamma", to_json(ch.gamma)},
                {"p_prime", complex_vector(ch.p_prime_c)},
                {"q_prime", complex_vector(ch.q_prime_c)}};
}

json to_json(const Cycle& c) {
    return json{{"values", real_vector(c.values)},
                {"prime_period", c.prime_period},
                {"tol", c.tol},
                {"start_index", c.start_index}};
}

json to_json(const BoundCertificate& c) {
    return json{{"rho_modulus", c.rho_modulus},
                {"M", c.M},
                {"M_provenance", c.M_empirical ? "empirical" : "analytic"},
                {"N", c.N},
                {"bound", c.bound},
                {"tail_max", c.tail_max},
                {"verified", c.verified}};
}

json to_json(const Orbit& o) {
    json out{{"k", o.k}, {"first_index", o.first_index()}, {"status", to_string(o.status)}, {"source", o.source}};
    if (o.status != OrbitStatus::Completed) out["halt_step"] = o.halt_step;
    if (!o.fault.empty()) out["fault"] = o.fault;
    out["x"] = real_vector(o.values);
    if (!o.factor_values.empty()) out["factor"] = real_vector(o.factor_values);
    return out;
}

void write_orbit_csv(std::ostream& out, const Orbit& orbit, const Orbit* factored) {
    const bool with_factor = factored != nullptr && !factored->factor_values.empty();
    const char* factor_name = with_factor && factored->source == "SingleReal" ? "t_n" : "r_n";
    out << "n,x_n";
    if (with_factor) out << "," << factor_name;
    out << "\n";
    for (long n = orbit.first_index(); n <= orbit.last_index(); ++n) {
        out << n << "," << format_double(orbit.x(n));
        if (with_factor) {
            out << ",";
            const auto idx = static_cast<std::size_t>(n + orbit.k);
            if (idx < factored->factor_values.size() && std::isfinite(factored->factor_values[idx]))
                out << format_double(factored->factor_values[idx]);
        }
        out << "\n";
    }
}

}  // namespace semiconj
