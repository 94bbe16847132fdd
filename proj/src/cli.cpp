#include "semiconj/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "semiconj/dynamics.hpp"
#include "semiconj/error.hpp"
#include "semiconj/report.hpp"

namespace semiconj::cli {

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write output file '" + path + "'");
    f << content;
}

/// Root carried by the x-level first-order cofactor x_{n+1} = rho x_n + t_{n+1}.
Complex cofactor_root(const Factorization& f) {
    if (const auto* s = std::get_if<SingleReal>(&f)) return s->rho;
    if (const auto* c = std::get_if<ConjugatePair>(&f)) return c->rho();
    return std::get<ComplexChain>(f).rho;
}

std::vector<Complex> shared_roots(const EquationSpec& eq, double tol) {
    const auto [P, Q] = build_pq(eq);
    return Q.is_zero() ? common_roots(P, P, tol) : common_roots(P, Q, tol);
}

double aligned_gap(const Cycle& lhs, const Cycle& rhs) {
    if (lhs.values.size() != rhs.values.size()) return std::numeric_limits<double>::infinity();
    double gap = 0.0;
    for (long n = lhs.start_index; n < lhs.start_index + static_cast<long>(lhs.values.size()); ++n)
        gap = std::max(gap, std::abs(lhs.at(n) - rhs.at(n)));
    return gap;
}

std::optional<Cycle> try_detect(std::span<const double> series, long first_index, int max_period, double tol) {
    if (series.size() < 4 * static_cast<std::size_t>(max_period)) return std::nullopt;
    return detect_cycle(series, first_index, max_period, tol);
}

struct Checks {
    json list = json::array();
    bool all_pass = true;

    void add(const std::string& name, double value, double expected, double tol) {
        const bool pass = std::abs(value - expected) <= tol;
        all_pass = all_pass && pass;
        list.push_back(json{{"name", name}, {"value", value}, {"expected", expected}, {"tol", tol}, {"pass", pass}});
    }
    void add_flag(const std::string& name, bool pass, const std::string& detail = "") {
        all_pass = all_pass && pass;
        json entry{{"name", name}, {"pass", pass}};
        if (!detail.empty()) entry["detail"] = detail;
        list.push_back(entry);
    }
};

// Parameters shared by both worked-example scenarios.
constexpr double kB1 = -1.0;
constexpr double kB2 = 0.5;
constexpr double kA0 = 0.0;

EquationSpec worked_example_equation(const std::string& g) {
    const double mu = std::sqrt(kB2);
    const double theta = std::acos(-kB1 / (2.0 * mu));
    const std::vector<double> a_free{kA0};
    const std::vector<double> b_free{1.0};
    return synth_equation(2, mu, theta, a_free, b_free, parse(g));
}

// Closed-form 2-cycle of the rational example with B = 0, C = -a0 - b1.
std::pair<double, double> closed_form_two_cycle(double r0, double A) {
    const double d = (kB2 + 1.0) * (kB2 + 1.0) - kB1 * kB1;
    return {(r0 * r0 * (kB2 + 1.0) - A * kB1) / (r0 * d), (A * (kB2 + 1.0) - r0 * r0 * kB1) / (r0 * d)};
}

int period2(const GlobalFlags& flags, std::ostream& out) {
    constexpr double A = 1.0;
    Checks checks;
    const EquationSpec eq = worked_example_equation("1/u + u");
    checks.add("a1 = b1(a0+b1) - b2", eq.a()[1], 0.5, 1e-12);
    checks.add("a2 = b2(a0+b1)", eq.a()[2], -0.5, 1e-12);

    const auto facts = analyze(eq);
    const auto* pair = facts.empty() ? nullptr : std::get_if<ConjugatePair>(&facts.front());
    checks.add_flag("conjugate-pair factorization found", pair != nullptr);
    if (pair == nullptr) {
        out << dump_json(json{{"variant", "period2"}, {"checks", checks.list}, {"pass", false}});
        return kNumericalFailure;
    }
    checks.add("p'_0 = -b1 - a0", pair->p_prime[0], -kB1 - kA0, 1e-12);
    checks.add("q'_0", pair->q_prime[0], 1.0, 1e-12);

    // Generic start: the orbit converges to the 2-cycle fixed by r0.
    const std::vector<double> init = default_init(2);
    const double r0 = init[2] + kB1 * init[1] + kB2 * init[0];
    const auto [xi0, xi1] = closed_form_two_cycle(r0, A);
    const long steps = flags.steps.value_or(400);
    const Orbit orbit = simulate_direct(eq, init, steps);
    const auto cycle = detect_cycle(orbit, 4, 1e-10);
    checks.add_flag("2-cycle detected", cycle.has_value() && 2 % cycle->prime_period == 0);
    json detected = nullptr;
    if (cycle) {
        checks.add("detected x at even index vs xi0", cycle->at(0), xi0, 1e-6);
        checks.add("detected x at odd index vs xi1", cycle->at(1), xi1, 1e-6);
        detected = to_json(*cycle);
    }

    // Fixed-point degenerate case r0 = 1 and a genuine 2-cycle at r0 = 2.
    const auto [f0, f1] = closed_form_two_cycle(1.0, A);
    checks.add("r0=1: xi0", f0, 2.0, 1e-12);
    checks.add("r0=1: xi1", f1, 2.0, 1e-12);
    const auto [g0, g1] = closed_form_two_cycle(2.0, A);
    checks.add("r0=2: xi0", g0, 2.8, 1e-12);
    checks.add("r0=2: xi1", g1, 2.2, 1e-12);

    Cycle r_cycle;
    r_cycle.values = {2.0, A / 2.0};
    r_cycle.prime_period = 2;
    const Cycle lifted = lift_conjugate_pair(pair->rho(), r_cycle);
    checks.add("two-stage lift xi0 (r0=2)", lifted.at(0), g0, 1e-12);
    checks.add("two-stage lift xi1 (r0=2)", lifted.at(1), g1, 1e-12);

    // Exact periodic start x_{-2} = xi0, x_{-1} = xi1, x_0 = r0 - b1 xi1 - b2 xi0.
    const double x0 = 2.0 - kB1 * g1 - kB2 * g0;
    checks.add("x0 = r0 - b1 xi1 - b2 xi0 equals xi0", x0, g0, 1e-12);
    const std::vector<double> exact_init{g0, g1, x0};
    const Orbit exact = simulate_direct(eq, exact_init, 100);
    double drift = 0.0;
    for (long n = exact.first_index(); n <= exact.last_index(); ++n)
        drift = std::max(drift, std::abs(exact.x(n) - (n % 2 == 0 ? g0 : g1)));
    checks.add("exact 2-cycle from documented initial values", drift, 0.0, 1e-9);

    const json report{{"variant", "period2"},
                      {"parameters", json{{"a0", kA0}, {"b1", kB1}, {"b2", kB2}, {"A", A}, {"B", 0.0}, {"C", 1.0}}},
                      {"equation", to_json(eq)},
                      {"r0", r0},
                      {"closed_form", json{{"xi0", xi0}, {"xi1", xi1}}},
                      {"detected_cycle", detected},
                      {"checks", checks.list},
                      {"pass", checks.all_pass}};
    out << dump_json(report);
    return checks.all_pass ? kOk : kNumericalFailure;
}

int threecycle(const GlobalFlags& flags, std::ostream& out) {
    Checks checks;
    const EquationSpec eq = worked_example_equation("1/u - sqrt(3) + 2*u");
    const auto facts = analyze(eq);
    const auto* pair = facts.empty() ? nullptr : std::get_if<ConjugatePair>(&facts.front());
    checks.add_flag("conjugate-pair factorization found", pair != nullptr);
    if (pair == nullptr) {
        out << dump_json(json{{"variant", "threecycle"}, {"checks", checks.list}, {"pass", false}});
        return kNumericalFailure;
    }

    // Factor map r -> -p'_0 r + g(q'_0 r) = 1/r - sqrt(3) + r.
    const auto factor_map = [&](double r) {
        const EvalResult g = eval_g(eq.g(), pair->q_prime[0] * r, 0);
        if (!g.ok()) throw Error("factor map hit the singularity");
        return -pair->p_prime[0] * r + g.value;
    };
    const double sigma0 = 2.0 / std::sqrt(3.0) * (1.0 + std::cos(std::numbers::pi / 9.0));
    const double sigma1 = factor_map(sigma0);
    const double sigma2 = factor_map(sigma1);
    checks.add("|h^3(sigma0) - sigma0|", factor_map(sigma2), sigma0, 1e-9);

    Cycle r_cycle;
    r_cycle.values = {sigma0, sigma1, sigma2};
    r_cycle.prime_period = 3;
    const Cycle lifted = lift_conjugate_pair(pair->rho(), r_cycle);
    checks.add_flag("lifted cycle has prime period 3", lifted.prime_period == 3);
    checks.add("lifted cycle residual in the third-order equation", cycle_residual(eq, lifted), 0.0, 1e-8);

    // Start on the plane x0 + b1 x_{-1} + b2 x_{-2} = sigma0 and let the cofactor contract.
    std::vector<double> init = default_init(2);
    init[2] = sigma0 - kB1 * init[1] - kB2 * init[0];
    const Orbit orbit = simulate_direct(eq, init, flags.steps.value_or(600));
    const auto cycle = detect_cycle(orbit, 6, 1e-8);
    checks.add_flag("period-3 attractor detected", cycle.has_value() && cycle->prime_period == 3);
    json detected = nullptr;
    if (cycle && cycle->prime_period == 3) {
        checks.add("detected vs lifted (aligned)", aligned_gap(*cycle, lifted), 0.0, 1e-6);
        detected = to_json(*cycle);
    }

    const json report{{"variant", "threecycle"},
                      {"parameters", json{{"a0", kA0}, {"b1", kB1}, {"b2", kB2}, {"A", 1.0}, {"B", -std::sqrt(3.0)},
                                          {"C", 2.0}}},
                      {"equation", to_json(eq)},
                      {"factor_cycle", to_json(r_cycle)},
                      {"lifted_cycle", to_json(lifted)},
                      {"detected_cycle", detected},
                      {"checks", checks.list},
                      {"pass", checks.all_pass}};
    out << dump_json(report);
    return checks.all_pass ? kOk : kNumericalFailure;
}

}  // namespace

int cmd_analyze(const RunConfig& config, const GlobalFlags& flags, std::ostream& out) {
    const EquationSpec eq = build_equation(config);
    const double tol = flags.tol.value_or(config.tolerances.root);
    const auto [P, Q] = build_pq(eq);

    json roots = json::array();
    for (Complex r : shared_roots(eq, tol)) {
        roots.push_back(json{{"re", r.real()},
                             {"im", r.imag()},
                             {"modulus", std::abs(r)},
                             {"residual_p", std::abs(eval(P, r)) / residual_scale(P, r)},
                             {"residual_q", Q.is_zero() ? 0.0 : std::abs(eval(Q, r)) / residual_scale(Q, r)}});
    }
    json facts = json::array();
    for (const Factorization& f : analyze(eq, tol)) facts.push_back(to_json(f, eq));

    const json report{{"command", "analyze"}, {"equation", to_json(eq)}, {"P", to_json(P)}, {"Q", to_json(Q)},
                      {"tol", tol},           {"common_roots", roots},   {"factorizations", facts}};
    const std::string text = dump_json(report);
    if (flags.out) write_file(*flags.out, text);
    out << text;
    return kOk;
}

int cmd_simulate(const RunConfig& config, const GlobalFlags& flags, std::ostream& out) {
    const EquationSpec eq = build_equation(config);
    const double tol = flags.tol.value_or(config.tolerances.root);
    const long steps = flags.steps.value_or(config.steps);
    const std::vector<double> init = initial_values(config);

    const Orbit direct = simulate_direct(eq, init, steps);
    const auto facts = analyze(eq, tol);

    json summary{{"command", "simulate"},
                 {"equation", to_json(eq)},
                 {"steps", steps},
                 {"status", to_string(direct.status)}};
    if (direct.status != OrbitStatus::Completed) summary["halt_step"] = direct.halt_step;
    if (!direct.fault.empty()) summary["fault"] = direct.fault;

    std::optional<Orbit> factored;
    if (facts.empty()) {
        summary["factorization"] = nullptr;
        summary["note"] = "no factorization available";
    } else {
        const Factorization& f = facts.front();
        summary["factorization"] = to_json(f, eq);
        factored = simulate_factored(f, eq, init, steps);
        const double gap = max_abs_gap(direct, *factored);
        const double rel = gap / (1.0 + sup_norm(direct));
        summary["equivalence"] = json{{"max_abs_gap", gap},
                                      {"relative_gap", rel},
                                      {"tol", config.tolerances.equivalence},
                                      {"factored_status", to_string(factored->status)},
                                      {"pass", rel <= config.tolerances.equivalence && factored->status == direct.status}};

        const Complex rho = cofactor_root(f);
        if (std::abs(rho) < 1.0 && direct.status == OrbitStatus::Completed) {
            summary["bound_certificate"] = to_json(bound_certificate(std::abs(rho), driving_sup(rho, direct), direct));
        } else {
            summary["bound_certificate"] = nullptr;
            summary["note"] = std::abs(rho) < 1.0 ? "orbit halted; no certificate" : "not contracting (|rho| >= 1)";
        }
    }

    const auto cycle = direct.status == OrbitStatus::Completed
                           ? try_detect(direct.values, direct.first_index(), config.max_period, config.tolerances.cycle)
                           : std::nullopt;
    summary["cycle"] = cycle ? to_json(*cycle) : json(nullptr);

    const std::optional<std::string> path = flags.out ? flags.out : config.output.path;
    if (config.output.format == OutputFormat::Json) {
        json orbits{{"direct", to_json(direct)}};
        if (factored) orbits["factored"] = to_json(*factored);
        if (path) {
            write_file(*path, dump_json(orbits));
        } else {
            summary["orbits"] = orbits;
        }
    } else if (path) {
        std::ostringstream csv;
        write_orbit_csv(csv, direct, factored ? &*factored : nullptr);
        write_file(*path, csv.str());
    }
    if (path) summary["output"] = *path;
    out << dump_json(summary);
    return kOk;
}

int cmd_cycles(const RunConfig& config, const GlobalFlags& flags, int max_period, std::ostream& out) {
    if (max_period < 1) throw ConfigError("--max-period must be >= 1");
    const EquationSpec eq = build_equation(config);
    const double tol = flags.tol.value_or(config.tolerances.root);
    const long steps = flags.steps.value_or(config.steps);
    if (steps + eq.k() + 1 < 4L * max_period) throw ConfigError("steps too small for the requested --max-period");
    const std::vector<double> init = initial_values(config);

    const Orbit direct = simulate_direct(eq, init, steps);
    const auto direct_cycle = detect_cycle(direct, max_period, config.tolerances.cycle);

    json report{{"command", "cycles"},
                {"equation", to_json(eq)},
                {"steps", steps},
                {"max_period", max_period},
                {"status", to_string(direct.status)},
                {"direct_cycle", direct_cycle ? to_json(*direct_cycle) : json(nullptr)}};

    const auto facts = analyze(eq, tol);
    if (!facts.empty()) {
        const Factorization& f = facts.front();
        const Orbit factored = simulate_factored(f, eq, init, steps);
        std::optional<Cycle> factor_cycle;
        if (factored.status == OrbitStatus::Completed)
            factor_cycle = detect_cycle(factored.factor_values, factored.first_index(), max_period,
                                        config.tolerances.cycle);
        json lift = nullptr;
        if (factor_cycle) {
            try {
                const Cycle lifted = lift_factor_cycle(f, *factor_cycle);
                lift = json{{"cycle", to_json(lifted)}, {"equation_residual", cycle_residual(eq, lifted)}};
                if (direct_cycle) lift["gap_to_direct"] = aligned_gap(*direct_cycle, lifted);
            } catch (const RootOfUnity& e) {
                lift = json{{"error", e.what()}};
            }
        }
        report["factorization"] = to_json(f, eq);
        report["factor_cycle"] = factor_cycle ? to_json(*factor_cycle) : json(nullptr);
        report["lifted"] = lift;
        if (std::abs(cofactor_root(f)) >= 1.0) report["note"] = "|rho| >= 1: lifted cycle need not attract";
    }
    const std::string text = dump_json(report);
    if (flags.out) write_file(*flags.out, text);
    out << text;
    return kOk;
}

int cmd_verify(const RunConfig& config, const GlobalFlags& flags, int trials, std::uint64_t seed, std::ostream& out) {
    if (trials < 1) throw ConfigError("--trials must be >= 1");
    const EquationSpec eq = build_equation(config);
    const double tol = flags.tol.value_or(config.tolerances.root);
    const long steps = flags.steps.value_or(config.steps);
    const auto facts = analyze(eq, tol);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    double worst = 0.0;
    int failures = 0;
    int lift_checks = 0;
    int lift_failures = 0;
    for (int trial = 0; trial < trials; ++trial) {
        std::vector<double> init(static_cast<std::size_t>(eq.k()) + 1);
        for (double& v : init) v = dist(rng);
        const Orbit direct = simulate_direct(eq, init, steps);
        for (const Factorization& f : facts) {
            const Orbit factored = simulate_factored(f, eq, init, steps);
            const double rel = max_abs_gap(direct, factored) / (1.0 + sup_norm(direct));
            worst = std::max(worst, rel);
            if (rel > config.tolerances.equivalence || factored.status != direct.status) ++failures;
        }
        if (!facts.empty()) {
            const Orbit factored = simulate_factored(facts.front(), eq, init, steps);
            if (factored.status != OrbitStatus::Completed) continue;
            const auto cycle = try_detect(factored.factor_values, factored.first_index(), config.max_period,
                                          config.tolerances.cycle);
            if (!cycle) continue;
            try {
                const Cycle lifted = lift_factor_cycle(facts.front(), *cycle);
                ++lift_checks;
                if (!(cycle_residual(eq, lifted) <= 1e-8)) ++lift_failures;
            } catch (const RootOfUnity&) {
            }
        }
    }
    const bool pass = failures == 0 && lift_failures == 0;
    const json report{{"command", "verify"},
                      {"seed", seed},
                      {"trials", trials},
                      {"steps", steps},
                      {"factorizations", static_cast<int>(facts.size())},
                      {"max_relative_gap", worst},
                      {"equivalence_tol", config.tolerances.equivalence},
                      {"equivalence_failures", failures},
                      {"lift_checks", lift_checks},
                      {"lift_failures", lift_failures},
                      {"pass", pass}};
    const std::string text = dump_json(report);
    if (flags.out) write_file(*flags.out, text);
    out << text;
    return pass ? kOk : kNumericalFailure;
}

int cmd_paper_example(const std::string& variant, const GlobalFlags& flags, std::ostream& out) {
    if (variant == "period2") return period2(flags, out);
    if (variant == "threecycle") return threecycle(flags, out);
    throw ConfigError("unknown example variant '" + variant + "' (expected period2 or threecycle)");
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semiconjugate factorization and periodic-orbit analysis of difference equations"};
    app.require_subcommand(1);
    GlobalFlags flags;
    double tol = 0.0;
    long steps = 0;
    std::string out_path;
    auto* tol_opt = app.add_option("--tol", tol, "Relative tolerance for common roots");
    auto* steps_opt = app.add_option("--steps", steps, "Number of iteration steps");
    auto* out_opt = app.add_option("--out", out_path, "Output file");
    // Subcommands inherit this, so global flags may follow the subcommand.
    app.fallthrough();

    std::string config_path;
    auto* analyze_cmd = app.add_subcommand("analyze", "Common roots and factorizations");
    analyze_cmd->add_option("config", config_path, "JSON config")->required();
    auto* simulate_cmd = app.add_subcommand("simulate", "Direct and factored orbits");
    simulate_cmd->add_option("config", config_path, "JSON config")->required();
    int max_period = 8;
    auto* cycles_cmd = app.add_subcommand("cycles", "Detect and lift periodic cycles");
    cycles_cmd->add_option("config", config_path, "JSON config")->required();
    cycles_cmd->add_option("--max-period", max_period, "Largest period tested");
    int trials = 20;
    std::uint64_t seed = 1;
    auto* verify_cmd = app.add_subcommand("verify", "Randomized equivalence and lift checks");
    verify_cmd->add_option("config", config_path, "JSON config")->required();
    verify_cmd->add_option("--trials", trials, "Number of random initial conditions");
    auto* seed_opt = verify_cmd->add_option("--seed", seed, "PRNG seed");
    std::string variant;
    auto* example_cmd = app.add_subcommand("paper-example", "Golden worked-example scenarios");
    example_cmd->add_option("variant", variant, "period2 | threecycle")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfigError;
    }
    if (*tol_opt) flags.tol = tol;
    if (*steps_opt) flags.steps = steps;
    if (*out_opt) flags.out = out_path;

    try {
        if (*example_cmd) return cmd_paper_example(variant, flags, out);
        const RunConfig config = load_config(config_path);
        if (*analyze_cmd) return cmd_analyze(config, flags, out);
        if (*simulate_cmd) return cmd_simulate(config, flags, out);
        if (*cycles_cmd) return cmd_cycles(config, flags, max_period, out);
        if (*verify_cmd) return cmd_verify(config, flags, trials, *seed_opt ? seed : config.seed, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const SyntaxError& e) {
        err << "expression " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    }
    return kOk;
}

}  // namespace semiconj::cli
