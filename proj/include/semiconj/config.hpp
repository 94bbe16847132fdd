#pragma once

// JSON run configuration.
//
// {
//   "equation": { "k": 2, "a": [a0, a1, a2], "b": [b0, b1, b2], "g": "1/u" }
//     -- or --
//   "synth":    { "k": 2, "mu": 0.7071, "theta": 0.7854,
//                 "a_free": [a0], "b_free": [b0], "g": "1/u" },
//   "init": [x_{-k}, ..., x_0],          optional, default x_{-i} = 1 + i/10
//   "steps": 200,                         optional
//   "max_period": 8,                      optional
//   "seed": 1,                            optional, used by `verify`
//   "tolerances": { "root": 1e-8, "cycle": 1e-9, "equivalence": 1e-8 },
//   "output": { "format": "csv" | "json", "path": "orbit.csv" }
// }

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "semiconj/reduction.hpp"

namespace semiconj {

struct EquationInput {
    int k = 0;
    std::vector<double> a;
    std::vector<double> b;
    std::string g;
};

struct SynthInput {
    int k = 0;
    double mu = 0.0;
    double theta = 0.0;
    std::vector<double> a_free;
    std::vector<double> b_free;
    std::string g;
};

struct Tolerances {
    double root = kRootTol;
    double cycle = 1e-9;
    double equivalence = 1e-8;
};

enum class OutputFormat { Csv, Json };

struct OutputSpec {
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::string> path;
};

struct RunConfig {
    std::optional<EquationInput> equation;
    std::optional<SynthInput> synth;
    std::optional<std::vector<double>> init;
    long steps = 200;
    int max_period = 8;
    std::uint64_t seed = 1;
    Tolerances tolerances;
    OutputSpec output;

    int k() const { return equation ? equation->k : synth->k; }
};

/// Throws ConfigError on schema violations.
RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a config file; ConfigError on I/O or JSON errors.
RunConfig load_config(const std::string& path);

/// Parses g and builds (or synthesizes) the equation. SyntaxError propagates.
EquationSpec build_equation(const RunConfig& config);

/// x_{-i} = 1 + i/10, returned as x_{-k}, ..., x_0.
std::vector<double> default_init(int k);
std::vector<double> initial_values(const RunConfig& config);

}  // namespace semiconj
