#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "semiconj/config.hpp"

namespace semiconj::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

struct GlobalFlags {
    std::optional<double> tol;
    std::optional<long> steps;
    std::optional<std::string> out;
};

int cmd_analyze(const RunConfig& config, const GlobalFlags& flags, std::ostream& out);
int cmd_simulate(const RunConfig& config, const GlobalFlags& flags, std::ostream& out);
int cmd_cycles(const RunConfig& config, const GlobalFlags& flags, int max_period, std::ostream& out);
int cmd_verify(const RunConfig& config, const GlobalFlags& flags, int trials, std::uint64_t seed, std::ostream& out);
/// variant is "period2" or "threecycle".
int cmd_paper_example(const std::string& variant, const GlobalFlags& flags, std::ostream& out);

/// Full command-line entry point; maps exceptions onto exit codes.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace semiconj::cli
