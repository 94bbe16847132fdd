#pragma once

// Seeded generators of synthesized equations shared by unit and acceptance tests.

#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "oracles.hpp"
#include "semiconj/reduction.hpp"

namespace fixtures {

struct SynthCase {
    semiconj::EquationSpec eq;
    double mu;
    double theta;
    std::vector<double> a_expected;  ///< full a from the planted root set
    std::vector<double> init;        ///< x_{-k}, ..., x_0
};

inline std::string tanh_family(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(0.2, 1.5);
    std::uniform_real_distribution<double> shift(-0.5, 0.5);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g*tanh(u + %.17g)", amp(rng), shift(rng));
    return buf;
}

/// P = (u - mu e^{i theta})(u - mu e^{-i theta}) * prod (u - z), |z| <= 0.9.
inline SynthCase random_synth(std::mt19937_64& rng, int k, double mu_lo, double mu_hi, const std::string& g) {
    std::uniform_real_distribution<double> mu_d(mu_lo, mu_hi);
    std::uniform_real_distribution<double> theta_d(0.15, std::numbers::pi - 0.15);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double mu = mu_d(rng);
    const double theta = theta_d(rng);
    const auto others = oracle::random_real_root_set(rng, k - 1, 0.9);
    std::vector<double> a = oracle::a_from_roots(mu, theta, others);
    std::vector<double> a_free(a.begin(), a.end() - 2);
    std::vector<double> b_free;
    for (int i = 0; i < k - 1; ++i) b_free.push_back(unit(rng));
    b_free[0] = 1.0;
    std::vector<double> init;
    for (int i = 0; i <= k; ++i) init.push_back(unit(rng));
    auto eq = semiconj::synth_equation(k, mu, theta, a_free, b_free, semiconj::parse(g));
    return SynthCase{std::move(eq), mu, theta, std::move(a), std::move(init)};
}

}  // namespace fixtures
