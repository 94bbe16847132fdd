#pragma once

// Orbit simulation of the original equation and of its factored systems,
// cycle detection, cycle lifting through cofactors, and the boundedness
// certificate for a contracting cofactor.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semiconj/polynomial.hpp"
#include "semiconj/reduction.hpp"

namespace semiconj {

enum class OrbitStatus { Completed, ForbiddenSet, Overflowed };

std::string to_string(OrbitStatus status);

inline constexpr double kOverflowCap = 1e12;

/// values[0] is x_{-k}; values[k] is x_0; values[k + n] is x_n.
struct Orbit {
    int k = 0;
    std::vector<double> values;
    OrbitStatus status = OrbitStatus::Completed;
    /// Step n at which computing x_{n+1} failed (meaningful unless Completed).
    long halt_step = -1;
    std::string fault;  ///< domain-fault reason when status == ForbiddenSet
    std::string source;  ///< "direct" or the factorization kind
    /// Factor-equation sequence aligned with values (t_n or r_n); empty for direct runs.
    std::vector<double> factor_values;

    long first_index() const noexcept { return -k; }
    long last_index() const noexcept { return static_cast<long>(values.size()) - 1 - k; }
    double x(long n) const { return values.at(static_cast<std::size_t>(n + k)); }
};

struct SimOptions {
    double overflow_cap = kOverflowCap;
};

/// init holds x_{-k}, ..., x_0 in chronological order; steps new values are produced.
Orbit simulate_direct(const EquationSpec& eq, std::span<const double> init, long steps,
                      const SimOptions& options = {});

/// Runs the factor equation and its cofactor(s) in lockstep and emits the
/// x-orbit. Throws MismatchedFactorization if f does not belong to eq.
Orbit simulate_factored(const Factorization& f, const EquationSpec& eq, std::span<const double> init, long steps,
                        const SimOptions& options = {});

/// Sup-norm gap over the common prefix of two orbits.
double max_abs_gap(const Orbit& lhs, const Orbit& rhs);
double sup_norm(const Orbit& orbit);

struct Cycle {
    std::vector<double> values;
    int prime_period = 0;
    double tol = 0.0;
    /// Orbit index carried by values[0]; values[i] sits at every index
    /// congruent to start_index + i modulo the period.
    long start_index = 0;

    /// Value at orbit index n, by periodic extension.
    double at(long n) const;
};

inline constexpr double kUnityTol = 1e-9;

/**
 * One cofactor stage x_{n+1} = rho x_n + t_{n+1}:
 *   xi_i = (1 / (1 - rho^p)) sum_{j<p} rho^{p-j-1} tau_{(i+j) mod p}.
 * With tau_i = t_{i+1} the result satisfies xi_i = x_i.
 * Throws RootOfUnity when |rho^p - 1| <= kUnityTol.
 */
std::vector<Complex> lift_cycle(Complex rho, std::span<const Complex> tau);

/// Lift of a factor-equation cycle through the first-order cofactor of a real
/// root. Output is aligned with the input's start_index.
Cycle lift_cycle(double rho, const Cycle& t_cycle);

/// Two-stage lift of an r-cycle: first through conj(rho), then through rho.
/// Throws Error if the result is not real to 1e-10 (relative).
Cycle lift_conjugate_pair(Complex rho, const Cycle& r_cycle);

/// Lift through whichever cofactor f carries.
Cycle lift_factor_cycle(const Factorization& f, const Cycle& factor_cycle);

struct DetectOptions {
    double transient_fraction = 0.5;
};

/// Smallest p <= max_period such that the orbit tail repeats with period p
/// over two consecutive windows, under |x - y| <= tol * max(1, sup|tail|).
std::optional<Cycle> detect_cycle(std::span<const double> series, long first_index, int max_period, double tol,
                                  const DetectOptions& options = {});
std::optional<Cycle> detect_cycle(const Orbit& orbit, int max_period, double tol, const DetectOptions& options = {});

/// Smallest period of a finite cyclic sequence under tol (relative to max(1, sup)).
int minimal_period(std::span<const double> values, double tol);

/// Largest residual of the original equation along the periodic extension of
/// cycle, over one full period of steps.
double cycle_residual(const EquationSpec& eq, const Cycle& cycle);

/// Up-to-rotation sup distance between two cycles of the same length.
double cycle_distance(std::span<const double> lhs, std::span<const double> rhs);

struct BoundCertificate {
    double rho_modulus = 0.0;
    double M = 0.0;
    long N = 0;
    double bound = 0.0;      ///< rho_modulus + M / (1 - rho_modulus)
    bool M_empirical = true; ///< M is a sup over the simulated range, not a proof
    double tail_max = 0.0;   ///< max |x_n| for n >= N within the orbit
    bool verified = false;   ///< tail_max <= bound + 1e-9
};

/// M bounds the driving sequence t_n of the cofactor x_{n+1} = rho x_n + t_{n+1}.
/// N is the first n >= 0 with |rho|^n |x_0| <= |rho|. Throws NotContracting
/// unless 0 < rho_modulus < 1.
BoundCertificate bound_certificate(double rho_modulus, double t_bound, const Orbit& orbit);

/// Empirical sup_{n >= 1} |x_n - rho x_{n-1}|, the driving sequence of the
/// first-order cofactor through rho.
double driving_sup(Complex rho, const Orbit& orbit);

/// x_n = rho^n x_0 + sum_{j=1}^{n} rho^{n-j} t_j for n = 0..t.size(); t[0] is t_1.
std::vector<Complex> solution_formula_check(Complex rho, Complex x0, std::span<const Complex> t);

}  // namespace semiconj
