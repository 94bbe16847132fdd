#pragma once

/**
 * @file polynomial.hpp
 * @brief Dense complex polynomials, simultaneous root finding and division
 *        by a quadratic factor (u - gamma)(u - rho).
 *
 * Coefficients are stored leading-first: c[0] u^m + c[1] u^{m-1} + ... + c[m].
 * The zero polynomial has no coefficients and degree -1.
 */

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace semiconj {

using Complex = std::complex<double>;

class Poly {
  public:
    Poly() = default;

    /// Leading zeros are stripped. Throws std::invalid_argument on NaN/Inf.
    explicit Poly(std::vector<Complex> coeffs);

    static Poly from_real(std::span<const double> coeffs);
    /// lead * prod (u - r_i)
    static Poly from_roots(std::span<const Complex> roots, Complex lead = 1.0);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    std::span<const Complex> coeffs() const noexcept { return coeffs_; }
    Complex operator[](std::size_t i) const { return coeffs_[i]; }
    Complex leading() const { return coeffs_.front(); }

    /// True when every imaginary part is at most tol in magnitude.
    bool is_real(double tol = 0.0) const noexcept;
    double max_abs_coeff() const noexcept;

    Poly derivative() const;

    friend Poly operator+(const Poly& lhs, const Poly& rhs);
    friend Poly operator-(const Poly& lhs, const Poly& rhs);
    friend Poly operator*(const Poly& lhs, const Poly& rhs);
    friend bool operator==(const Poly&, const Poly&) = default;

  private:
    std::vector<Complex> coeffs_;
};

/// Horner evaluation.
Complex eval(const Poly& p, Complex u) noexcept;

/// Residual scale used by every root acceptance test:
/// max_j |c_j| * max(1, |r|)^m.
double residual_scale(const Poly& p, Complex r) noexcept;

struct RootOptions {
    int max_sweeps = 1000;
    int polish_steps = 3;
};

/**
 * All m roots of p (with multiplicity), by Aberth-Ehrlich iteration followed
 * by Newton polishing. Each root r satisfies |p(r)| <= tol * residual_scale(p, r).
 * For real-coefficient input the roots are made exactly conjugate-symmetric.
 *
 * Throws NonConvergence when the residual bound cannot be met within
 * max_sweeps, and std::invalid_argument for degree < 1.
 */
std::vector<Complex> roots(const Poly& p, double tol = 1e-8, const RootOptions& options = {});

struct QuadDivision {
    Poly quotient;
    double residual1 = 0.0;  ///< |c_{m-1} + (gamma+rho) alpha_{m-2} - gamma rho alpha_{m-3}|
    double residual2 = 0.0;  ///< |c_m - gamma rho alpha_{m-2}|
    /// Signed remainder: p = (u^2 - (gamma+rho) u + gamma rho) quotient + remainder_linear u + remainder_constant.
    Complex remainder_linear;
    Complex remainder_constant;
};

/// Quotient of p by (u - gamma)(u - rho) via the three-term recursion
/// alpha_j = c_j + (gamma+rho) alpha_{j-1} - gamma rho alpha_{j-2}.
QuadDivision divide_by_quadratic(const Poly& p, Complex gamma, Complex rho);

/// Same quotient from the explicit sums over divided differences of powers;
/// switches to the confluent form when |gamma - rho| <= 1e-9 max(1, |gamma|).
Poly quotient_closed_form(const Poly& p, Complex gamma, Complex rho);

struct CommonRootOptions {
    double zero_tol = 1e-12;   ///< relative to max(1, |leading(p)|)
    double match_tol = 1e-8;   ///< relative clustering radius
};

/**
 * Nonzero roots of p that are also roots of q, repeated by their common
 * multiplicity. Ordered by descending |Im| then descending modulus, with the
 * upper half-plane member of a conjugate pair first.
 */
std::vector<Complex> common_roots(const Poly& p, const Poly& q, double tol = 1e-8,
                                  const CommonRootOptions& options = {});

}  // namespace semiconj
