#pragma once

/**
 * @file reduction.hpp
 * @brief Semiconjugate factorization of
 *
 *     x_{n+1} = sum_{i=0}^{k} a_i x_{n-i} + g_n( sum_{i=0}^{k} b_i x_{n-i} )
 *
 * through common nonzero roots of
 *
 *     P(u) = u^{k+1} - sum a_i u^{k-i},   Q(u) = sum b_i u^{k-i}.
 *
 * A real common root rho gives the factor equation
 *     t_{n+1} = -sum_{i<k} p_i t_{n-i} + g_n( sum_{i<k} q_i t_{n-i} )
 * with cofactor x_{n+1} = rho x_n + t_{n+1}. A conjugate pair mu e^{+-i theta}
 * gives an order k-1 real factor equation in r_n with the real second-order
 * cofactor x_{n+1} - 2 mu cos(theta) x_n + mu^2 x_{n-1} = r_{n+1}.
 */

#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "semiconj/gexpr.hpp"
#include "semiconj/polynomial.hpp"

namespace semiconj {

/// Order k+1 equation with linear arguments. a and b hold k+1 entries each.
class EquationSpec {
  public:
    /// Throws std::invalid_argument when k < 1, lengths differ from k+1,
    /// a value is non-finite, or a_k == b_k == 0.
    EquationSpec(int k, std::vector<double> a, std::vector<double> b, GExpr g);

    int k() const noexcept { return k_; }
    std::span<const double> a() const noexcept { return a_; }
    std::span<const double> b() const noexcept { return b_; }
    const GExpr& g() const noexcept { return g_; }

  private:
    int k_;
    std::vector<double> a_;
    std::vector<double> b_;
    GExpr g_;
};

struct SingleReal {
    double rho;
    std::vector<double> p;  ///< length k
    std::vector<double> q;  ///< length k
};

struct ConjugatePair {
    double mu;                    ///< modulus of the shared root, > 0
    double theta;                 ///< argument, normalized into (0, pi)
    std::vector<double> p_prime;  ///< length k-1
    std::vector<double> q_prime;  ///< length k-1

    Complex rho() const { return std::polar(mu, theta); }
};

/// Two chained first-order reductions over C (rho first, then gamma).
struct ComplexChain {
    Complex rho;
    Complex gamma;
    std::vector<Complex> p_prime_c;  ///< length k-1
    std::vector<Complex> q_prime_c;  ///< length k-1
};

using Factorization = std::variant<SingleReal, ConjugatePair, ComplexChain>;

/// Default relative acceptance tolerance for common roots.
inline constexpr double kRootTol = 1e-8;
/// |sin theta| at or below this means the root is treated as real.
inline constexpr double kAngleTol = 1e-9;

std::pair<Poly, Poly> build_pq(const EquationSpec& eq);

/// First-stage coefficients p_i, q_i for an arbitrary (possibly complex) rho.
struct StageCoefficients {
    std::vector<Complex> p;
    std::vector<Complex> q;
};
StageCoefficients first_stage_coefficients(const EquationSpec& eq, Complex rho);

SingleReal factor_single(const EquationSpec& eq, double rho, double tol = kRootTol);

/// Real reduction through the pair mu e^{+-i theta}; coefficients come from the
/// trigonometric closed forms. Throws DegenerateAngle or NotACommonRoot.
ConjugatePair factor_conjugate_pair(const EquationSpec& eq, double mu, double theta, double tol = kRootTol);

/// gamma == rho is allowed when rho is a double common root.
ComplexChain factor_complex_chain(const EquationSpec& eq, Complex rho, Complex gamma, double tol = kRootTol);

/// Residuals of the constrained trailing coefficients for a conjugate pair:
///   a_k     = -p'_{k-2} mu^2
///   a_{k-1} = 2 p'_{k-2} mu cos(theta) - p'_{k-3} mu^2       (p'_{-1} = 1)
///   b_k     =  q'_{k-2} mu^2
///   b_{k-1} =  q'_{k-3} mu^2 - 2 q'_{k-2} mu cos(theta)      (q'_{-1} = 0)
/// Each entry is |lhs - rhs| / max(1, |lhs|).
struct TrailingResiduals {
    double a_k;
    double a_k_minus_1;
    double b_k;
    double b_k_minus_1;

    double max() const;
};
TrailingResiduals trailing_residuals(const EquationSpec& eq, const ConjugatePair& f);

/// Builds the equation whose P, Q share mu e^{+-i theta}: a_0..a_{k-2} and
/// b_0..b_{k-2} are free, the last two of each are filled in.
EquationSpec synth_equation(int k, double mu, double theta, std::span<const double> a_free,
                            std::span<const double> b_free, GExpr g);

/// Every factorization available from the common roots of P and Q:
/// ConjugatePair per pair (k >= 2), SingleReal per distinct real root and a
/// ComplexChain per repeated real root (k >= 2).
std::vector<Factorization> analyze(const EquationSpec& eq, double tol = kRootTol);

/// Whether f's coefficients are consistent with eq (relative tol).
bool matches(const Factorization& f, const EquationSpec& eq, double tol = 1e-8);

/// Order of the factor equation (k for SingleReal, k-1 otherwise).
int factor_order(const Factorization& f);

}  // namespace semiconj
