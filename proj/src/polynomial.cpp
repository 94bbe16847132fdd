#include "semiconj/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "semiconj/error.hpp"

namespace semiconj {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// p(z) and p'(z) in one Horner pass.
std::pair<Complex, Complex> eval_with_derivative(std::span<const Complex> c, Complex z) {
    Complex value = c[0];
    Complex deriv = 0.0;
    for (std::size_t j = 1; j < c.size(); ++j) {
        deriv = deriv * z + value;
        value = value * z + c[j];
    }
    return {value, deriv};
}

// Upper bound on root moduli (Fujiwara) for a monic coefficient vector.
double fujiwara_bound(std::span<const Complex> monic) {
    const std::size_t m = monic.size() - 1;
    double bound = 0.0;
    for (std::size_t j = 1; j <= m; ++j) {
        double term = std::pow(std::abs(monic[j]), 1.0 / static_cast<double>(j));
        if (j == m) term = std::pow(std::abs(monic[j]) / 2.0, 1.0 / static_cast<double>(j));
        bound = std::max(bound, term);
    }
    return 2.0 * bound;
}

std::vector<Complex> initial_guesses(std::span<const Complex> monic) {
    const std::size_t m = monic.size() - 1;
    double radius = std::pow(std::abs(monic[m]), 1.0 / static_cast<double>(m));
    if (!(radius > 0.0)) radius = 0.5 * fujiwara_bound(monic);
    if (!(radius > 0.0)) radius = 1.0;
    const Complex center = -monic[1] / static_cast<double>(m);
    std::vector<Complex> z(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m) + 0.4;
        z[i] = center + std::polar(radius, angle);
    }
    return z;
}

void polish(const Poly& p, Complex& z, int steps) {
    double best = std::abs(eval(p, z));
    for (int s = 0; s < steps && best > 0.0; ++s) {
        auto [value, deriv] = eval_with_derivative(p.coeffs(), z);
        if (deriv == Complex(0.0)) return;
        const Complex next = z - value / deriv;
        const double residual = std::abs(eval(p, next));
        if (!(residual < best)) return;
        z = next;
        best = residual;
    }
}

// For real coefficients: snap near-real roots onto the axis and mirror pairs exactly.
void enforce_conjugate_symmetry(const Poly& p, std::vector<Complex>& z, double tol) {
    std::vector<double> real_roots;
    std::vector<Complex> upper;
    std::vector<Complex> lower;
    for (Complex r : z) {
        const double mag = std::max(1.0, std::abs(r));
        if (std::abs(r.imag()) <= 1e-7 * mag &&
            std::abs(eval(p, Complex(r.real(), 0.0))) <= tol * residual_scale(p, r.real())) {
            real_roots.push_back(r.real());
        } else if (r.imag() >= 0.0) {
            upper.push_back(r);
        } else {
            lower.push_back(r);
        }
    }
    std::vector<Complex> out;
    out.reserve(z.size());
    for (double r : real_roots) out.emplace_back(r, 0.0);
    std::vector<bool> used(lower.size(), false);
    for (Complex u : upper) {
        std::size_t best = lower.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(u - std::conj(lower[j]));
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        if (best == lower.size()) {
            out.emplace_back(u.real(), 0.0);
            continue;
        }
        used[best] = true;
        const Complex mid = 0.5 * (u + std::conj(lower[best]));
        if (mid.imag() == 0.0) {
            out.emplace_back(mid.real(), 0.0);
            out.emplace_back(mid.real(), 0.0);
        } else {
            out.push_back(mid);
            out.push_back(std::conj(mid));
        }
    }
    for (std::size_t j = 0; j < lower.size(); ++j) {
        if (!used[j]) out.emplace_back(lower[j].real(), 0.0);
    }
    z = std::move(out);
}

// Number of consecutive derivatives of q vanishing at r (0 when q(r) != 0).
int vanishing_order(const Poly& q, Complex r, double tol) {
    int order = 0;
    Poly d = q;
    while (!d.is_zero() && d.degree() >= 1 && std::abs(eval(d, r)) <= tol * residual_scale(d, r)) {
        ++order;
        d = d.derivative();
    }
    return order;
}

}  // namespace

Poly::Poly(std::vector<Complex> coeffs) {
    for (Complex c : coeffs) {
        if (!finite(c)) throw std::invalid_argument("Poly: non-finite coefficient");
    }
    auto first = std::find_if(coeffs.begin(), coeffs.end(), [](Complex c) { return c != Complex(0.0); });
    coeffs.erase(coeffs.begin(), first);
    coeffs_ = std::move(coeffs);
}

Poly Poly::from_real(std::span<const double> coeffs) {
    return Poly(std::vector<Complex>(coeffs.begin(), coeffs.end()));
}

Poly Poly::from_roots(std::span<const Complex> roots, Complex lead) {
    std::vector<Complex> c{lead};
    for (Complex r : roots) {
        c.push_back(0.0);
        for (std::size_t j = c.size() - 1; j > 0; --j) c[j] -= r * c[j - 1];
    }
    return Poly(std::move(c));
}

bool Poly::is_real(double tol) const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [tol](Complex c) { return std::abs(c.imag()) <= tol; });
}

double Poly::max_abs_coeff() const noexcept {
    double m = 0.0;
    for (Complex c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Poly Poly::derivative() const {
    if (degree() < 1) return Poly{};
    std::vector<Complex> d;
    const int m = degree();
    for (int j = 0; j < m; ++j) d.push_back(coeffs_[j] * static_cast<double>(m - j));
    return Poly(std::move(d));
}

Poly operator+(const Poly& lhs, const Poly& rhs) {
    const std::size_t n = std::max(lhs.coeffs_.size(), rhs.coeffs_.size());
    std::vector<Complex> c(n, 0.0);
    for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i) c[n - lhs.coeffs_.size() + i] += lhs.coeffs_[i];
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) c[n - rhs.coeffs_.size() + i] += rhs.coeffs_[i];
    return Poly(std::move(c));
}

Poly operator-(const Poly& lhs, const Poly& rhs) {
    std::vector<Complex> neg(rhs.coeffs_.begin(), rhs.coeffs_.end());
    for (Complex& c : neg) c = -c;
    return lhs + Poly(std::move(neg));
}

Poly operator*(const Poly& lhs, const Poly& rhs) {
    if (lhs.is_zero() || rhs.is_zero()) return Poly{};
    std::vector<Complex> c(lhs.coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < lhs.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) c[i + j] += lhs.coeffs_[i] * rhs.coeffs_[j];
    return Poly(std::move(c));
}

Complex eval(const Poly& p, Complex u) noexcept {
    Complex value = 0.0;
    for (Complex c : p.coeffs()) value = value * u + c;
    return value;
}

double residual_scale(const Poly& p, Complex r) noexcept {
    if (p.is_zero()) return 0.0;
    return p.max_abs_coeff() * std::pow(std::max(1.0, std::abs(r)), p.degree());
}

std::vector<Complex> roots(const Poly& p, double tol, const RootOptions& options) {
    const int m = p.degree();
    if (m < 1) throw std::invalid_argument("roots: degree must be at least 1");

    std::vector<Complex> monic(p.coeffs().begin(), p.coeffs().end());
    const Complex lead = monic[0];
    for (Complex& c : monic) c /= lead;

    std::vector<Complex> z;
    if (m == 1) {
        z.push_back(-monic[1]);
    } else {
        z = initial_guesses(monic);
        std::vector<bool> done(static_cast<std::size_t>(m), false);
        int sweep = 0;
        for (; sweep < options.max_sweeps; ++sweep) {
            bool all_done = true;
            for (int i = 0; i < m; ++i) {
                if (done[i]) continue;
                auto [value, deriv] = eval_with_derivative(monic, z[i]);
                if (value == Complex(0.0)) {
                    done[i] = true;
                    continue;
                }
                Complex repulsion = 0.0;
                for (int j = 0; j < m; ++j) {
                    if (j != i) repulsion += 1.0 / (z[i] - z[j]);
                }
                Complex denom = deriv - value * repulsion;
                if (denom == Complex(0.0)) denom = Complex(kEps, kEps);
                const Complex step = value / denom;
                z[i] -= step;
                if (!finite(z[i])) z[i] = Complex(0.5, 0.5) * static_cast<double>(i + 1);
                if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(z[i]))) {
                    done[i] = true;
                } else {
                    all_done = false;
                }
            }
            if (all_done) break;
        }
        for (Complex& r : z) polish(p, r, options.polish_steps);
    }

    if (p.is_real()) enforce_conjugate_symmetry(p, z, tol);

    for (Complex r : z) {
        if (!finite(r) || std::abs(eval(p, r)) > tol * residual_scale(p, r)) {
            throw NonConvergence("roots: residual bound not met after " +
                                 std::to_string(options.max_sweeps) + " sweeps");
        }
    }
    return z;
}

QuadDivision divide_by_quadratic(const Poly& p, Complex gamma, Complex rho) {
    const int m = p.degree();
    if (m < 2) throw std::invalid_argument("divide_by_quadratic: degree must be at least 2");
    const auto c = p.coeffs();
    const Complex sum = gamma + rho;
    const Complex prod = gamma * rho;

    std::vector<Complex> alpha(static_cast<std::size_t>(m - 1));
    alpha[0] = c[0];
    for (int j = 1; j <= m - 2; ++j) {
        const Complex prev2 = j >= 2 ? alpha[j - 2] : Complex(0.0);
        alpha[j] = c[j] + sum * alpha[j - 1] - prod * prev2;
    }
    const Complex alpha_m3 = m >= 3 ? alpha[m - 3] : Complex(0.0);

    QuadDivision out;
    out.remainder_linear = c[m - 1] + sum * alpha[m - 2] - prod * alpha_m3;
    out.remainder_constant = c[m] - prod * alpha[m - 2];
    out.residual1 = std::abs(out.remainder_linear);
    out.residual2 = std::abs(out.remainder_constant);
    out.quotient = Poly(std::move(alpha));
    return out;
}

Poly quotient_closed_form(const Poly& p, Complex gamma, Complex rho) {
    const int m = p.degree();
    if (m < 2) throw std::invalid_argument("quotient_closed_form: degree must be at least 2");
    const auto c = p.coeffs();
    const bool confluent = std::abs(gamma - rho) <= 1e-9 * std::max(1.0, std::abs(gamma));

    // weight[i] = (gamma^{i+1} - rho^{i+1}) / (gamma - rho), or (i+1) rho^i when confluent
    std::vector<Complex> weight(static_cast<std::size_t>(m - 1));
    Complex gpow = gamma;
    Complex rpow = rho;
    Complex rpow_prev = 1.0;
    for (int i = 0; i <= m - 2; ++i) {
        weight[i] = confluent ? static_cast<double>(i + 1) * rpow_prev : (gpow - rpow) / (gamma - rho);
        gpow *= gamma;
        rpow_prev = rpow;
        rpow *= rho;
    }

    std::vector<Complex> alpha(static_cast<std::size_t>(m - 1), 0.0);
    for (int j = 0; j <= m - 2; ++j)
        for (int i = 0; i <= j; ++i) alpha[j] += weight[i] * c[j - i];
    return Poly(std::move(alpha));
}

std::vector<Complex> common_roots(const Poly& p, const Poly& q, double tol, const CommonRootOptions& options) {
    if (p.is_zero() || q.is_zero()) throw std::invalid_argument("common_roots: zero polynomial");
    if (p.degree() < 1 || q.degree() < 1) return {};

    const std::vector<Complex> candidates = roots(p, tol);
    const double zero_tol = options.zero_tol * std::max(1.0, std::abs(p.leading()));

    // Cluster approximations of a multiple root; the mean is far more accurate
    // than any single member.
    struct Cluster {
        Complex sum;
        int count;
        Complex center() const { return sum / static_cast<double>(count); }
    };
    std::vector<Cluster> clusters;
    const double cluster_radius = std::sqrt(options.match_tol);
    for (Complex r : candidates) {
        bool merged = false;
        for (Cluster& cl : clusters) {
            const Complex c = cl.center();
            if (std::abs(r - c) <= cluster_radius * std::max(1.0, std::abs(c)) &&
                (std::abs(r - c) <= options.match_tol * std::max(1.0, std::abs(c)) ||
                 vanishing_order(p, 0.5 * (r + c), tol) >= cl.count + 1)) {
                cl.sum += r;
                ++cl.count;
                merged = true;
                break;
            }
        }
        if (!merged) clusters.push_back({r, 1});
    }

    std::vector<Complex> out;
    for (const Cluster& cl : clusters) {
        Complex r = cl.center();
        if (p.is_real() && std::abs(r.imag()) <= kEps * std::abs(r)) r = r.real();
        if (std::abs(r) <= zero_tol) continue;
        const int shared = std::min(cl.count, vanishing_order(q, r, tol));
        for (int i = 0; i < shared; ++i) out.push_back(r);
    }

    std::stable_sort(out.begin(), out.end(), [](Complex lhs, Complex rhs) {
        const double li = std::abs(lhs.imag());
        const double ri = std::abs(rhs.imag());
        if (li != ri) return li > ri;
        if (std::abs(lhs) != std::abs(rhs)) return std::abs(lhs) > std::abs(rhs);
        return lhs.imag() > rhs.imag();
    });
    return out;
}

}  // namespace semiconj
