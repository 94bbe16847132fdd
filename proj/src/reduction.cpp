#include "semiconj/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "semiconj/error.hpp"

namespace semiconj {

namespace {

bool annihilates(const Poly& p, Complex r, double tol) {
    if (p.is_zero()) return true;
    return std::abs(eval(p, r)) <= tol * residual_scale(p, r);
}

void require_common_root(const Poly& p, const Poly& q, Complex r, double tol, const char* what) {
    if (std::abs(r) == 0.0) throw NotACommonRoot(std::string(what) + ": root must be nonzero");
    if (!annihilates(p, r, tol) || !annihilates(q, r, tol)) {
        throw NotACommonRoot(std::string(what) + ": (" + std::to_string(r.real()) + ", " +
                             std::to_string(r.imag()) + ") is not a common root of P and Q");
    }
}

// p'_j and q'_j for j = 0..count-1 from the closed forms in mu, theta:
//   p'_j = mu^{j+1} sin((j+2)t)/sin t - (1/sin t) sum_{m<=j} a_m mu^{j-m} sin((j-m+1)t)
//   q'_j = (1/sin t) sum_{m<=j} b_m mu^{j-m} sin((j-m+1)t)
std::pair<std::vector<double>, std::vector<double>> trig_coefficients(double mu, double theta,
                                                                      std::span<const double> a,
                                                                      std::span<const double> b,
                                                                      std::size_t count) {
    const double s = std::sin(theta);
    std::vector<double> p(count);
    std::vector<double> q(count);
    for (std::size_t j = 0; j < count; ++j) {
        double pa = std::pow(mu, static_cast<double>(j + 1)) * std::sin(static_cast<double>(j + 2) * theta);
        double qb = 0.0;
        for (std::size_t m = 0; m <= j; ++m) {
            const double w = std::pow(mu, static_cast<double>(j - m)) * std::sin(static_cast<double>(j - m + 1) * theta);
            pa -= a[m] * w;
            qb += b[m] * w;
        }
        p[j] = pa / s;
        q[j] = qb / s;
    }
    return {std::move(p), std::move(q)};
}

double normalized_theta(double theta) {
    const double s = std::sin(theta);
    if (std::abs(s) <= kAngleTol) throw DegenerateAngle("conjugate pair: |sin(theta)| <= 1e-9");
    return std::atan2(std::abs(s), std::cos(theta));
}

Poly first_stage_poly(const std::vector<Complex>& p) {
    std::vector<Complex> c{1.0};
    c.insert(c.end(), p.begin(), p.end());
    return Poly(std::move(c));
}

double rel_diff(double x, double y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }
double rel_diff(Complex x, Complex y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); }

template <class T>
bool close(const std::vector<T>& x, const std::vector<T>& y, double tol) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(rel_diff(x[i], y[i]) <= tol)) return false;
    return true;
}

}  // namespace

EquationSpec::EquationSpec(int k, std::vector<double> a, std::vector<double> b, GExpr g)
    : k_(k), a_(std::move(a)), b_(std::move(b)), g_(std::move(g)) {
    if (k_ < 1) throw std::invalid_argument("EquationSpec: k must be >= 1");
    const auto n = static_cast<std::size_t>(k_) + 1;
    if (a_.size() != n || b_.size() != n)
        throw std::invalid_argument("EquationSpec: a and b need k+1 = " + std::to_string(n) + " entries");
    for (double v : a_)
        if (!std::isfinite(v)) throw std::invalid_argument("EquationSpec: non-finite coefficient");
    for (double v : b_)
        if (!std::isfinite(v)) throw std::invalid_argument("EquationSpec: non-finite coefficient");
    if (a_.back() == 0.0 && b_.back() == 0.0) throw std::invalid_argument("EquationSpec: a_k and b_k both zero");
}

std::pair<Poly, Poly> build_pq(const EquationSpec& eq) {
    std::vector<Complex> pc{1.0};
    for (double ai : eq.a()) pc.emplace_back(-ai);
    return {Poly(std::move(pc)), Poly::from_real(eq.b())};
}

StageCoefficients first_stage_coefficients(const EquationSpec& eq, Complex rho) {
    const auto k = static_cast<std::size_t>(eq.k());
    StageCoefficients out;
    out.p.resize(k);
    out.q.resize(k);
    Complex p_prev = 1.0;
    Complex q_prev = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        out.p[i] = rho * p_prev - eq.a()[i];
        out.q[i] = rho * q_prev + eq.b()[i];
        p_prev = out.p[i];
        q_prev = out.q[i];
    }
    return out;
}

SingleReal factor_single(const EquationSpec& eq, double rho, double tol) {
    const auto [P, Q] = build_pq(eq);
    require_common_root(P, Q, rho, tol, "factor_single");
    const StageCoefficients c = first_stage_coefficients(eq, rho);
    SingleReal out{rho, {}, {}};
    for (Complex v : c.p) out.p.push_back(v.real());
    for (Complex v : c.q) out.q.push_back(v.real());
    return out;
}

ConjugatePair factor_conjugate_pair(const EquationSpec& eq, double mu, double theta, double tol) {
    if (eq.k() < 2) throw std::invalid_argument("factor_conjugate_pair: requires k >= 2");
    if (!(mu > 0.0)) throw std::invalid_argument("factor_conjugate_pair: mu must be positive");
    theta = normalized_theta(theta);
    const auto [P, Q] = build_pq(eq);
    require_common_root(P, Q, std::polar(mu, theta), tol, "factor_conjugate_pair");
    auto [p, q] = trig_coefficients(mu, theta, eq.a(), eq.b(), static_cast<std::size_t>(eq.k() - 1));
    return ConjugatePair{mu, theta, std::move(p), std::move(q)};
}

ComplexChain factor_complex_chain(const EquationSpec& eq, Complex rho, Complex gamma, double tol) {
    if (eq.k() < 2) throw std::invalid_argument("factor_complex_chain: requires k >= 2");
    const auto [P, Q] = build_pq(eq);
    require_common_root(P, Q, rho, tol, "factor_complex_chain (rho)");
    const StageCoefficients first = first_stage_coefficients(eq, rho);
    require_common_root(first_stage_poly(first.p), Poly(first.q), gamma, tol, "factor_complex_chain (gamma)");

    ComplexChain out{rho, gamma, {}, {}};
    Complex p_prev = 1.0;
    Complex q_prev = 0.0;
    for (int j = 0; j <= eq.k() - 2; ++j) {
        p_prev = gamma * p_prev + first.p[j];
        q_prev = gamma * q_prev + first.q[j];
        out.p_prime_c.push_back(p_prev);
        out.q_prime_c.push_back(q_prev);
    }
    return out;
}

double TrailingResiduals::max() const { return std::max({a_k, a_k_minus_1, b_k, b_k_minus_1}); }

TrailingResiduals trailing_residuals(const EquationSpec& eq, const ConjugatePair& f) {
    const int k = eq.k();
    const double mu2 = f.mu * f.mu;
    const double two_mu_cos = 2.0 * f.mu * std::cos(f.theta);
    const double p_last = f.p_prime[k - 2];
    const double q_last = f.q_prime[k - 2];
    const double p_before = k >= 3 ? f.p_prime[k - 3] : 1.0;
    const double q_before = k >= 3 ? f.q_prime[k - 3] : 0.0;
    const auto a = eq.a();
    const auto b = eq.b();
    return TrailingResiduals{
        rel_diff(a[k], -p_last * mu2),
        rel_diff(a[k - 1], two_mu_cos * p_last - p_before * mu2),
        rel_diff(b[k], q_last * mu2),
        rel_diff(b[k - 1], q_before * mu2 - two_mu_cos * q_last),
    };
}

EquationSpec synth_equation(int k, double mu, double theta, std::span<const double> a_free,
                            std::span<const double> b_free, GExpr g) {
    if (k < 2) throw std::invalid_argument("synth_equation: requires k >= 2");
    if (!(mu > 0.0)) throw std::invalid_argument("synth_equation: mu must be positive");
    const auto free_count = static_cast<std::size_t>(k - 1);
    if (a_free.size() != free_count || b_free.size() != free_count)
        throw std::invalid_argument("synth_equation: a_free and b_free need k-1 entries");
    theta = normalized_theta(theta);

    const auto [p, q] = trig_coefficients(mu, theta, a_free, b_free, free_count);
    const double mu2 = mu * mu;
    const double two_mu_cos = 2.0 * mu * std::cos(theta);
    const double p_before = k >= 3 ? p[k - 3] : 1.0;
    const double q_before = k >= 3 ? q[k - 3] : 0.0;

    std::vector<double> a(a_free.begin(), a_free.end());
    std::vector<double> b(b_free.begin(), b_free.end());
    a.push_back(two_mu_cos * p[k - 2] - p_before * mu2);
    a.push_back(-p[k - 2] * mu2);
    b.push_back(q_before * mu2 - two_mu_cos * q[k - 2]);
    b.push_back(q[k - 2] * mu2);

    EquationSpec eq(k, std::move(a), std::move(b), std::move(g));
    const auto [P, Q] = build_pq(eq);
    require_common_root(P, Q, std::polar(mu, theta), kRootTol, "synth_equation");
    return eq;
}

std::vector<Factorization> analyze(const EquationSpec& eq, double tol) {
    const auto [P, Q] = build_pq(eq);
    const std::vector<Complex> shared = Q.is_zero() ? common_roots(P, P, tol) : common_roots(P, Q, tol);

    std::vector<Factorization> pairs;
    std::vector<Factorization> singles;
    std::vector<Factorization> chains;
    for (std::size_t i = 0; i < shared.size();) {
        std::size_t j = i;
        while (j < shared.size() && shared[j] == shared[i]) ++j;
        const Complex r = shared[i];
        const std::size_t multiplicity = j - i;
        const double sin_arg = std::abs(r.imag()) / std::abs(r);
        if (sin_arg > kAngleTol) {
            const bool has_mate = std::find(shared.begin(), shared.end(), std::conj(r)) != shared.end();
            if (r.imag() > 0.0 && has_mate && eq.k() >= 2)
                pairs.emplace_back(factor_conjugate_pair(eq, std::abs(r), std::arg(r), tol));
        } else {
            singles.emplace_back(factor_single(eq, r.real(), tol));
            if (multiplicity >= 2 && eq.k() >= 2)
                chains.emplace_back(factor_complex_chain(eq, r.real(), r.real(), tol));
        }
        i = j;
    }

    std::vector<Factorization> out;
    out.insert(out.end(), pairs.begin(), pairs.end());
    out.insert(out.end(), singles.begin(), singles.end());
    out.insert(out.end(), chains.begin(), chains.end());
    return out;
}

bool matches(const Factorization& f, const EquationSpec& eq, double tol) {
    const auto [P, Q] = build_pq(eq);
    try {
        if (const auto* s = std::get_if<SingleReal>(&f)) {
            if (static_cast<int>(s->p.size()) != eq.k() || static_cast<int>(s->q.size()) != eq.k()) return false;
            const SingleReal fresh = factor_single(eq, s->rho, kRootTol);
            return close(s->p, fresh.p, tol) && close(s->q, fresh.q, tol);
        }
        if (const auto* c = std::get_if<ConjugatePair>(&f)) {
            if (static_cast<int>(c->p_prime.size()) != eq.k() - 1) return false;
            const ConjugatePair fresh = factor_conjugate_pair(eq, c->mu, c->theta, kRootTol);
            return close(c->p_prime, fresh.p_prime, tol) && close(c->q_prime, fresh.q_prime, tol);
        }
        const auto& ch = std::get<ComplexChain>(f);
        if (static_cast<int>(ch.p_prime_c.size()) != eq.k() - 1) return false;
        const ComplexChain fresh = factor_complex_chain(eq, ch.rho, ch.gamma, kRootTol);
        return close(ch.p_prime_c, fresh.p_prime_c, tol) && close(ch.q_prime_c, fresh.q_prime_c, tol);
    } catch (const Error&) {
        return false;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

int factor_order(const Factorization& f) {
    if (const auto* s = std::get_if<SingleReal>(&f)) return static_cast<int>(s->p.size());
    if (const auto* c = std::get_if<ConjugatePair>(&f)) return static_cast<int>(c->p_prime.size());
    return static_cast<int>(std::get<ComplexChain>(f).p_prime_c.size());
}

}  // namespace semiconj
