#include "semiconj/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "semiconj/error.hpp"

namespace semiconj {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_init(const EquationSpec& eq, std::span<const double> init) {
    if (init.size() != static_cast<std::size_t>(eq.k()) + 1)
        throw std::invalid_argument("simulate: init needs k+1 values");
    for (double v : init)
        if (!std::isfinite(v)) throw std::invalid_argument("simulate: non-finite initial value");
}

Orbit start_orbit(const EquationSpec& eq, std::span<const double> init, std::string source) {
    Orbit orbit;
    orbit.k = eq.k();
    orbit.values.assign(init.begin(), init.end());
    orbit.source = std::move(source);
    return orbit;
}

// Records a new x value, or marks the orbit as halted. Returns false on halt.
bool push_value(Orbit& orbit, long n, double next, double cap) {
    if (!std::isfinite(next) || std::abs(next) >= cap) {
        orbit.status = OrbitStatus::Overflowed;
        orbit.halt_step = n;
        return false;
    }
    orbit.values.push_back(next);
    return true;
}

bool evaluate_g(Orbit& orbit, const GExpr& g, double arg, long n, double& out) {
    if (!std::isfinite(arg)) {
        orbit.status = OrbitStatus::Overflowed;
        orbit.halt_step = n;
        return false;
    }
    const EvalResult res = eval_g(g, arg, n);
    if (!res.ok()) {
        orbit.status = OrbitStatus::ForbiddenSet;
        orbit.halt_step = n;
        orbit.fault = res.fault->reason;
        return false;
    }
    out = res.value;
    return true;
}

double rel_imag(Complex z) { return std::abs(z.imag()) / std::max(1.0, std::abs(z)); }

std::vector<Complex> rotate_left(std::span<const Complex> v) {
    std::vector<Complex> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[(i + 1) % v.size()];
    return out;
}

Cycle make_real_cycle(const std::vector<Complex>& values, const Cycle& source) {
    double sup = 0.0;
    for (Complex v : values) sup = std::max(sup, std::abs(v));
    Cycle out;
    out.tol = source.tol;
    out.start_index = source.start_index;
    for (Complex v : values) {
        if (std::abs(v.imag()) > 1e-10 * std::max(1.0, sup))
            throw Error("lift: lifted cycle is not real (imaginary part " + std::to_string(v.imag()) + ")");
        out.values.push_back(v.real());
    }
    out.prime_period = minimal_period(out.values, 1e-9);
    out.values.resize(static_cast<std::size_t>(out.prime_period));
    return out;
}

// Lift through x_{n+1} = second x_n + t_{n+1}, t_{n+1} = first t_n + r_{n+1}.
Cycle two_stage_lift(Complex first, Complex second, const Cycle& r_cycle) {
    std::vector<Complex> r(r_cycle.values.begin(), r_cycle.values.end());
    const std::vector<Complex> t = lift_cycle(first, rotate_left(r));
    const std::vector<Complex> x = lift_cycle(second, rotate_left(t));
    return make_real_cycle(x, r_cycle);
}

}  // namespace

std::string to_string(OrbitStatus status) {
    switch (status) {
        case OrbitStatus::Completed: return "Completed";
        case OrbitStatus::ForbiddenSet: return "ForbiddenSet";
        case OrbitStatus::Overflowed: return "Overflowed";
    }
    return "?";
}

Orbit simulate_direct(const EquationSpec& eq, std::span<const double> init, long steps, const SimOptions& options) {
    if (steps < 1) throw std::invalid_argument("simulate_direct: steps must be >= 1");
    check_init(eq, init);
    const int k = eq.k();
    Orbit orbit = start_orbit(eq, init, "direct");
    orbit.values.reserve(orbit.values.size() + static_cast<std::size_t>(steps));
    const auto a = eq.a();
    const auto b = eq.b();
    for (long n = 0; n < steps; ++n) {
        const std::size_t now = orbit.values.size() - 1;  // position of x_n
        double lin = 0.0;
        double arg = 0.0;
        for (int i = 0; i <= k; ++i) {
            lin += a[i] * orbit.values[now - i];
            arg += b[i] * orbit.values[now - i];
        }
        double gv = 0.0;
        if (!evaluate_g(orbit, eq.g(), arg, n, gv)) break;
        if (!push_value(orbit, n, lin + gv, options.overflow_cap)) break;
    }
    return orbit;
}

Orbit simulate_factored(const Factorization& f, const EquationSpec& eq, std::span<const double> init, long steps,
                        const SimOptions& options) {
    if (steps < 1) throw std::invalid_argument("simulate_factored: steps must be >= 1");
    check_init(eq, init);
    if (!matches(f, eq)) throw MismatchedFactorization("simulate_factored: factorization does not belong to equation");
    const int k = eq.k();
    const double cap = options.overflow_cap;

    if (const auto* s = std::get_if<SingleReal>(&f)) {
        Orbit orbit = start_orbit(eq, init, "SingleReal");
        // t_{-i} = x_{-i} - rho x_{-i-1}; t has no value at index -k.
        orbit.factor_values.push_back(kNaN);
        for (int i = 1; i <= k; ++i) orbit.factor_values.push_back(init[i] - s->rho * init[i - 1]);
        for (long n = 0; n < steps; ++n) {
            const std::size_t now = orbit.values.size() - 1;
            double lin = 0.0;
            double arg = 0.0;
            for (int i = 0; i < k; ++i) {
                lin -= s->p[i] * orbit.factor_values[now - i];
                arg += s->q[i] * orbit.factor_values[now - i];
            }
            double gv = 0.0;
            if (!evaluate_g(orbit, eq.g(), arg, n, gv)) break;
            const double t_next = lin + gv;
            if (!push_value(orbit, n, s->rho * orbit.values[now] + t_next, cap)) break;
            orbit.factor_values.push_back(t_next);
        }
        return orbit;
    }

    if (const auto* c = std::get_if<ConjugatePair>(&f)) {
        Orbit orbit = start_orbit(eq, init, "ConjugatePair");
        const double s = 2.0 * c->mu * std::cos(c->theta);
        const double m = c->mu * c->mu;
        // r_n = x_n - 2 mu cos(theta) x_{n-1} + mu^2 x_{n-2}, defined from index -(k-2).
        orbit.factor_values = {kNaN, kNaN};
        for (int i = 2; i <= k; ++i) orbit.factor_values.push_back(init[i] - s * init[i - 1] + m * init[i - 2]);
        for (long n = 0; n < steps; ++n) {
            const std::size_t now = orbit.values.size() - 1;
            double lin = 0.0;
            double arg = 0.0;
            for (int j = 0; j <= k - 2; ++j) {
                lin -= c->p_prime[j] * orbit.factor_values[now - j];
                arg += c->q_prime[j] * orbit.factor_values[now - j];
            }
            double gv = 0.0;
            if (!evaluate_g(orbit, eq.g(), arg, n, gv)) break;
            const double r_next = lin + gv;
            if (!push_value(orbit, n, s * orbit.values[now] - m * orbit.values[now - 1] + r_next, cap)) break;
            orbit.factor_values.push_back(r_next);
        }
        return orbit;
    }

    const auto& ch = std::get<ComplexChain>(f);
    for (std::size_t j = 0; j < ch.p_prime_c.size(); ++j) {
        if (rel_imag(ch.p_prime_c[j]) > 1e-10 || rel_imag(ch.q_prime_c[j]) > 1e-10)
            throw MismatchedFactorization("simulate_factored: complex chain has non-real factor coefficients");
    }
    Orbit orbit = start_orbit(eq, init, "ComplexChain");
    std::vector<Complex> x(init.begin(), init.end());
    std::vector<Complex> t(init.size(), kNaN);
    std::vector<Complex> r(init.size(), kNaN);
    for (int i = 1; i <= k; ++i) t[i] = x[i] - ch.rho * x[i - 1];
    for (int i = 2; i <= k; ++i) r[i] = t[i] - ch.gamma * t[i - 1];
    for (std::size_t i = 0; i < r.size(); ++i) orbit.factor_values.push_back(r[i].real());
    for (long n = 0; n < steps; ++n) {
        const std::size_t now = x.size() - 1;
        Complex lin = 0.0;
        Complex arg = 0.0;
        for (int j = 0; j <= k - 2; ++j) {
            lin -= ch.p_prime_c[j].real() * r[now - j];
            arg += ch.q_prime_c[j].real() * r[now - j];
        }
        double gv = 0.0;
        if (!evaluate_g(orbit, eq.g(), arg.real(), n, gv)) break;
        const Complex r_next = Complex(lin.real() + gv, 0.0);
        const Complex t_next = ch.gamma * t[now] + r_next;
        const Complex x_next = ch.rho * x[now] + t_next;
        if (!push_value(orbit, n, x_next.real(), cap)) break;
        x.push_back(x_next);
        t.push_back(t_next);
        r.push_back(r_next);
        orbit.factor_values.push_back(r_next.real());
    }
    return orbit;
}

double max_abs_gap(const Orbit& lhs, const Orbit& rhs) {
    const std::size_t n = std::min(lhs.values.size(), rhs.values.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::abs(lhs.values[i] - rhs.values[i]));
    return gap;
}

double sup_norm(const Orbit& orbit) {
    double sup = 0.0;
    for (double v : orbit.values) sup = std::max(sup, std::abs(v));
    return sup;
}

double Cycle::at(long n) const {
    const long p = static_cast<long>(values.size());
    const long idx = ((n - start_index) % p + p) % p;
    return values[static_cast<std::size_t>(idx)];
}

std::vector<Complex> lift_cycle(Complex rho, std::span<const Complex> tau) {
    const std::size_t p = tau.size();
    if (p == 0) throw std::invalid_argument("lift_cycle: empty cycle");
    Complex rho_p = 1.0;
    for (std::size_t i = 0; i < p; ++i) rho_p *= rho;
    if (std::abs(rho_p - 1.0) <= kUnityTol)
        throw RootOfUnity("lift_cycle: rho is a " + std::to_string(p) + "-th root of unity");

    // powers[j] = rho^{p-j-1}
    std::vector<Complex> powers(p);
    Complex w = 1.0;
    for (std::size_t j = p; j-- > 0;) {
        powers[j] = w;
        w *= rho;
    }
    std::vector<Complex> xi(p);
    for (std::size_t i = 0; i < p; ++i) {
        Complex sum = 0.0;
        for (std::size_t j = 0; j < p; ++j) sum += powers[j] * tau[(i + j) % p];
        xi[i] = sum / (1.0 - rho_p);
    }
    return xi;
}

Cycle lift_cycle(double rho, const Cycle& t_cycle) {
    std::vector<Complex> t(t_cycle.values.begin(), t_cycle.values.end());
    return make_real_cycle(lift_cycle(Complex(rho, 0.0), rotate_left(t)), t_cycle);
}

Cycle lift_conjugate_pair(Complex rho, const Cycle& r_cycle) { return two_stage_lift(std::conj(rho), rho, r_cycle); }

Cycle lift_factor_cycle(const Factorization& f, const Cycle& factor_cycle) {
    if (const auto* s = std::get_if<SingleReal>(&f)) return lift_cycle(s->rho, factor_cycle);
    if (const auto* c = std::get_if<ConjugatePair>(&f)) return lift_conjugate_pair(c->rho(), factor_cycle);
    const auto& ch = std::get<ComplexChain>(f);
    return two_stage_lift(ch.gamma, ch.rho, factor_cycle);
}

int minimal_period(std::span<const double> values, double tol) {
    const std::size_t n = values.size();
    double sup = 1.0;
    for (double v : values) sup = std::max(sup, std::abs(v));
    for (std::size_t d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = std::abs(values[i] - values[(i + d) % n]) <= tol * sup;
        if (ok) return static_cast<int>(d);
    }
    return static_cast<int>(n);
}

std::optional<Cycle> detect_cycle(std::span<const double> series, long first_index, int max_period, double tol,
                                  const DetectOptions& options) {
    if (max_period < 1) throw std::invalid_argument("detect_cycle: max_period must be >= 1");
    if (series.size() < 4 * static_cast<std::size_t>(max_period))
        throw std::invalid_argument("detect_cycle: need at least 4 * max_period values");
    const auto skip = static_cast<std::size_t>(options.transient_fraction * static_cast<double>(series.size()));
    const auto tail = series.subspan(skip);
    const std::size_t len = tail.size();
    double scale = 1.0;
    for (double v : tail) {
        if (!std::isfinite(v)) return std::nullopt;
        scale = std::max(scale, std::abs(v));
    }
    for (int period = 1; period <= max_period; ++period) {
        const auto p = static_cast<std::size_t>(period);
        if (len < 2 * p) break;
        const std::size_t from = len >= 4 * p ? len - 4 * p : 0;
        bool ok = true;
        for (std::size_t i = from; i + p < len && ok; ++i) ok = std::abs(tail[i] - tail[i + p]) <= tol * scale;
        if (!ok) continue;
        Cycle cycle;
        cycle.values.assign(tail.end() - static_cast<std::ptrdiff_t>(p), tail.end());
        cycle.prime_period = period;
        cycle.tol = tol;
        cycle.start_index = first_index + static_cast<long>(skip + len - p);
        return cycle;
    }
    return std::nullopt;
}

std::optional<Cycle> detect_cycle(const Orbit& orbit, int max_period, double tol, const DetectOptions& options) {
    if (orbit.status != OrbitStatus::Completed) return std::nullopt;
    return detect_cycle(orbit.values, orbit.first_index(), max_period, tol, options);
}

double cycle_residual(const EquationSpec& eq, const Cycle& cycle) {
    const int k = eq.k();
    const long p = static_cast<long>(cycle.values.size());
    double worst = 0.0;
    for (long n = cycle.start_index; n < cycle.start_index + p; ++n) {
        double lin = 0.0;
        double arg = 0.0;
        for (int i = 0; i <= k; ++i) {
            lin += eq.a()[i] * cycle.at(n - i);
            arg += eq.b()[i] * cycle.at(n - i);
        }
        const EvalResult g = eval_g(eq.g(), arg, n);
        if (!g.ok()) return std::numeric_limits<double>::infinity();
        const double next = cycle.at(n + 1);
        worst = std::max(worst, std::abs(next - (lin + g.value)) / std::max(1.0, std::abs(next)));
    }
    return worst;
}

double cycle_distance(std::span<const double> lhs, std::span<const double> rhs) {
    if (lhs.size() != rhs.size() || lhs.empty()) return std::numeric_limits<double>::infinity();
    const std::size_t p = lhs.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < p; ++shift) {
        double d = 0.0;
        for (std::size_t i = 0; i < p; ++i) d = std::max(d, std::abs(lhs[i] - rhs[(i + shift) % p]));
        best = std::min(best, d);
    }
    return best;
}

BoundCertificate bound_certificate(double rho_modulus, double t_bound, const Orbit& orbit) {
    if (!(rho_modulus < 1.0)) throw NotContracting("bound_certificate: |rho| >= 1");
    if (!(rho_modulus > 0.0)) throw std::invalid_argument("bound_certificate: |rho| must be positive");
    if (!(t_bound >= 0.0)) throw std::invalid_argument("bound_certificate: M must be non-negative");

    BoundCertificate cert;
    cert.rho_modulus = rho_modulus;
    cert.M = t_bound;
    cert.bound = rho_modulus + t_bound / (1.0 - rho_modulus);

    const double x0 = std::abs(orbit.x(0));
    long n = 0;
    for (double decay = x0; decay > rho_modulus; decay *= rho_modulus) ++n;
    cert.N = n;

    bool any = false;
    for (long i = cert.N; i <= orbit.last_index(); ++i) {
        cert.tail_max = std::max(cert.tail_max, std::abs(orbit.x(i)));
        any = true;
    }
    cert.verified = any && cert.tail_max <= cert.bound + 1e-9;
    return cert;
}

double driving_sup(Complex rho, const Orbit& orbit) {
    double sup = 0.0;
    for (long n = 1; n <= orbit.last_index(); ++n) sup = std::max(sup, std::abs(orbit.x(n) - rho * orbit.x(n - 1)));
    return sup;
}

std::vector<Complex> solution_formula_check(Complex rho, Complex x0, std::span<const Complex> t) {
    std::vector<Complex> x;
    x.reserve(t.size() + 1);
    for (std::size_t n = 0; n <= t.size(); ++n) {
        Complex value = std::pow(rho, static_cast<int>(n)) * x0;
        for (std::size_t j = 1; j <= n; ++j) value += std::pow(rho, static_cast<int>(n - j)) * t[j - 1];
        x.push_back(value);
    }
    return x;
}

}  // namespace semiconj
