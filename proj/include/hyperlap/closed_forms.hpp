#ifndef HYPERLAP_CLOSED_FORMS_HPP
#define HYPERLAP_CLOSED_FORMS_HPP

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "exponents.hpp"
#include "radial_ode.hpp"

namespace hyperlap {

enum class BarrierKind { supersolution, subsolution, weak_envelope };

inline const char* to_string(BarrierKind k)
{
    switch (k) {
    case BarrierKind::supersolution: return "supersolution";
    case BarrierKind::subsolution: return "subsolution";
    default: return "weak_envelope";
    }
}

struct BarrierSpec {
    BarrierKind kind = BarrierKind::supersolution;
    int m = 2;
    double epsilon = 0.0;
    ProblemParams params;

    static BarrierSpec supersolution(const ProblemParams& P, int m)
    {
        if (m < 2)
            throw DomainError("supersolution needs m >= 2");
        return {BarrierKind::supersolution, m, 0.0, P};
    }

    static BarrierSpec subsolution(const ProblemParams& P) { return {BarrierKind::subsolution, 2, 0.0, P}; }

    static BarrierSpec weak_envelope(const ProblemParams& P, double eps)
    {
        if (!(eps > 0.0) || !(P.lambda + eps < P.lambda_max()))
            throw DomainError("weak envelope needs eps > 0 and lambda + eps < lambda_max");
        return {BarrierKind::weak_envelope, 2, eps, P};
    }

    // Decay exponent of the barrier: α_λ, or α_{λ+ε} for the weak envelope.
    double exponent() const
    {
        const double lam = kind == BarrierKind::weak_envelope ? params.lambda + epsilon : params.lambda;
        return decay_roots(params.n, params.p, lam).alpha;
    }

    // Eigenvalue the barrier is compared against.
    double comparison_lambda() const
    {
        return kind == BarrierKind::weak_envelope ? params.lambda + epsilon : params.lambda;
    }

    // +1 when the residual is claimed nonnegative, -1 when nonpositive.
    int claimed_sign() const { return kind == BarrierKind::subsolution ? -1 : 1; }
};

struct BarrierValues {
    double v = 0.0;
    double dv = 0.0;
    double d2v = 0.0;
};

inline double c_lambda(const ProblemParams& P, int m)
{
    if (m < 2)
        throw DomainError("c_lambda needs m >= 2");
    const double a = decay_roots(P).alpha;
    const double ap = std::pow(a, P.p - 1.0);
    return (ap * (P.n - 1) - P.p * P.lambda) + 2.0 * ap * (P.p - 1.0) / m;
}

inline BarrierValues barrier_value_and_derivatives(const BarrierSpec& s, double t)
{
    const double a = s.exponent();
    BarrierValues b;
    if (s.kind == BarrierKind::subsolution) {
        if (!(t > 0.0))
            throw DomainError("subsolution needs t > 0");
        const double C = 1.0 / std::tanh(0.5 * t);
        const double csch = 1.0 / std::sinh(0.5 * t);
        b.v = std::pow(std::sinh(0.5 * t), -2.0 * a);
        b.dv = -a * C * b.v;
        b.d2v = (0.5 * a * csch * csch + a * a * C * C) * b.v;
        return b;
    }
    const double m = s.m;
    const double T = std::tanh(t / m);
    const double sech = 1.0 / std::cosh(t / m);
    b.v = std::pow(std::cosh(t / m), -m * a);
    b.dv = -a * T * b.v;
    b.d2v = (-(a / m) * sech * sech + a * a * T * T) * b.v;
    return b;
}

// Δ_p v = |v'|^{p-2}[(p-1)v'' + (n-1)coth(t) v'].
inline double radial_p_laplacian(double t, double dv, double d2v, int n, double p)
{
    if (dv == 0.0)
        return 0.0;
    return std::pow(std::abs(dv), p - 2.0) * ((p - 1.0) * d2v + (n - 1) * dv / std::tanh(t));
}

namespace detail {

inline double log_tanh(double x)
{
    const double e = std::exp(-2.0 * x);
    return std::log1p(-e) - std::log1p(e);
}

} // namespace detail

// [-Δ_p v - λ' v^{p-1}] / v^{p-1}, with λ' = f(exponent), arranged without cancellation.
inline double barrier_operator_excess(const BarrierSpec& s, double t)
{
    if (!(t > 0.0))
        throw DomainError("barrier residual needs t > 0");
    const double a = s.exponent();
    const double n = s.params.n, p = s.params.p;
    const double ap = std::pow(a, p - 1.0);
    const double lt = detail::log_tanh(t);
    if (s.kind == BarrierKind::subsolution) {
        const double lC = -detail::log_tanh(0.5 * t);
        const double C = std::exp(lC);
        const double A = std::expm1((p - 1.0) * lC - lt);
        const double B = std::expm1(p * lC);
        const double csch = 1.0 / std::sinh(0.5 * t);
        return ap * ((n - 1) * A - (p - 1.0) * a * B) - (p - 1.0) * 0.5 * a * std::pow(a * C, p - 2.0) * csch * csch;
    }
    const double m = s.m;
    const double lT = detail::log_tanh(t / m);
    const double T = std::exp(lT);
    const double A = std::expm1((p - 1.0) * lT - lt);
    const double B = std::expm1(p * lT);
    const double sech = 1.0 / std::cosh(t / m);
    return ap * ((n - 1) * A - (p - 1.0) * a * B) + (p - 1.0) * (a / m) * std::pow(a * T, p - 2.0) * sech * sech;
}

// Residual divided by v^{p-1}; its sign is the sign of the residual.
inline double normalized_barrier_residual(const BarrierSpec& s, double t)
{
    double r = barrier_operator_excess(s, t);
    if (s.kind == BarrierKind::supersolution)
        r -= c_lambda(s.params, s.m) * std::exp(-2.0 * t / s.m);
    return r;
}

inline double barrier_residual(const BarrierSpec& s, double t)
{
    const double v = barrier_value_and_derivatives(s, t).v;
    return normalized_barrier_residual(s, t) * std::pow(v, s.params.p - 1.0);
}

// -Δ_p v - λv^{p-1} - c_λ e^{-2t/m} v^{p-1}
inline double supersolution_residual(const BarrierSpec& s, double t)
{
    if (s.kind != BarrierKind::supersolution)
        throw DomainError("supersolution_residual needs a supersolution spec");
    return barrier_residual(s, t);
}

// -Δ_p v - λv^{p-1}
inline double subsolution_residual(const BarrierSpec& s, double t)
{
    if (s.kind != BarrierKind::subsolution)
        throw DomainError("subsolution_residual needs a subsolution spec");
    return barrier_residual(s, t);
}

// -Δ_p v - (λ+ε)v^{p-1}
inline double weak_envelope_residual(const BarrierSpec& s, double t)
{
    if (s.kind != BarrierKind::weak_envelope)
        throw DomainError("weak_envelope_residual needs a weak-envelope spec");
    return barrier_residual(s, t);
}

// Same residual assembled directly from (v, v', v'') and the radial operator.
inline double barrier_residual_direct(const BarrierSpec& s, double t)
{
    const BarrierValues b = barrier_value_and_derivatives(s, t);
    const double vp = std::pow(b.v, s.params.p - 1.0);
    double r = -radial_p_laplacian(t, b.dv, b.d2v, s.params.n, s.params.p) - s.comparison_lambda() * vp;
    if (s.kind == BarrierKind::supersolution)
        r -= c_lambda(s.params, s.m) * std::exp(-2.0 * t / s.m) * vp;
    return r;
}

inline bool claimed_sign_ok(const BarrierSpec& s, double t)
{
    const double r = normalized_barrier_residual(s, t);
    return s.claimed_sign() > 0 ? r >= 0.0 : r <= 0.0;
}

inline std::vector<double> geometric_grid(double lo, double hi, double per_decade)
{
    std::vector<double> g;
    const double step = std::pow(10.0, 1.0 / per_decade);
    const std::size_t count = static_cast<std::size_t>(std::llround(std::log10(hi / lo) * per_decade));
    for (std::size_t j = 0; j <= count; ++j)
        g.push_back(j == count ? hi : lo * std::pow(step, static_cast<double>(j)));
    return g;
}

struct ValidityReport {
    bool found = false;
    double R = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
    double last_violation = 0.0;
    std::size_t violations = 0;
    std::vector<double> grid;
    // Re-check beyond R + one grid step on a 10x finer grid.
    bool refined_ok = false;
    std::size_t refined_points = 0;
};

inline ValidityReport find_validity_radius(const BarrierSpec& s, double lo = 1e-2, double hi = 100.0,
                                           double per_decade = 400.0)
{
    ValidityReport r;
    r.grid = geometric_grid(lo, hi, per_decade);
    std::size_t first_ok = r.grid.size();
    for (std::size_t j = r.grid.size(); j-- > 0;) {
        if (!claimed_sign_ok(s, r.grid[j])) {
            ++r.violations;
            if (r.last_violation == 0.0)
                r.last_violation = r.grid[j];
            continue;
        }
        if (r.last_violation == 0.0)
            first_ok = j;
    }
    if (first_ok == r.grid.size())
        return r;
    r.found = true;
    r.index = first_ok;
    r.R = r.grid[first_ok];
    const double from = first_ok + 1 < r.grid.size() ? r.grid[first_ok + 1] : hi;
    std::vector<double> fine = geometric_grid(from, hi, per_decade * 10.0);
    r.refined_ok = true;
    for (double t : fine)
        if (!claimed_sign_ok(s, t))
            r.refined_ok = false;
    r.refined_points = fine.size();
    return r;
}

// Barrier sampled as a radial profile (u, u', flux) on t > 0.
inline RadialProfile barrier_profile(const BarrierSpec& s, std::span<const double> grid)
{
    RadialProfile pr;
    pr.params = s.params;
    for (double t : grid) {
        const BarrierValues b = barrier_value_and_derivatives(s, t);
        pr.push(t, b.v, b.dv, flux_from_derivative(t, b.dv, s.params.n, s.params.p));
    }
    return pr;
}

} // namespace hyperlap

#endif
