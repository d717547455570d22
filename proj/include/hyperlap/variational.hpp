#ifndef HYPERLAP_VARIATIONAL_HPP
#define HYPERLAP_VARIATIONAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "exponents.hpp"
#include "numerics.hpp"
#include "radial_ode.hpp"

namespace hyperlap {

class VariationalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ω_{n-1} ∫ |f|^power sinh^{n-1} t dt (composite Simpson).
inline double weighted_integral(std::span<const double> f, double power, std::span<const double> t, int n)
{
    require_aligned(f, t);
    std::vector<double> g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        g[i] = (f[i] == 0.0 ? 0.0 : std::pow(std::abs(f[i]), power)) * std::pow(std::sinh(t[i]), n - 1);
    return sphere_area(n) * simpson(t, g);
}

struct DiscreteRadialFunction {
    std::vector<double> t;
    std::vector<double> u;
    ProblemParams params;

    static DiscreteRadialFunction make(std::vector<double> t, std::vector<double> u, const ProblemParams& P)
    {
        require_aligned(t, u);
        if (t.size() < 5)
            throw GridError("radial function needs at least 5 nodes");
        require_increasing(t);
        if (t.front() != 0.0)
            throw GridError("radial grid must start at 0");
        for (double v : u)
            if (!(v >= 0.0))
                throw DomainError("radial trial function must be nonnegative");
        if (u.back() != 0.0)
            throw DomainError("radial trial function must vanish at the truncation radius");
        return DiscreteRadialFunction{std::move(t), std::move(u), P};
    }

    double T() const { return t.back(); }
};

inline std::vector<double> uniform_grid(double T, std::size_t points)
{
    if (points < 2 || !(T > 0.0))
        throw GridError("uniform grid needs T > 0 and >= 2 points");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = T * static_cast<double>(i) / static_cast<double>(points - 1);
    g.back() = T;
    return g;
}

// C^1 factor equal to 1 below T - width and 0 at T.
inline double dirichlet_cutoff(double t, double T, double width)
{
    if (t <= T - width)
        return 1.0;
    if (t >= T)
        return 0.0;
    double s = (T - t) / width;
    return s * s * (3.0 - 2.0 * s);
}

// Monotone-cubic resampling of a profile onto a uniform [0, T] grid, then cut off to vanish at T.
inline DiscreteRadialFunction resample_profile(const RadialProfile& prof, double T, std::size_t points,
                                               double cutoff_width = 1.0)
{
    if (T > prof.t.back())
        throw GridError("resampling radius beyond the profile");
    std::vector<double> x(prof.t), y(prof.u);
    for (double& v : y)
        v = std::max(v, 0.0);
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(x), std::move(y));
    std::vector<double> g = uniform_grid(T, points);
    std::vector<double> v(points);
    for (std::size_t i = 0; i < points; ++i)
        v[i] = std::max(0.0, spline(g[i])) * dirichlet_cutoff(g[i], T, cutoff_width);
    v.back() = 0.0;
    return DiscreteRadialFunction::make(std::move(g), std::move(v), prof.params);
}

struct QuotientValue {
    double numerator = 0.0;
    double denominator = 0.0;
    double value = 0.0;
};

inline QuotientValue rayleigh_quotient(const DiscreteRadialFunction& f)
{
    const auto& P = f.params;
    std::vector<double> du = derivative3(f.t, f.u);
    std::vector<double> a(f.t.size()), b(f.t.size());
    for (std::size_t i = 0; i < f.t.size(); ++i) {
        const double S = std::pow(std::sinh(f.t[i]), P.n - 1);
        a[i] = (std::pow(std::abs(du[i]), P.p) - P.lambda * std::pow(f.u[i], P.p)) * S;
        b[i] = std::pow(f.u[i], P.q) * S;
    }
    const double w = sphere_area(P.n);
    QuotientValue q;
    q.numerator = w * simpson(f.t, a);
    const double D = w * simpson(f.t, b);
    if (!(D > 0.0))
        throw VariationalError("zero denominator: trial function vanishes");
    q.denominator = std::pow(D, P.p / P.q);
    q.value = q.numerator / q.denominator;
    return q;
}

struct MinimizeOptions {
    double T = 40.0;
    std::size_t points = 2000;
    std::size_t max_iter = 20000;
    double grad_tol = 1e-7;
    std::optional<std::vector<double>> initial;
};

struct MinimizeResult {
    double S_estimate = 0.0;
    QuotientValue simpson_quotient;
    DiscreteRadialFunction minimizer;
    std::size_t iterations = 0;
    bool converged = false;
    bool stalled = false;
    double first_order_residual = 0.0;
};

namespace detail {

// Discrete energy on a uniform grid with Dirichlet end: midpoint gradient term,
// trapezoid potential terms, the last node pinned to 0.
struct DiscreteEnergy {
    const ProblemParams& P;
    std::vector<double> t;
    double h;
    std::vector<double> w_edge;
    std::vector<double> m_node;

    DiscreteEnergy(const ProblemParams& P_, std::vector<double> grid) : P(P_), t(std::move(grid))
    {
        const std::size_t N = t.size();
        h = t[1] - t[0];
        const double om = sphere_area(P.n);
        w_edge.resize(N - 1);
        for (std::size_t e = 0; e + 1 < N; ++e)
            w_edge[e] = om * std::pow(std::sinh(t[e] + 0.5 * h), P.n - 1) * h;
        m_node.resize(N);
        for (std::size_t i = 0; i < N; ++i)
            m_node[i] = om * std::pow(std::sinh(t[i]), P.n - 1) * h * ((i == 0 || i + 1 == N) ? 0.5 : 1.0);
    }

    double numerator(const std::vector<double>& u) const
    {
        double A = 0.0, B = 0.0;
        for (std::size_t e = 0; e + 1 < u.size(); ++e)
            A += w_edge[e] * std::pow(std::abs((u[e + 1] - u[e]) / h), P.p);
        for (std::size_t i = 0; i < u.size(); ++i)
            B += m_node[i] * std::pow(u[i], P.p);
        return A - P.lambda * B;
    }

    double mass(const std::vector<double>& u) const
    {
        double D = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            D += m_node[i] * std::pow(u[i], P.q);
        return D;
    }

    double quotient(const std::vector<double>& u) const
    {
        return numerator(u) / std::pow(mass(u), P.p / P.q);
    }

    void normalize(std::vector<double>& u) const
    {
        const double s = std::pow(mass(u), -1.0 / P.q);
        for (double& v : u)
            v *= s;
    }

    // Gradient of the quotient at a D = 1 normalized point; the pinned node gets 0.
    std::vector<double> gradient(const std::vector<double>& u) const
    {
        const std::size_t N = u.size();
        const double Nv = numerator(u);
        std::vector<double> g(N, 0.0);
        for (std::size_t e = 0; e + 1 < N; ++e) {
            const double d = (u[e + 1] - u[e]) / h;
            const double c = P.p * w_edge[e] * std::pow(std::abs(d), P.p - 2.0) * d / h;
            if (d != 0.0) {
                g[e] -= c;
                g[e + 1] += c;
            }
        }
        for (std::size_t i = 0; i < N; ++i) {
            const double ui = u[i];
            if (ui > 0.0) {
                g[i] -= P.lambda * P.p * m_node[i] * std::pow(ui, P.p - 1.0);
                g[i] -= (P.p / P.q) * Nv * P.q * m_node[i] * std::pow(ui, P.q - 1.0);
            }
        }
        g[N - 1] = 0.0;
        return g;
    }

    // Tridiagonal SPD preconditioner on the free nodes: the Hessian of the numerator for
    // p = 2, otherwise the frozen-coefficient stiffness plus a small mass shift.
    void preconditioner(const std::vector<double>& u, std::vector<double>& diag, std::vector<double>& off) const
    {
        const std::size_t M = u.size() - 1;
        diag.assign(M, 0.0);
        off.assign(M > 0 ? M - 1 : 0, 0.0);
        double maxd = 0.0;
        for (std::size_t e = 0; e + 1 < u.size(); ++e)
            maxd = std::max(maxd, std::abs(u[e + 1] - u[e]) / h);
        const double floor_d = 1e-3 * std::max(maxd, 1e-300);
        const bool quad = P.p == 2.0;
        for (std::size_t e = 0; e + 1 < u.size(); ++e) {
            double k;
            if (quad) {
                k = 2.0 * w_edge[e] / (h * h);
            } else {
                const double d = std::max(std::abs(u[e + 1] - u[e]) / h, floor_d);
                k = P.p * (P.p - 1.0) * w_edge[e] * std::pow(d, P.p - 2.0) / (h * h);
            }
            diag[e] += k;
            if (e + 1 < M) {
                diag[e + 1] += k;
                off[e] -= k;
            }
        }
        for (std::size_t i = 0; i < M; ++i) {
            if (quad)
                diag[i] -= 2.0 * P.lambda * m_node[i];
            else
                diag[i] += 1e-2 * m_node[i];
        }
    }
};

// Thomas algorithm for a symmetric tridiagonal system.
inline std::vector<double> solve_tridiagonal(std::vector<double> diag, const std::vector<double>& off,
                                             std::vector<double> rhs)
{
    const std::size_t M = diag.size();
    for (std::size_t i = 1; i < M; ++i) {
        const double w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(M);
    x[M - 1] = rhs[M - 1] / diag[M - 1];
    for (std::size_t i = M - 1; i-- > 0;)
        x[i] = (rhs[i] - off[i] * x[i + 1]) / diag[i];
    return x;
}

} // namespace detail

inline MinimizeResult minimize_quotient(const ProblemParams& P, const MinimizeOptions& opt)
{
    P.validate();
    if (P.is_critical())
        throw VariationalError(
            "minimize_quotient refuses q = p*: minimizing sequences can concentrate at a point "
            "(loss of compactness), so the truncated minimum is not meaningful");
    std::vector<double> grid = uniform_grid(opt.T, opt.points);
    detail::DiscreteEnergy E(P, grid);
    const std::size_t N = grid.size();

    std::vector<double> u(N);
    if (opt.initial) {
        if (opt.initial->size() != N)
            throw GridError("initial guess does not match the grid");
        u = *opt.initial;
        for (double& v : u)
            v = std::max(v, 0.0);
    } else {
        const double a = decay_roots(P).alpha;
        const double tail = std::pow(std::cosh(0.5 * opt.T), -2.0 * a);
        for (std::size_t i = 0; i < N; ++i)
            u[i] = std::max(0.0, std::pow(std::cosh(0.5 * grid[i]), -2.0 * a) - tail);
    }
    u[N - 1] = 0.0;
    if (!(E.mass(u) > 0.0))
        throw VariationalError("initial guess is identically zero");
    E.normalize(u);

    MinimizeResult res;
    double Q = E.quotient(u);
    double tau = 1.0;
    std::vector<double> diag, off;
    std::size_t it = 0;
    for (; it < opt.max_iter; ++it) {
        std::vector<double> g = E.gradient(u);
        E.preconditioner(u, diag, off);
        std::vector<double> gf(g.begin(), g.end() - 1);
        std::vector<double> s = detail::solve_tridiagonal(diag, off, gf);
        double gs = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            gs += gf[i] * s[i];
        res.first_order_residual = std::sqrt(std::max(gs, 0.0) / std::abs(Q));
        if (res.first_order_residual <= opt.grad_tol) {
            res.converged = true;
            break;
        }
        tau = std::min(1.0, 2.0 * tau);
        bool accepted = false;
        for (int k = 0; k < 60; ++k, tau *= 0.5) {
            std::vector<double> v(u);
            for (std::size_t i = 0; i + 1 < N; ++i)
                v[i] = std::max(0.0, u[i] - tau * s[i]);
            v[N - 1] = 0.0;
            if (!(E.mass(v) > 0.0))
                continue;
            E.normalize(v);
            const double Qv = E.quotient(v);
            if (Qv < Q) {
                u.swap(v);
                Q = Qv;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }
    }
    res.iterations = it;
    res.S_estimate = Q;
    res.minimizer = DiscreteRadialFunction::make(grid, u, P);
    res.simpson_quotient = rayleigh_quotient(res.minimizer);
    return res;
}

struct PointwiseBoundReport {
    double R = 0.0;
    double C_R = 0.0;
    double max_C = 0.0;
    double argmax_t = 0.0;
    double margin = 0.0;
    bool holds = false;
    double tail_norm = 0.0;
    // Log-slope of |u'|^p sinh^{n-1} over [R, (R+T)/2]; positive means the energy tail grows.
    double tail_growth_slope = 0.0;
    bool finite_energy = true;
};

// ω^{-1/p} (e^{kR} ∫_R^∞ sinh^{-k} s ds)^{(p-1)/p}, k = (n-1)/(p-1): the Hölder constant,
// attained as a supremum over t >= R at t = R.
inline double pointwise_bound_constant(int n, double p, double R)
{
    if (!(R > 0.0))
        throw DomainError("pointwise bound needs R > 0");
    const double k = (n - 1) / (p - 1.0);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto g = [&](double r) { return std::exp(-k * r) * std::pow(-std::expm1(-2.0 * (R + r)), -k); };
    const double I = std::pow(2.0, k) * integrator.integrate(g);
    return std::pow(sphere_area(n), -1.0 / p) * std::pow(I, (p - 1.0) / p);
}

inline PointwiseBoundReport radial_pointwise_bound_check(const DiscreteRadialFunction& f, double R)
{
    const auto& P = f.params;
    if (!(R > f.t.front()) || !(R < f.T()))
        throw GridError("R must lie inside the grid");
    std::size_t k = 0;
    while (f.t[k] < R)
        ++k;
    std::vector<double> du = derivative3(f.t, f.u);
    std::span<const double> tt(f.t.data() + k, f.t.size() - k);
    std::vector<double> g(tt.size());
    for (std::size_t i = 0; i < tt.size(); ++i)
        g[i] = std::pow(std::abs(du[k + i]), P.p) * std::pow(std::sinh(tt[i]), P.n - 1);
    PointwiseBoundReport r;
    r.R = f.t[k];
    const double E = sphere_area(P.n) * simpson(tt, g);
    if (!(E > 0.0))
        throw VariationalError("gradient tail vanishes beyond R");
    r.tail_norm = std::pow(E, 1.0 / P.p);
    r.C_R = pointwise_bound_constant(P.n, P.p, r.R);
    for (std::size_t i = k; i < f.t.size(); ++i) {
        const double c = f.u[i] * std::exp((P.n - 1) * f.t[i] / P.p) / r.tail_norm;
        if (c > r.max_C) {
            r.max_C = c;
            r.argmax_t = f.t[i];
        }
    }
    r.margin = r.max_C > 0.0 ? r.C_R / r.max_C : std::numeric_limits<double>::infinity();
    r.holds = r.max_C <= r.C_R;
    std::vector<double> xs, ys;
    const double t_hi = 0.5 * (r.R + f.T());
    for (std::size_t i = 0; i < tt.size() && tt[i] <= t_hi; ++i)
        if (g[i] > 0.0) {
            xs.push_back(tt[i]);
            ys.push_back(std::log(g[i]));
        }
    if (xs.size() >= 2)
        r.tail_growth_slope = fit_line(xs, ys).slope;
    r.finite_energy = r.tail_growth_slope < 0.0;
    return r;
}

// Cubic B-spline bump centered at c with knot spacing w, support [c - 2w, c + 2w].
struct SplineBump {
    double center = 5.0;
    double width = 1.0;
    double amplitude = 1.0;

    double lo() const { return center - 2.0 * width; }
    double hi() const { return center + 2.0 * width; }

    double value(double t) const
    {
        const double s = std::abs((t - center) / width);
        if (s >= 2.0)
            return 0.0;
        if (s >= 1.0)
            return amplitude * (2.0 - s) * (2.0 - s) * (2.0 - s) / 6.0;
        return amplitude * (4.0 - 6.0 * s * s + 3.0 * s * s * s) / 6.0;
    }

    double derivative(double t) const
    {
        const double x = (t - center) / width;
        const double s = std::abs(x);
        const double sg = x < 0.0 ? -1.0 : 1.0;
        double d;
        if (s >= 2.0)
            d = 0.0;
        else if (s >= 1.0)
            d = -0.5 * (2.0 - s) * (2.0 - s);
        else
            d = -2.0 * s + 1.5 * s * s;
        return amplitude * sg * d / width;
    }
};

struct HardyReport {
    double constant = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    // Largest C with C·∫e^{-pα t}v² <= ∫e^{-pα t}v'² for this v.
    double empirical_constant = 0.0;
};

// ((α-1)/2)² (n-1)² / K with α = pα_λ/(n-1) and K = (1 - e^{-r0})^{-2pα_λ}.
inline double hardy_constant(const ProblemParams& P, double r0 = 1.0)
{
    const double al = decay_roots(P).alpha;
    const double a = P.p * al / (P.n - 1);
    const double K = std::pow(-std::expm1(-r0), -2.0 * P.p * al);
    const double c = 0.5 * std::abs(a - 1.0) * (P.n - 1);
    return c * c / K;
}

inline HardyReport hardy_check(const SplineBump& v, const ProblemParams& P, double r0 = 1.0, double delta = 1e-9)
{
    if (v.lo() < r0 + delta)
        throw DomainError("bump support must lie in [r0 + delta, infinity)");
    if (!(v.width > 0.0))
        throw DomainError("bump width must be positive");
    const double a = P.p * decay_roots(P).alpha;
    const double om = sphere_area(P.n);
    double I0 = 0.0, I1 = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double x0 = v.lo() + j * v.width;
        const double x1 = x0 + v.width;
        auto wt = [&](double t) { return std::exp(-a * t) * std::pow(std::sinh(t), P.n - 1); };
        I0 += boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double t) { double y = v.value(t); return wt(t) * y * y; }, x0, x1);
        I1 += boost::math::quadrature::gauss<double, 30>::integrate(
            [&](double t) { double y = v.derivative(t); return wt(t) * y * y; }, x0, x1);
    }
    HardyReport r;
    r.constant = hardy_constant(P, r0);
    r.lhs = r.constant * om * I0;
    r.rhs = om * I1;
    r.holds = r.lhs <= r.rhs;
    r.empirical_constant = I1 / I0;
    return r;
}

} // namespace hyperlap

#endif
