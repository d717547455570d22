#ifndef HYPERLAP_RADIAL_ODE_HPP
#define HYPERLAP_RADIAL_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exponents.hpp"
#include "numerics.hpp"
#include "residual.hpp"
#include "rk45.hpp"

namespace hyperlap {

struct RadialProfile {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> du;
    std::vector<double> flux;
    ProblemParams params;

    std::size_t size() const { return t.size(); }

    void push(double ti, double ui, double dui, double fi)
    {
        t.push_back(ti);
        u.push_back(ui);
        du.push_back(dui);
        flux.push_back(fi);
    }

    // Throws on the first broken invariant.
    void validate(double rel = 1e-10) const
    {
        const std::size_t N = t.size();
        if (N < 2 || u.size() != N || du.size() != N || flux.size() != N)
            throw GridError("profile arrays must share a length >= 2");
        require_increasing(t);
        if (t.front() < 0.0)
            throw GridError("profile grid must start at t >= 0");
        for (std::size_t i = 0; i < N; ++i) {
            if (du[i] != 0.0 && flux[i] != 0.0 && (du[i] > 0.0) != (flux[i] > 0.0))
                throw GridError("flux and derivative disagree in sign at t=" + std::to_string(t[i]));
            if (t[i] > 0.0 && std::isfinite(flux[i]) && std::abs(flux[i]) < std::numeric_limits<double>::max()) {
                double S = std::pow(std::sinh(t[i]), params.n - 1);
                double rec = std::copysign(std::pow(std::abs(flux[i]) / S, 1.0 / (params.p - 1.0)), flux[i]);
                if (std::abs(rec - du[i]) > rel * std::max(std::abs(du[i]), 1e-300) + 1e-300)
                    throw GridError("derivative not recoverable from flux at t=" + std::to_string(t[i]));
            }
        }
    }
};

// S |u'|^{p-2} u' with S = sinh^{n-1} t.
inline double flux_from_derivative(double t, double du, int n, double p)
{
    if (du == 0.0)
        return 0.0;
    return std::pow(std::sinh(t), n - 1) * std::pow(std::abs(du), p - 2.0) * du;
}

inline double derivative_from_flux(double t, double F, int n, double p)
{
    if (F == 0.0)
        return 0.0;
    return std::copysign(std::pow(std::abs(F) / std::pow(std::sinh(t), n - 1), 1.0 / (p - 1.0)), F);
}

struct OdeConfig {
    double t_start = 1e-3;
    double t_max = 40.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    std::size_t max_steps = 2000000;
    double h_out = 2e-3;
    double geo_ratio = 2e-3;
    double t_log = 30.0;
    double turn_eps = 1e-14;
    // Series correction allowed at the handoff, relative to alpha.
    double series_rel = 1e-6;

    void validate() const
    {
        if (!(t_start > 0.0) || !(t_start < t_max))
            throw DomainError("need 0 < t_start < t_max");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(h_out > 0.0) || !(geo_ratio > 0.0))
            throw DomainError("tolerances and output spacings must be positive");
        if (max_steps == 0)
            throw DomainError("max_steps must be positive");
    }
};

inline bool near_critical(const ProblemParams& P)
{
    return P.is_critical() || P.lambda >= 0.5 * P.lambda_max();
}

inline OdeConfig default_ode_config(const ProblemParams& P)
{
    OdeConfig c;
    c.t_max = near_critical(P) ? 60.0 : 40.0;
    return c;
}

enum class OdeEvent { cross, turn, reached_end, step_underflow, nonfinite, max_steps };

inline const char* to_string(OdeEvent e)
{
    switch (e) {
    case OdeEvent::cross: return "CROSS";
    case OdeEvent::turn: return "TURN";
    case OdeEvent::reached_end: return "REACHED_END";
    case OdeEvent::step_underflow: return "STEP_UNDERFLOW";
    case OdeEvent::nonfinite: return "NONFINITE";
    default: return "MAX_STEPS";
    }
}

struct IntegrationResult {
    RadialProfile profile;
    OdeEvent event = OdeEvent::reached_end;
    std::optional<double> event_time;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double t_handoff = 0.0;
};

struct SeriesStart {
    double u = 0.0;
    double du = 0.0;
    double flux = 0.0;
};

inline double series_source(double alpha, const ProblemParams& P)
{
    return P.lambda * std::pow(alpha, P.p - 1.0) + std::pow(alpha, P.q - 1.0);
}

inline SeriesStart series_start(double alpha, const ProblemParams& P, double t)
{
    if (!(alpha > 0.0))
        throw DomainError("series_start needs alpha > 0");
    const double K = series_source(alpha, P);
    const double g = std::pow(K / P.n, 1.0 / (P.p - 1.0));
    SeriesStart s;
    s.flux = -K * std::pow(t, P.n) / P.n;
    s.du = -g * std::pow(t, 1.0 / (P.p - 1.0));
    s.u = alpha - (P.p - 1.0) / P.p * g * std::pow(t, P.p / (P.p - 1.0));
    return s;
}

// Largest t <= t_start at which the series correction stays below series_rel·alpha.
inline double handoff_radius(double alpha, const ProblemParams& P, const OdeConfig& cfg)
{
    const double K = series_source(alpha, P);
    const double c = (P.p - 1.0) / P.p * std::pow(K / P.n, 1.0 / (P.p - 1.0));
    const double th = std::pow(cfg.series_rel * alpha / c, (P.p - 1.0) / P.p);
    return std::min(cfg.t_start, th);
}

// Output radii in the open interval (lo, hi), increasing. Geometric below
// h_out/geo_ratio and uniform above it; independent of the handoff point.
inline std::vector<double> sample_grid(double lo, double hi, const OdeConfig& cfg)
{
    std::vector<double> g;
    const double knee = cfg.h_out / cfg.geo_ratio;
    if (lo < knee) {
        std::vector<double> below;
        const double floor = std::max(lo, knee * 1e-8);
        for (double s = knee / (1.0 + cfg.geo_ratio); s > floor; s /= (1.0 + cfg.geo_ratio))
            if (s < hi)
                below.push_back(s);
        g.assign(below.rbegin(), below.rend());
    }
    const double k0 = std::max(0.0, std::floor((lo - knee) / cfg.h_out));
    for (double k = k0;; k += 1.0) {
        double s = knee + k * cfg.h_out;
        if (s >= hi)
            break;
        if (s > lo)
            g.push_back(s);
    }
    return g;
}

namespace detail {

struct RadialRhs {
    const ProblemParams* P;
    const bool* log_mode;

    double source(double u) const
    {
        auto spow = [](double x, double e) { return std::copysign(std::pow(std::abs(x), e), x); };
        return P->lambda * spow(u, P->p - 1.0) + spow(u, P->q - 1.0);
    }

    State<2> operator()(double t, const State<2>& y) const
    {
        const double r = source(y[0]);
        if (*log_mode) {
            const double G = y[1];
            return {-std::exp(G / (P->p - 1.0)), r * std::exp(-G) - (P->n - 1) / std::tanh(t)};
        }
        const double S = std::pow(std::sinh(t), P->n - 1);
        const double F = y[1];
        const double du = F == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(F) / S, 1.0 / (P->p - 1.0)), F);
        return {du, -S * r};
    }
};

struct Sample {
    double u, du, flux;
};

inline double log_sinh(double t)
{
    return t > 20.0 ? t - std::log(2.0) + std::log1p(-std::exp(-2.0 * t)) : std::log(std::sinh(t));
}

inline Sample to_sample(double t, const State<2>& y, bool log_mode, const ProblemParams& P)
{
    if (!log_mode)
        return {y[0], derivative_from_flux(t, y[1], P.n, P.p), y[1]};
    const double G = y[1];
    const double du = -std::exp(G / (P.p - 1.0));
    const double lf = G + (P.n - 1) * log_sinh(t);
    const double F = lf > 709.0 ? -std::numeric_limits<double>::max() : -std::exp(lf);
    return {y[0], du, F};
}

inline State<2> to_log(double t, const State<2>& y, const ProblemParams& P)
{
    return {y[0], std::log(-y[1]) - (P.n - 1) * log_sinh(t)};
}

inline State<2> to_linear(double t, const State<2>& y, const ProblemParams& P)
{
    return {y[0], -std::exp(y[1] + (P.n - 1) * log_sinh(t))};
}

struct Walk {
    bool detect_events = true;
};

// Integrates the (u, F) system from t0 to t1 (either direction), emitting samples.
inline IntegrationResult walk(const ProblemParams& P, const OdeConfig& cfg, double t0, State<2> y0, double t1,
                              bool start_in_log, const Walk& opts)
{
    IntegrationResult res;
    res.profile.params = P;
    bool log_mode = start_in_log;
    RadialRhs rhs{&P, &log_mode};
    const bool forward = t1 > t0;
    const double dir = forward ? 1.0 : -1.0;

    std::vector<double> grid = forward ? sample_grid(t0, t1, cfg) : sample_grid(t1, t0, cfg);
    if (!forward)
        std::reverse(grid.begin(), grid.end());
    std::size_t gi = 0;

    StepControl ctl;
    ctl.rel_tol = cfg.rel_tol;
    ctl.abs_tol = cfg.abs_tol;
    ctl.h_max = std::max(cfg.h_out * 50.0, 0.05);
    ctl.max_steps = cfg.max_steps;
    double h0 = std::min(0.1 * std::abs(t0), 1e-2);
    if (h0 <= 0.0)
        h0 = 1e-6;
    DormandPrince<2, RadialRhs> dp(rhs, t0, y0, h0);

    auto emit = [&](double t, const State<2>& y, bool lm) {
        Sample s = to_sample(t, y, lm, P);
        res.profile.push(t, s.u, s.du, s.flux);
    };
    emit(t0, y0, log_mode);

    const double kappa = 2.0 * (P.n - 1) / (P.p - 1.0) + 1.0;
    State<2> ref{std::abs(y0[0]), log_mode ? 1.0 : std::abs(y0[1])};
    if (ref[0] == 0.0)
        ref[0] = 1.0;
    if (ref[1] == 0.0)
        ref[1] = 1.0;

    bool switch_blocked = false;
    auto switch_point = [&]() -> double {
        if (switch_blocked)
            return t1;
        if (forward && !log_mode && t0 < cfg.t_log && cfg.t_log < t1)
            return cfg.t_log;
        if (!forward && log_mode && t1 < cfg.t_log && cfg.t_log < t0)
            return cfg.t_log;
        return t1;
    };

    res.event = OdeEvent::reached_end;
    while (true) {
        if (dp.accepted() >= cfg.max_steps) {
            res.event = OdeEvent::max_steps;
            break;
        }
        const double target = switch_point();
        const double t_prev = dp.t();
        StepStatus st = dp.advance(target, ctl, ref);
        if (st == StepStatus::underflow) {
            res.event = OdeEvent::step_underflow;
            break;
        }
        if (st == StepStatus::nonfinite) {
            res.event = OdeEvent::nonfinite;
            break;
        }
        const double t_new = dp.t();
        const State<2> y_new = dp.y();
        const auto& seg = dp.segment();
        const double hstep = std::abs(t_new - t_prev);
        const double decay = std::exp(-kappa * hstep);
        ref[0] = std::max(std::abs(y_new[0]), ref[0] * decay);
        ref[1] = log_mode ? 1.0 : std::max(std::abs(y_new[1]), ref[1] * decay);

        // Event scan on this step.
        std::optional<double> t_ev;
        OdeEvent ev = OdeEvent::reached_end;
        if (opts.detect_events && forward) {
            auto locate = [&](auto&& g) {
                double a = t_prev, b = t_new;
                for (int k = 0; k < 200 && b - a > 1e-15 * std::max(1.0, b); ++k) {
                    double m = 0.5 * (a + b);
                    if (g(seg.eval(m)))
                        b = m;
                    else
                        a = m;
                }
                return b;
            };
            if (y_new[0] <= 0.0) {
                t_ev = locate([](const State<2>& y) { return y[0] <= 0.0; });
                ev = OdeEvent::cross;
            } else if (!log_mode && y_new[1] >= -cfg.turn_eps * ref[1]) {
                const double thr = -cfg.turn_eps * ref[1];
                t_ev = locate([thr](const State<2>& y) { return y[1] >= thr; });
                ev = OdeEvent::turn;
            }
        }
        const double t_stop = t_ev ? *t_ev : t_new;
        while (gi < grid.size() && dir * (grid[gi] - t_stop) < 0.0) {
            if (dir * (grid[gi] - t_prev) > 0.0)
                emit(grid[gi], seg.eval(grid[gi]), log_mode);
            ++gi;
        }
        if (t_ev) {
            State<2> y = seg.eval(*t_ev);
            if (ev == OdeEvent::cross)
                y[0] = 0.0;
            if (dir * (*t_ev - res.profile.t.back()) > 0.0)
                emit(*t_ev, y, log_mode);
            res.event = ev;
            res.event_time = *t_ev;
            break;
        }
        if (t_new == t1) {
            if (dir * (t_new - res.profile.t.back()) > 0.0)
                emit(t_new, y_new, log_mode);
            break;
        }
        if (t_new == target) {
            // Change of variables at t_log.
            State<2> y = y_new;
            if (!log_mode) {
                if (y[1] >= 0.0) {
                    switch_blocked = true;
                    continue;
                }
                y = to_log(t_new, y, P);
                log_mode = true;
                ref[1] = 1.0;
            } else {
                y = to_linear(t_new, y, P);
                log_mode = false;
                ref[1] = std::abs(y[1]);
            }
            dp.reset(t_new, y);
        }
    }
    res.steps = dp.accepted();
    res.rejected = dp.rejected();
    if (!forward) {
        auto& pr = res.profile;
        std::reverse(pr.t.begin(), pr.t.end());
        std::reverse(pr.u.begin(), pr.u.end());
        std::reverse(pr.du.begin(), pr.du.end());
        std::reverse(pr.flux.begin(), pr.flux.end());
    }
    return res;
}

} // namespace detail

inline IntegrationResult integrate(double alpha, const ProblemParams& P, const OdeConfig& cfg)
{
    P.validate();
    cfg.validate();
    if (alpha < 0.0)
        throw DomainError("initial height must be nonnegative");
    if (alpha == 0.0) {
        IntegrationResult r;
        r.profile.params = P;
        r.profile.push(0.0, 0.0, 0.0, 0.0);
        for (double s : sample_grid(0.0, cfg.t_max, cfg))
            r.profile.push(s, 0.0, 0.0, 0.0);
        r.profile.push(cfg.t_max, 0.0, 0.0, 0.0);
        r.event = OdeEvent::reached_end;
        return r;
    }
    const double th = handoff_radius(alpha, P, cfg);
    SeriesStart s = series_start(alpha, P, th);
    IntegrationResult r = detail::walk(P, cfg, th, {s.u, s.flux}, cfg.t_max, false, {});
    r.t_handoff = th;
    auto& pr = r.profile;
    pr.t.insert(pr.t.begin(), 0.0);
    pr.u.insert(pr.u.begin(), alpha);
    pr.du.insert(pr.du.begin(), 0.0);
    pr.flux.insert(pr.flux.begin(), 0.0);
    return r;
}

// Integrates from (t0, u0, u'(t0)) to t1 in either direction without event stops.
inline IntegrationResult integrate_from(const ProblemParams& P, const OdeConfig& cfg, double t0, double u0,
                                        double du0, double t1)
{
    if (!(t0 > 0.0) || !(t1 > 0.0))
        throw DomainError("integrate_from needs positive radii");
    const bool log_start = (t1 > t0 ? t0 >= cfg.t_log : t0 > cfg.t_log) && du0 < 0.0;
    State<2> y;
    if (log_start)
        y = {u0, (P.p - 1.0) * std::log(-du0)};
    else
        y = {u0, flux_from_derivative(t0, du0, P.n, P.p)};
    return detail::walk(P, cfg, t0, y, t1, log_start, {false});
}

// Reaction term λ|u|^{p-2}u + |u|^{q-2}u.
inline double reaction(double u, const ProblemParams& P)
{
    return detail::RadialRhs{&P, nullptr}.source(u);
}

// R = -F'/S - λu^{p-1} - u^{q-1} with F' from five-point differences of the stored flux.
inline ResidualReport pde_residual(const RadialProfile& prof)
{
    std::size_t first = 0;
    while (first < prof.size() && prof.t[first] <= 0.0)
        ++first;
    const std::size_t N = prof.size() - first;
    if (N < 5)
        throw GridError("pde_residual needs at least 5 points with t > 0");
    std::span<const double> t(prof.t.data() + first, N);
    std::span<const double> F(prof.flux.data() + first, N);
    std::vector<double> dF = derivative5(t, F);
    std::vector<double> grid, val;
    const auto& P = prof.params;
    for (std::size_t i = 2; i + 2 < N; ++i) {
        const double S = std::pow(std::sinh(t[i]), P.n - 1);
        grid.push_back(t[i]);
        val.push_back(-dF[i] / S - reaction(prof.u[first + i], P));
    }
    return ResidualReport::from(std::move(grid), std::move(val));
}

// Residuals of the half-space eigen-ODE and its dilation linearization for w = t^a,
// each divided by its natural power of w; both reduce to f(a) - λ.
struct HalfspaceEigenResidual {
    ResidualReport eigen;
    ResidualReport linearized;
};

inline HalfspaceEigenResidual halfspace_eigen_residual(double a, const ProblemParams& P, std::span<const double> grid)
{
    if (!(a > 0.0))
        throw DomainError("exponent must be positive");
    const double n = P.n, p = P.p, lam = P.lambda;
    std::vector<double> g, r1, r2;
    for (double t : grid) {
        if (!(t > 0.0))
            throw GridError("half-space grid must be positive");
        const double w = std::pow(t, a);
        const double w1 = a * std::pow(t, a - 1.0);
        const double w2 = a * (a - 1.0) * std::pow(t, a - 2.0);
        const double w3 = a * (a - 1.0) * (a - 2.0) * std::pow(t, a - 3.0);
        // -t^n (t^{p-n} w'^{p-1})'
        const double d_flux = (p - n) * std::pow(t, p - n - 1.0) * std::pow(w1, p - 1.0)
                              + std::pow(t, p - n) * (p - 1.0) * std::pow(w1, p - 2.0) * w2;
        const double lhs1 = -std::pow(t, n) * d_flux;
        const double rhs1 = lam * std::pow(w, p - 1.0);
        // -t^n (t^{p-n} w'^{p-2} (t w')')'
        const double v1 = w1 + t * w2;
        const double v2 = 2.0 * w2 + t * w3;
        const double d_lin = (p - n) * std::pow(t, p - n - 1.0) * std::pow(w1, p - 2.0) * v1
                             + std::pow(t, p - n) * (p - 2.0) * std::pow(w1, p - 3.0) * w2 * v1
                             + std::pow(t, p - n) * std::pow(w1, p - 2.0) * v2;
        const double lhs2 = -std::pow(t, n) * d_lin;
        const double rhs2 = lam * std::pow(w, p - 2.0) * t * w1;
        g.push_back(t);
        r1.push_back((lhs1 - rhs1) / std::pow(w, p - 1.0));
        r2.push_back((lhs2 - rhs2) / (std::pow(w, p - 2.0) * t * w1));
    }
    HalfspaceEigenResidual out;
    out.eigen = ResidualReport::from(g, std::move(r1));
    out.linearized = ResidualReport::from(std::move(g), std::move(r2));
    return out;
}

} // namespace hyperlap

#endif
