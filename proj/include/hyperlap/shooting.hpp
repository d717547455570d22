#ifndef HYPERLAP_SHOOTING_HPP
#define HYPERLAP_SHOOTING_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "exponents.hpp"
#include "pohozaev.hpp"
#include "radial_ode.hpp"
#include "variational.hpp"

namespace hyperlap {

enum class Classification { cross, slow, fast, undecided };

inline const char* to_string(Classification c)
{
    switch (c) {
    case Classification::cross: return "CROSS";
    case Classification::slow: return "SLOW";
    case Classification::fast: return "FAST";
    default: return "UNDECIDED";
    }
}

struct ClassifierBand {
    double half_width_fraction = 0.05;
};

struct TrajectoryReport {
    double alpha = 0.0;
    Classification classification = Classification::undecided;
    std::optional<double> cross_time;
    double logderiv_tail = 0.0;
    OdeEvent event = OdeEvent::reached_end;
    RadialProfile profile;
};

// Mean of -u'/u over the last tenth of the radial range (positive values only).
inline double tail_log_derivative(std::span<const double> t, std::span<const double> u, std::span<const double> du,
                                  double fraction = 0.1)
{
    if (t.size() < 2)
        throw GridError("tail estimate needs at least 2 points");
    const double from = t.back() - fraction * (t.back() - t.front());
    double s = 0.0;
    std::size_t c = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= from && u[i] > 0.0) {
            s += -du[i] / u[i];
            ++c;
        }
    if (c == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return s / static_cast<double>(c);
}

inline Classification classify_rate(double rate, const DecayRoots& r, const ClassifierBand& band = {})
{
    const double hw = band.half_width_fraction * (r.alpha - r.beta);
    if (std::abs(rate - r.alpha) <= hw)
        return Classification::fast;
    if (rate < 0.5 * (r.alpha + r.beta))
        return Classification::slow;
    return Classification::undecided;
}

inline TrajectoryReport classify(double alpha, const ProblemParams& P, const OdeConfig& cfg, const ClassifierBand& band = {})
{
    if (!(alpha > 0.0))
        throw DomainError("classify needs alpha > 0");
    IntegrationResult ir = integrate(alpha, P, cfg);
    TrajectoryReport rep;
    rep.alpha = alpha;
    rep.event = ir.event;
    rep.profile = std::move(ir.profile);
    const auto& pr = rep.profile;
    rep.logderiv_tail = tail_log_derivative(pr.t, pr.u, pr.du);
    if (ir.event == OdeEvent::cross) {
        rep.classification = Classification::cross;
        rep.cross_time = ir.event_time;
    } else if (ir.event == OdeEvent::reached_end) {
        rep.classification = classify_rate(rep.logderiv_tail, decay_roots(P), band);
    } else {
        rep.classification = Classification::undecided;
    }
    return rep;
}

struct DecayFit {
    double rate = 0.0;
    double c_low = 0.0;
    double c_high = 0.0;
    double t_from = 0.0;
    double t_to = 0.0;
    bool rate_ok = false;
};

class DecayFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Least-squares slope of -log u on [t_end/2, t_end]; envelope constants of u·e^{α_λ t}.
inline DecayFit decay_fit(std::span<const double> t, std::span<const double> u, const ProblemParams& P,
                          const ClassifierBand& band = {}, double rate_tol = 1e-3)
{
    require_aligned(t, u);
    const double t_end = t.back();
    std::vector<double> xs, ys;
    const double al = decay_roots(P).alpha;
    DecayFit f;
    f.t_from = 0.5 * t_end;
    f.t_to = t_end;
    f.c_low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < f.t_from)
            continue;
        if (!(u[i] > 0.0))
            throw DecayFitError("profile not positive on the tail window");
        xs.push_back(t[i]);
        ys.push_back(-std::log(u[i]));
        const double e = u[i] * std::exp(al * t[i]);
        f.c_low = std::min(f.c_low, e);
        f.c_high = std::max(f.c_high, e);
    }
    if (xs.size() < 3)
        throw DecayFitError("tail window has fewer than 3 points");
    f.rate = fit_line(xs, ys).slope;
    if (classify_rate(f.rate, decay_roots(P), band) != Classification::fast)
        throw DecayFitError("profile does not decay at the fast rate (rate " + std::to_string(f.rate) + ")");
    f.rate_ok = std::abs(f.rate - al) <= rate_tol;
    return f;
}

inline DecayFit decay_fit(const RadialProfile& prof, const ClassifierBand& band = {}, double rate_tol = 1e-3)
{
    return decay_fit(prof.t, prof.u, prof.params, band, rate_tol);
}

struct BisectionStep {
    double lo = 0.0;
    double hi = 0.0;
    Classification lo_class = Classification::undecided;
    Classification hi_class = Classification::undecided;
};

struct GroundState {
    double alpha_star = 0.0;
    RadialProfile profile;
    double sobolev_estimate = 0.0;
    double c_low = 0.0;
    double c_high = 0.0;
    double decay_rate = 0.0;
    double logderiv_tail = 0.0;
    Classification classification = Classification::undecided;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    std::vector<BisectionStep> history;
    // Forward/backward junction diagnostics.
    double match_time = 0.0;
    double match_slope_mismatch = 0.0;
    double forward_logderiv_at_match = 0.0;
    double tail_epsilon = 0.0;
    ResidualReport residual;
    // max(1, max |λu^{p-1} + u^{q-1}|): the residual acceptance is relative to this.
    double residual_scale = 1.0;
};

class BracketingError : public std::runtime_error {
public:
    std::vector<std::pair<double, Classification>> map;
    BracketingError(const std::string& what, std::vector<std::pair<double, Classification>> m)
        : std::runtime_error(what), map(std::move(m))
    {
    }
};

class GroundStateRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GroundStateOptions {
    std::optional<std::pair<double, double>> bracket;
    double start = 1.0;
    int max_doublings = 60;
    double rel_tol = 1e-11;
    double match_tol = 1e-8;
    double residual_limit = 1e-5;
    double rate_tol = 1e-3;
    double max_slope_mismatch = 1e-4;
    ClassifierBand band;
};

namespace detail {

inline bool crosses(const TrajectoryReport& r) { return r.classification == Classification::cross; }

// Last common radius up to which the two trajectories agree to tol (relative).
inline double agreement_radius(const RadialProfile& a, const RadialProfile& b, double tol)
{
    std::size_t i = 0, j = 0;
    double last = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a.t[i] < b.t[j]) {
            ++i;
        } else if (b.t[j] < a.t[i]) {
            ++j;
        } else {
            if (!(a.u[i] > 0.0) || std::abs(a.u[i] - b.u[j]) > tol * a.u[i])
                break;
            last = a.t[i];
            ++i;
            ++j;
        }
    }
    return last;
}

} // namespace detail

inline GroundState find_ground_state(const ProblemParams& P, const OdeConfig& cfg, const GroundStateOptions& opt = {})
{
    P.validate();
    const DecayRoots roots = decay_roots(P);
    std::vector<std::pair<double, Classification>> map;
    auto run = [&](double a) {
        TrajectoryReport r = classify(a, P, cfg, opt.band);
        map.emplace_back(a, r.classification);
        return r;
    };

    TrajectoryReport lo_rep, hi_rep;
    if (opt.bracket) {
        lo_rep = run(opt.bracket->first);
        hi_rep = run(opt.bracket->second);
        if (detail::crosses(lo_rep) || !detail::crosses(hi_rep))
            throw BracketingError("supplied bracket does not separate non-crossing from crossing", map);
    } else {
        TrajectoryReport r = run(opt.start);
        bool found = false;
        if (detail::crosses(r)) {
            hi_rep = std::move(r);
            for (int k = 0; k < opt.max_doublings; ++k) {
                TrajectoryReport s = run(hi_rep.alpha * 0.5);
                if (!detail::crosses(s)) {
                    lo_rep = std::move(s);
                    found = true;
                    break;
                }
                hi_rep = std::move(s);
            }
        } else {
            lo_rep = std::move(r);
            for (int k = 0; k < opt.max_doublings; ++k) {
                TrajectoryReport s = run(lo_rep.alpha * 2.0);
                if (detail::crosses(s)) {
                    hi_rep = std::move(s);
                    found = true;
                    break;
                }
                lo_rep = std::move(s);
            }
        }
        if (!found)
            throw BracketingError("no crossing/non-crossing pair within the doubling budget", map);
    }

    GroundState gs;
    gs.history.push_back({lo_rep.alpha, hi_rep.alpha, lo_rep.classification, hi_rep.classification});
    // Bisect well past rel_tol, down to the resolution of double.
    const double stop = std::min(opt.rel_tol, 4.0 * std::numeric_limits<double>::epsilon());
    while (hi_rep.alpha - lo_rep.alpha > stop * hi_rep.alpha) {
        const double mid = lo_rep.alpha + 0.5 * (hi_rep.alpha - lo_rep.alpha);
        if (mid <= lo_rep.alpha || mid >= hi_rep.alpha)
            break;
        TrajectoryReport m = classify(mid, P, cfg, opt.band);
        if (detail::crosses(m))
            hi_rep = std::move(m);
        else
            lo_rep = std::move(m);
        gs.history.push_back({lo_rep.alpha, hi_rep.alpha, lo_rep.classification, hi_rep.classification});
    }
    gs.bracket_lo = lo_rep.alpha;
    gs.bracket_hi = hi_rep.alpha;
    gs.alpha_star = lo_rep.alpha + 0.5 * (hi_rep.alpha - lo_rep.alpha);
    TrajectoryReport mid = classify(gs.alpha_star, P, cfg, opt.band);

    // Forward part up to where the bracket ends still agree.
    double tm = detail::agreement_radius(lo_rep.profile, hi_rep.profile, opt.match_tol);
    tm = std::min(tm, cfg.t_max - 2.0);
    if (mid.cross_time)
        tm = std::min(tm, *mid.cross_time - 1.0);
    if (!(tm > 1.0))
        throw GroundStateRejected("bracket trajectories separate before t = 1; cannot match a tail");
    std::size_t km = 0;
    while (km + 1 < mid.profile.size() && mid.profile.t[km + 1] <= tm)
        ++km;
    tm = mid.profile.t[km];
    const double u_m = mid.profile.u[km];
    const double du_m = mid.profile.du[km];
    gs.match_time = tm;
    gs.forward_logderiv_at_match = -du_m / u_m;

    // Backward tail from t_max on the fast branch, scaled to meet u(tm).
    const double T = cfg.t_max;
    double eps = u_m * std::exp(-roots.alpha * (T - tm));
    IntegrationResult back;
    for (int k = 0; k < 60; ++k) {
        back = integrate_from(P, cfg, T, eps, -roots.alpha * eps, tm);
        const double ub = back.profile.u.front();
        if (!(ub > 0.0) || back.event != OdeEvent::reached_end)
            throw GroundStateRejected("backward tail integration failed");
        const double ratio = u_m / ub;
        eps *= ratio;
        if (std::abs(ratio - 1.0) < 1e-14)
            break;
    }
    back = integrate_from(P, cfg, T, eps, -roots.alpha * eps, tm);
    gs.tail_epsilon = eps;
    gs.match_slope_mismatch = std::abs(back.profile.du.front() - du_m) / std::abs(du_m);

    RadialProfile comp;
    comp.params = P;
    for (std::size_t i = 0; i <= km; ++i)
        comp.push(mid.profile.t[i], mid.profile.u[i], mid.profile.du[i], mid.profile.flux[i]);
    for (std::size_t i = 0; i < back.profile.size(); ++i)
        if (back.profile.t[i] > tm)
            comp.push(back.profile.t[i], back.profile.u[i], back.profile.du[i], back.profile.flux[i]);
    gs.profile = std::move(comp);

    gs.logderiv_tail = tail_log_derivative(gs.profile.t, gs.profile.u, gs.profile.du);
    gs.classification = classify_rate(gs.logderiv_tail, roots, opt.band);
    gs.residual = pde_residual(gs.profile);
    for (double v : gs.profile.u)
        gs.residual_scale = std::max(gs.residual_scale, std::abs(reaction(v, P)));

    std::ostringstream why;
    if (gs.residual.max_abs > opt.residual_limit * gs.residual_scale)
        why << "residual " << gs.residual.max_abs << " exceeds " << opt.residual_limit << " x "
            << gs.residual_scale << "; ";
    if (gs.match_slope_mismatch > opt.max_slope_mismatch)
        why << "slope mismatch " << gs.match_slope_mismatch << " at the tail junction; ";
    if (classify_rate(gs.forward_logderiv_at_match, roots, opt.band) != Classification::fast)
        why << "forward log-derivative " << gs.forward_logderiv_at_match << " not in the fast band; ";
    DecayFit fit;
    try {
        fit = decay_fit(gs.profile, opt.band, opt.rate_tol);
        if (!fit.rate_ok)
            why << "decay rate " << fit.rate << " off by more than " << opt.rate_tol << "; ";
    } catch (const DecayFitError& e) {
        why << e.what() << "; ";
    }
    if (!why.str().empty())
        throw GroundStateRejected("ground-state candidate rejected: " + why.str());
    gs.decay_rate = fit.rate;
    gs.c_low = fit.c_low;
    gs.c_high = fit.c_high;
    gs.sobolev_estimate = std::pow(weighted_integral(gs.profile.u, P.q, gs.profile.t, P.n), (P.q - P.p) / P.q);
    return gs;
}

struct ScanRow {
    double alpha = 0.0;
    Classification classification = Classification::undecided;
    std::optional<double> cross_time;
    double logderiv_tail = 0.0;
    std::optional<PohozaevReport> pohozaev;
};

struct ScanRefinement {
    double lo = 0.0;
    double hi = 0.0;
    Classification outcome = Classification::undecided;
    std::optional<double> alpha_star;
    std::string note;
};

struct ScanReport {
    ProblemParams params;
    std::vector<ScanRow> rows;
    std::vector<ScanRefinement> refinements;
    std::size_t fast_hits = 0;
    std::size_t crossings = 0;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t count)
{
    if (count < 2 || !(lo > 0.0) || !(hi > lo))
        throw GridError("log grid needs 0 < lo < hi and at least 2 points");
    std::vector<double> g(count);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    return g;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < count; i = next++)
            fn(i);
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
}

struct ScanOptions {
    double pohozaev_radius = 5.0;
    unsigned threads = 0;
    bool refine = true;
    bool require_critical = true;
    ClassifierBand band;
};

// Classifies every height; adjacent non-crossing/crossing pairs are refined by the
// ground-state search, whose accepted FAST results count as hits.
inline ScanReport nonexistence_scan(const ProblemParams& P, const std::vector<double>& alphas, const OdeConfig& cfg,
                                    const ScanOptions& opt = {})
{
    P.validate();
    if (opt.require_critical && (P.lambda != 0.0 || !P.is_critical()))
        throw DomainError("nonexistence scan needs lambda = 0 and q = p*");
    std::vector<double> grid(alphas);
    std::sort(grid.begin(), grid.end());
    ScanReport rep;
    rep.params = P;
    rep.rows.resize(grid.size());
    const bool pz = P.lambda == 0.0 && P.is_critical();
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
        TrajectoryReport tr = classify(grid[i], P, cfg, opt.band);
        ScanRow row;
        row.alpha = grid[i];
        row.classification = tr.classification;
        row.cross_time = tr.cross_time;
        row.logderiv_tail = tr.logderiv_tail;
        if (pz && tr.classification != Classification::cross && tr.profile.t.back() > opt.pohozaev_radius)
            row.pohozaev = pohozaev_residuals(tr.profile, opt.pohozaev_radius);
        rep.rows[i] = std::move(row);
    });
    for (const auto& r : rep.rows) {
        if (r.classification == Classification::fast)
            ++rep.fast_hits;
        if (r.classification == Classification::cross)
            ++rep.crossings;
    }
    if (opt.refine) {
        for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
            const bool a = rep.rows[i].classification == Classification::cross;
            const bool b = rep.rows[i + 1].classification == Classification::cross;
            if (a || !b)
                continue;
            ScanRefinement ref;
            ref.lo = rep.rows[i].alpha;
            ref.hi = rep.rows[i + 1].alpha;
            GroundStateOptions go;
            go.bracket = std::make_pair(ref.lo, ref.hi);
            go.band = opt.band;
            try {
                GroundState gs = find_ground_state(P, cfg, go);
                ref.outcome = gs.classification;
                ref.alpha_star = gs.alpha_star;
            } catch (const std::exception& e) {
                ref.outcome = Classification::undecided;
                ref.note = e.what();
            }
            if (ref.outcome == Classification::fast)
                ++rep.fast_hits;
            rep.refinements.push_back(std::move(ref));
        }
    }
    return rep;
}

} // namespace hyperlap

#endif
