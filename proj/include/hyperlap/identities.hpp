#ifndef HYPERLAP_IDENTITIES_HPP
#define HYPERLAP_IDENTITIES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "closed_forms.hpp"
#include "exponents.hpp"
#include "geometry.hpp"
#include "picone_constants.hpp"
#include "pohozaev.hpp"
#include "radial_ode.hpp"
#include "residual.hpp"
#include "shooting.hpp"
#include "variational.hpp"

namespace hyperlap {

inline double picone_constant(double p)
{
    if (!(p > 1.0))
        throw DomainError("Picone constant needs p > 1");
    return p < 2.0 ? picone_calibration::kConstantBelow2 : picone_calibration::kConstantFrom2;
}

struct PiconeTerms {
    double lhs = 0.0;
    double rhs = 0.0;
    // (u^p + v^p)(|X| + |Y|)^p
    double scale = 0.0;
};

namespace detail {

// |s|^{p-2} s, zero at s = 0.
inline double signed_power(double s, double p) { return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), p - 1.0), s); }

} // namespace detail

// Radial form with X = u'/u, Y = v'/v.
inline PiconeTerms picone_terms(double u, double du, double v, double dv, double p, double C)
{
    if (!(u > 0.0) || !(v > 0.0))
        throw DomainError("Picone needs positive u and v");
    const double X = du / u, Y = dv / v;
    const double aX = std::abs(X), aY = std::abs(Y);
    const double up = std::pow(u, p), vp = std::pow(v, p);
    const double PX = std::pow(aX, p), PY = std::pow(aY, p);
    PiconeTerms r;
    r.lhs = up * (PX + (p - 1.0) * PY - p * detail::signed_power(Y, p) * X)
            + vp * (PY + (p - 1.0) * PX - p * detail::signed_power(X, p) * Y);
    const double s = aX + aY;
    const double d = X - Y;
    r.rhs = (s == 0.0 || d == 0.0) ? 0.0 : C * std::min(up, vp) * std::pow(s, p - 2.0) * d * d;
    r.scale = (up + vp) * std::pow(s, p);
    return r;
}

struct PiconeReport {
    ResidualReport gap;
    double scale = 0.0;
    double constant = 0.0;
    // min gap / scale (0 when scale vanishes).
    double worst_ratio = 0.0;
};

namespace detail {

struct Sampled {
    std::vector<double> u, du;
};

inline Sampled sample_on(const RadialProfile& f, const std::vector<double>& grid)
{
    Sampled s;
    if (f.t == grid) {
        s.u = f.u;
        s.du = f.du;
        return s;
    }
    if (f.size() < 4)
        throw GridError("resampling needs at least 4 points");
    boost::math::interpolators::pchip<std::vector<double>> iu(std::vector<double>(f.t), std::vector<double>(f.u));
    boost::math::interpolators::pchip<std::vector<double>> id(std::vector<double>(f.t), std::vector<double>(f.du));
    for (double t : grid) {
        s.u.push_back(iu(t));
        s.du.push_back(id(t));
    }
    return s;
}

// Union of both grids over the overlap of their ranges.
inline std::vector<double> common_grid(const RadialProfile& a, const RadialProfile& b)
{
    if (a.t == b.t)
        return a.t;
    const double lo = std::max(a.t.front(), b.t.front());
    const double hi = std::min(a.t.back(), b.t.back());
    if (!(hi > lo))
        throw GridError("profiles share no radial range");
    std::vector<double> g;
    for (const auto* f : {&a, &b})
        for (double t : f->t)
            if (t >= lo && t <= hi)
                g.push_back(t);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

} // namespace detail

inline PiconeReport picone_gap(const RadialProfile& u, const RadialProfile& v, double C)
{
    if (u.params.p != v.params.p)
        throw DomainError("Picone profiles must share p");
    const double p = u.params.p;
    std::vector<double> grid = detail::common_grid(u, v);
    detail::Sampled su = detail::sample_on(u, grid), sv = detail::sample_on(v, grid);
    std::vector<double> gap(grid.size());
    PiconeReport r;
    r.constant = C;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const PiconeTerms pt = picone_terms(su.u[i], su.du[i], sv.u[i], sv.du[i], p, C);
        gap[i] = pt.lhs - pt.rhs;
        r.scale = std::max(r.scale, pt.scale);
    }
    r.gap = ResidualReport::from(std::move(grid), std::move(gap));
    const double mn = *std::min_element(r.gap.pointwise.begin(), r.gap.pointwise.end());
    r.gap.sign_ok = mn >= -1e-10 * r.scale;
    r.worst_ratio = r.scale > 0.0 ? mn / r.scale : 0.0;
    return r;
}

inline PiconeReport picone_gap(const RadialProfile& u, const RadialProfile& v)
{
    return picone_gap(u, v, picone_constant(u.params.p));
}

// exp of a random cubic spline on [0, 10]: a positive profile with an exact derivative.
inline RadialProfile random_positive_profile(const ProblemParams& P, std::mt19937_64& rng, std::size_t points = 201)
{
    std::uniform_real_distribution<double> U(-4.0, 2.0);
    std::vector<double> knots(11);
    for (double& k : knots)
        k = U(rng);
    boost::math::interpolators::cardinal_cubic_b_spline<double> s(knots.begin(), knots.end(), 0.0, 1.0);
    RadialProfile pr;
    pr.params = P;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = 10.0 * static_cast<double>(i) / static_cast<double>(points - 1);
        const double u = std::exp(s(t));
        const double du = u * s.prime(t);
        pr.push(t, u, du, flux_from_derivative(t, du, P.n, P.p));
    }
    return pr;
}

struct PiconeMonteCarlo {
    double p = 0.0;
    double constant = 0.0;
    std::size_t pairs = 0;
    std::size_t failures = 0;
    double worst_ratio = 0.0;
};

inline PiconeMonteCarlo picone_monte_carlo(double p, double C, std::size_t pairs, std::uint64_t seed)
{
    const ProblemParams P{3, p, p + 0.5, 0.0};
    std::mt19937_64 rng(seed);
    PiconeMonteCarlo r;
    r.p = p;
    r.constant = C;
    r.pairs = pairs;
    r.worst_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pairs; ++k) {
        RadialProfile a = random_positive_profile(P, rng);
        RadialProfile b = random_positive_profile(P, rng);
        PiconeReport g = picone_gap(a, b, C);
        if (!g.gap.sign_ok.value_or(false))
            ++r.failures;
        r.worst_ratio = std::min(r.worst_ratio, g.worst_ratio);
    }
    return r;
}

// Infimum over s = Y/X of p(|X|^{p-2}X - |Y|^{p-2}Y)(X - Y) / ((|X|+|Y|)^{p-2}(X - Y)²); homogeneous in X.
inline double picone_pointwise_infimum(double p, std::size_t samples = 20001)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        // s = tan(θ) sweeps the whole line including both signs.
        const double th = -1.5707963267948966 + 3.141592653589793 * (static_cast<double>(i) + 0.5) / samples;
        const double s = std::tan(th);
        const double d = 1.0 - s;
        if (std::abs(d) < 1e-9)
            continue;
        const double num = p * (1.0 - detail::signed_power(s, p)) * d;
        const double den = std::pow(1.0 + std::abs(s), p - 2.0) * d * d;
        best = std::min(best, num / den);
    }
    return best;
}

// Consolidated suite.

struct SuiteRow {
    std::string suite;
    std::string subject;
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string note;
};

struct SuiteReport {
    std::vector<SuiteRow> rows;

    bool passed() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const SuiteRow& r) { return r.passed; });
    }

    std::size_t failures() const
    {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SuiteRow& r) { return !r.passed; }));
    }
};

enum SuiteSection : unsigned {
    kGroundState = 1u << 0,
    kSubSuper = 1u << 1,
    kEigen = 1u << 2,
    kPicone = 1u << 3,
    kHardy = 1u << 4,
    kPohozaev = 1u << 5,
    kGeometry = 1u << 6,
    kAllSections = 0x7fu,
};

struct NamedProfile {
    std::string name;
    RadialProfile profile;
};

struct SuiteOptions {
    std::uint64_t seed = kDefaultSeed;
    unsigned sections = kAllSections;
    std::size_t picone_pairs = 1000;
    std::vector<double> picone_ps = {1.5, 2.0, 3.0};
    std::size_t hardy_bumps = 50;
    std::size_t geometry_samples = 100000;
    std::size_t eigen_points = 1000;
    std::vector<double> pohozaev_radii = {2.0, 5.0, 10.0, 15.0};
    std::vector<double> pohozaev_alphas = {0.1, 1.0};
    unsigned threads = 0;
    // Extra profiles checked against the equation; used for fault injection.
    std::vector<NamedProfile> injected;
};

inline std::vector<ProblemParams> default_benchmarks()
{
    return {ProblemParams::make(3, 2.0, 4.0, 0.0), ProblemParams::make(3, 2.0, 4.0, 0.75),
            ProblemParams::make(4, 3.0, 5.0, 0.5)};
}

inline std::string describe(const ProblemParams& P)
{
    std::ostringstream s;
    s.precision(15);
    s << "n=" << P.n << " p=" << P.p << " q=" << P.q << " lambda=" << P.lambda;
    return s.str();
}

namespace detail {

inline SuiteRow row(std::string suite, std::string subject, std::string metric, double value, double threshold,
                    bool passed, std::string note = {})
{
    return SuiteRow{std::move(suite), std::move(subject), std::move(metric), value, threshold, passed, std::move(note)};
}

// value <= threshold passes.
inline SuiteRow bound_row(std::string suite, std::string subject, std::string metric, double value, double threshold,
                          std::string note = {})
{
    return row(std::move(suite), std::move(subject), std::move(metric), value, threshold,
               std::isfinite(value) && value <= threshold, std::move(note));
}

inline std::vector<SuiteRow> profile_rows(const std::string& subject, const RadialProfile& prof)
{
    ResidualReport res = pde_residual(prof);
    double scale = 1.0;
    for (double u : prof.u)
        scale = std::max(scale, std::abs(reaction(std::max(u, 0.0), prof.params)));
    return {bound_row("ground_state", subject, "pde_residual/scale", res.max_abs / scale, 1e-5)};
}

inline std::vector<SuiteRow> ground_state_rows(const ProblemParams& P, const GroundState& gs, unsigned sections)
{
    const std::string who = describe(P);
    std::vector<SuiteRow> rows;
    if (sections & kGroundState) {
        rows.push_back(bound_row("ground_state", who, "pde_residual/scale", gs.residual.max_abs / gs.residual_scale, 1e-5));
        const double a = decay_roots(P).alpha;
        rows.push_back(bound_row("ground_state", who, "|tail_logderiv-alpha|", std::abs(gs.logderiv_tail - a), 1e-3));
    }
    if (sections & kPicone) {
        BarrierSpec sup = BarrierSpec::supersolution(P, 2);
        RadialProfile v = barrier_profile(sup, gs.profile.t);
        PiconeReport g = picone_gap(gs.profile, v);
        rows.push_back(row("picone", who + " ground/super", "min_gap/scale", g.worst_ratio, -1e-10,
                           g.gap.sign_ok.value_or(false)));
        PiconeReport h = picone_gap(v, gs.profile);
        double asym = 0.0;
        for (std::size_t i = 0; i < g.gap.pointwise.size(); ++i)
            asym = std::max(asym, std::abs(g.gap.pointwise[i] - h.gap.pointwise[i]));
        rows.push_back(bound_row("picone", who + " symmetry", "max|gap(u,v)-gap(v,u)|/scale",
                                 g.scale > 0.0 ? asym / g.scale : asym, 1e-12));
    }
    return rows;
}

inline std::vector<SuiteRow> barrier_rows(const ProblemParams& P)
{
    const std::string who = describe(P);
    std::vector<SuiteRow> rows;
    std::vector<BarrierSpec> specs = {BarrierSpec::supersolution(P, 2), BarrierSpec::supersolution(P, 4),
                                      BarrierSpec::subsolution(P),
                                      BarrierSpec::weak_envelope(P, 0.1 * (P.lambda_max() - P.lambda))};
    for (const auto& s : specs) {
        ValidityReport v = find_validity_radius(s);
        std::string name = std::string(to_string(s.kind));
        if (s.kind == BarrierKind::supersolution)
            name += " m=" + std::to_string(s.m);
        rows.push_back(row("subsuper", who + " " + name, "R_valid", v.R, 100.0, v.found && v.refined_ok,
                           v.found ? "rechecked on " + std::to_string(v.refined_points) + " points" : "claim never holds"));
    }
    return rows;
}

inline std::vector<SuiteRow> eigen_rows(const ProblemParams& P, std::size_t points, std::uint64_t seed)
{
    const std::string who = describe(P);
    const DecayRoots r = decay_roots(P);
    std::vector<double> grid = geometric_grid(1e-2, 1e2, 10.0);
    std::vector<SuiteRow> rows;
    for (auto [label, a] : {std::pair<const char*, double>{"alpha", r.alpha}, {"beta", r.beta}}) {
        if (a == 0.0) {
            rows.push_back(row("eigen", who + " " + label, "max|residual|", 0.0, 1e-12, true, "constant profile"));
            continue;
        }
        HalfspaceEigenResidual h = halfspace_eigen_residual(a, P, grid);
        rows.push_back(bound_row("eigen", who + " " + label, "max|residual|",
                                 std::max(h.eigen.max_abs, h.linearized.max_abs), 1e-12));
    }
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < points; ++k) {
        BoundaryDirection xi{random_unit(static_cast<std::size_t>(P.n), rng)};
        BallPoint x = random_ball_point(static_cast<std::size_t>(P.n), rng);
        worst = std::max(worst, std::abs(eigen_log_gradient(xi, x, r.alpha) - r.alpha));
    }
    rows.push_back(bound_row("eigen", who + " log-gradient", "max|grad log E - alpha|", worst, 1e-6));
    return rows;
}

inline std::vector<SuiteRow> hardy_rows(const ProblemParams& P, std::size_t bumps, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> W(0.2, 2.0), A(0.5, 2.0), C(0.0, 8.0);
    std::size_t fails = 0;
    double worst = std::numeric_limits<double>::infinity();
    double constant = hardy_constant(P);
    for (std::size_t k = 0; k < bumps; ++k) {
        SplineBump b;
        b.width = W(rng);
        b.amplitude = A(rng);
        b.center = 1.0 + 1e-6 + 2.0 * b.width + C(rng);
        HardyReport h = hardy_check(b, P);
        if (!h.holds)
            ++fails;
        worst = std::min(worst, h.empirical_constant);
    }
    return {row("hardy", describe(P), "min_empirical_constant", worst, constant, fails == 0,
                std::to_string(fails) + " of " + std::to_string(bumps) + " bumps fail")};
}

inline std::vector<SuiteRow> pohozaev_rows(const ProblemParams& bench, const SuiteOptions& opt)
{
    const ProblemParams P = ProblemParams::make(bench.n, bench.p, critical_exponent(bench.n, bench.p), 0.0);
    const OdeConfig cfg = default_ode_config(P);
    std::vector<SuiteRow> rows;
    for (double a : opt.pohozaev_alphas) {
        IntegrationResult ir = integrate(a, P, cfg);
        std::ostringstream who;
        who.precision(15);
        who << describe(P) << " alpha=" << a;
        for (double R : opt.pohozaev_radii) {
            if (ir.profile.t.back() < R)
                continue;
            PohozaevReport pz = pohozaev_residuals(ir.profile, R);
            rows.push_back(bound_row("pohozaev", who.str() + " R=" + std::to_string(static_cast<int>(R)),
                                     "max(rel1,rel2)", std::max(pz.rel1(), pz.rel2()), 1e-6));
            const bool scale_check = contradiction_scale_applies(a, P);
            rows.push_back(row("pohozaev", who.str() + " R=" + std::to_string(static_cast<int>(R)),
                               "contradiction_term", pz.contradiction_term,
                               scale_check ? -1e-3 * pz.contradiction_scale : 0.0,
                               contradiction_negative(pz, scale_check)));
        }
    }
    return rows;
}

inline std::vector<SuiteRow> geometry_rows(std::size_t samples, std::uint64_t seed)
{
    GeometrySuiteReport g = geometry_monte_carlo(samples, seed);
    const std::string who = std::to_string(samples) + " samples";
    return {bound_row("geometry", who, "involution_max_err", g.involution_max_err, 1e-9),
            bound_row("geometry", who, "isometry_max_rel_err", g.isometry_max_err, 1e-9),
            bound_row("geometry", who, "distance_identity_max_rel_err", g.distance_identity_max_err, 1e-9),
            bound_row("geometry", who, "reflection_violations", static_cast<double>(g.reflection_violations), 0.0,
                      std::to_string(g.reflection_checks) + " checks")};
}

template <class Fn>
std::function<std::vector<SuiteRow>()> guarded(std::string suite, std::string subject, Fn fn)
{
    return [suite = std::move(suite), subject = std::move(subject), fn = std::move(fn)]() -> std::vector<SuiteRow> {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {row(suite, subject, "error", std::numeric_limits<double>::quiet_NaN(), 0.0, false, e.what())};
        }
    };
}

} // namespace detail

// Rows run concurrently and merge in task order; an empty benchmark set yields an empty report.
inline SuiteReport identity_suite(const std::vector<ProblemParams>& benchmarks, const SuiteOptions& opt = {})
{
    using Task = std::function<std::vector<SuiteRow>()>;
    std::vector<Task> tasks;
    const unsigned S = opt.sections;
    for (std::size_t b = 0; b < benchmarks.size(); ++b) {
        const ProblemParams P = benchmarks[b];
        const std::string who = describe(P);
        const std::uint64_t seed = opt.seed + 7919ULL * (b + 1);
        if (S & (kGroundState | kPicone))
            tasks.push_back(detail::guarded("ground_state", who, [P, S]() {
                GroundState gs = find_ground_state(P, default_ode_config(P));
                return detail::ground_state_rows(P, gs, S);
            }));
        if (S & kSubSuper)
            tasks.push_back(detail::guarded("subsuper", who, [P]() { return detail::barrier_rows(P); }));
        if (S & kEigen)
            tasks.push_back(detail::guarded("eigen", who, [P, &opt, seed]() {
                return detail::eigen_rows(P, opt.eigen_points, seed);
            }));
        if (S & kHardy)
            tasks.push_back(detail::guarded("hardy", who, [P, &opt, seed]() {
                return detail::hardy_rows(P, opt.hardy_bumps, seed);
            }));
        if ((S & kPohozaev) && P.lambda == 0.0)
            tasks.push_back(detail::guarded("pohozaev", who, [P, &opt]() { return detail::pohozaev_rows(P, opt); }));
    }
    if (!benchmarks.empty()) {
        if (S & kPicone)
            for (double p : opt.picone_ps)
                tasks.push_back(detail::guarded("picone", "monte carlo", [p, &opt]() {
                    PiconeMonteCarlo mc = picone_monte_carlo(p, picone_constant(p), opt.picone_pairs, opt.seed);
                    std::ostringstream who;
                    who << "p=" << p << " random pairs";
                    return std::vector<SuiteRow>{detail::row("picone", who.str(), "min_gap/scale", mc.worst_ratio, -1e-10,
                                                             mc.failures == 0,
                                                             std::to_string(mc.failures) + " of "
                                                                 + std::to_string(mc.pairs) + " pairs fail")};
                }));
        if (S & kGeometry)
            tasks.push_back(detail::guarded("geometry", "monte carlo", [&opt]() {
                return detail::geometry_rows(opt.geometry_samples, opt.seed);
            }));
    }
    for (const auto& np : opt.injected)
        tasks.push_back(detail::guarded("ground_state", np.name, [&np]() { return detail::profile_rows(np.name, np.profile); }));

    std::vector<std::vector<SuiteRow>> out(tasks.size());
    parallel_for(tasks.size(), opt.threads, [&](std::size_t i) { out[i] = tasks[i](); });
    SuiteReport rep;
    for (auto& v : out)
        for (auto& r : v)
            rep.rows.push_back(std::move(r));
    return rep;
}

} // namespace hyperlap

#endif
