#include <gtest/gtest.h>

#include <cmath>

#include "hyperlap/shooting.hpp"
#include "oracles/collocation.hpp"

using namespace hyperlap;

namespace {

const GroundState& ground_state_3240()
{
    static const GroundState gs = [] {
        const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.0);
        return find_ground_state(P, default_ode_config(P));
    }();
    return gs;
}

} // namespace

TEST(Shooting, ClassifyRateBands)
{
    DecayRoots r{0.5, 1.5};
    EXPECT_EQ(classify_rate(1.5, r), Classification::fast);
    EXPECT_EQ(classify_rate(1.46, r), Classification::fast);
    EXPECT_EQ(classify_rate(0.5, r), Classification::slow);
    EXPECT_EQ(classify_rate(1.2, r), Classification::undecided);
}

TEST(Shooting, TailLogDerivativeOfExponential)
{
    std::vector<double> t, u, du;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        u.push_back(std::exp(-1.7 * t.back()));
        du.push_back(-1.7 * u.back());
    }
    EXPECT_NEAR(tail_log_derivative(t, u, du), 1.7, 1e-14);
}

TEST(Shooting, DecayFitOnManufacturedProfile)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.75);
    std::vector<double> t, u;
    for (int i = 0; i <= 400; ++i) {
        t.push_back(0.1 * i);
        u.push_back(3.0 * std::exp(-1.5 * t.back()) * (1.0 + std::exp(-t.back())));
    }
    DecayFit f = decay_fit(t, u, P);
    EXPECT_TRUE(f.rate_ok);
    EXPECT_NEAR(f.rate, 1.5, 1e-3);
    EXPECT_NEAR(f.c_low, 3.0, 1e-6);
    std::vector<double> slow(u.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        slow[i] = std::exp(-0.5 * t[i]);
    EXPECT_THROW(decay_fit(t, slow, P), DecayFitError);
}

TEST(Shooting, GroundStateThreeDimensional)
{
    const GroundState& gs = ground_state_3240();
    EXPECT_EQ(gs.classification, Classification::fast);
    EXPECT_NEAR(gs.alpha_star, 2.0 * std::sqrt(6.0), 1e-6);
    EXPECT_NEAR(gs.logderiv_tail, 2.0, 1e-3);
    EXPECT_NEAR(gs.decay_rate, 2.0, 1e-3);
    EXPECT_GT(gs.sobolev_estimate, 0.0);
    EXPECT_LT(gs.residual.max_abs / gs.residual_scale, 1e-5);
    for (double u : gs.profile.u)
        EXPECT_GT(u, 0.0);
    for (std::size_t i = 1; i < gs.profile.size(); ++i)
        EXPECT_LE(gs.profile.u[i], gs.profile.u[i - 1]);
}

TEST(Shooting, BisectionHistoryIsMonotone)
{
    const GroundState& gs = ground_state_3240();
    ASSERT_FALSE(gs.history.empty());
    for (std::size_t i = 0; i < gs.history.size(); ++i) {
        const auto& h = gs.history[i];
        EXPECT_LT(h.lo, h.hi);
        EXPECT_NE(h.lo_class, Classification::cross);
        EXPECT_EQ(h.hi_class, Classification::cross);
        if (i > 0) {
            EXPECT_GE(h.lo, gs.history[i - 1].lo);
            EXPECT_LE(h.hi, gs.history[i - 1].hi);
        }
    }
}

TEST(Shooting, SecondBenchmarkRate)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.75);
    GroundState gs = find_ground_state(P, default_ode_config(P));
    EXPECT_NEAR(gs.logderiv_tail, 1.5, 1e-3);
}

TEST(Shooting, DegenerateCase)
{
    const ProblemParams P = ProblemParams::make(4, 3.0, 5.0, 0.5);
    GroundState gs = find_ground_state(P, default_ode_config(P));
    EXPECT_NEAR(gs.logderiv_tail, decay_roots(P).alpha, 1e-3);
}

TEST(Shooting, CollocationCrossCheck)
{
    const GroundState& gs = ground_state_3240();
    const double L = 20.0;
    const std::size_t N = 4001;
    boost::math::interpolators::pchip<std::vector<double>> s(std::vector<double>(gs.profile.t),
                                                             std::vector<double>(gs.profile.u));
    std::vector<double> guess(N);
    for (std::size_t i = 0; i < N; ++i)
        guess[i] = 1.05 * s(L * static_cast<double>(i) / (N - 1));
    auto c = oracle::ground_state_collocation(3, 4.0, 0.0, 2.0, L, N, guess);
    ASSERT_TRUE(c.converged);
    EXPECT_NEAR(c.u[0] / gs.alpha_star, 1.0, 1e-3);
    EXPECT_NEAR(c.u[N / 4] / s(c.t[N / 4]), 1.0, 1e-3);
}

TEST(Shooting, BracketingErrorCarriesMap)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.0);
    GroundStateOptions opt;
    opt.bracket = std::make_pair(10.0, 20.0);
    try {
        find_ground_state(P, default_ode_config(P), opt);
        FAIL() << "expected BracketingError";
    } catch (const BracketingError& e) {
        EXPECT_FALSE(e.map.empty());
    }
}

TEST(Shooting, SmallCriticalScanHasNoFastHits)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 6.0, 0.0);
    ScanReport rep = nonexistence_scan(P, log_grid(1e-3, 1e3, 13), default_ode_config(P));
    EXPECT_EQ(rep.rows.size(), 13u);
    EXPECT_EQ(rep.fast_hits, 0u);
    for (const auto& r : rep.rows) {
        if (r.classification != Classification::cross && r.pohozaev) {
            EXPECT_LT(std::max(r.pohozaev->rel1(), r.pohozaev->rel2()), 1e-6);
        }
    }
    EXPECT_THROW(nonexistence_scan(ProblemParams::make(3, 2.0, 4.0, 0.0), {1.0}, default_ode_config(P)),
                 DomainError);
}

TEST(Shooting, LogGrid)
{
    auto g = log_grid(1e-4, 1e4, 200);
    EXPECT_EQ(g.size(), 200u);
    EXPECT_NEAR(g.front(), 1e-4, 1e-18);
    EXPECT_NEAR(g.back(), 1e4, 1e-9);
    EXPECT_THROW(log_grid(1.0, 0.5, 3), GridError);
}
