#include <gtest/gtest.h>

#include <cmath>

#include "hyperlap/closed_forms.hpp"

using namespace hyperlap;

namespace {

std::vector<ProblemParams> param_sets()
{
    std::vector<ProblemParams> out;
    for (auto [n, p, q] : {std::tuple{3, 2.0, 4.0}, {4, 3.0, 5.0}, {4, 2.0, 3.0}, {5, 1.5, 2.0}})
        for (double f : {0.0, 0.25, 0.5, 0.75})
            out.push_back(ProblemParams::make(n, p, q, f * lambda_max(n, p)));
    return out;
}

} // namespace

TEST(ClosedForms, CLambdaValue)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.0);
    EXPECT_NEAR(c_lambda(P, 2), 6.0, 1e-14);
    EXPECT_NEAR(c_lambda(P, 4), 5.0, 1e-14);
    EXPECT_THROW(c_lambda(P, 1), DomainError);
}

TEST(ClosedForms, DerivativesMatchFiniteDifferences)
{
    const ProblemParams P = ProblemParams::make(4, 3.0, 5.0, 0.5);
    for (const BarrierSpec& s : {BarrierSpec::supersolution(P, 2), BarrierSpec::supersolution(P, 4),
                                 BarrierSpec::subsolution(P), BarrierSpec::weak_envelope(P, 0.1)}) {
        for (double t : {0.3, 1.0, 2.5}) {
            const double h = 1e-5;
            BarrierValues b = barrier_value_and_derivatives(s, t);
            BarrierValues bp = barrier_value_and_derivatives(s, t + h);
            BarrierValues bm = barrier_value_and_derivatives(s, t - h);
            EXPECT_NEAR(b.dv, (bp.v - bm.v) / (2 * h), 1e-7 * (1.0 + std::abs(b.dv)));
            EXPECT_NEAR(b.d2v, (bp.dv - bm.dv) / (2 * h), 1e-6 * (1.0 + std::abs(b.d2v)));
        }
    }
}

TEST(ClosedForms, StableResidualMatchesDirectAssembly)
{
    for (const ProblemParams& P : param_sets()) {
        std::vector<BarrierSpec> specs = {BarrierSpec::supersolution(P, 2), BarrierSpec::supersolution(P, 4),
                                          BarrierSpec::subsolution(P)};
        for (const auto& s : specs)
            for (double t : {0.2, 0.7, 1.5, 3.0}) {
                const double a = barrier_residual(s, t);
                const double d = barrier_residual_direct(s, t);
                const double v = std::pow(barrier_value_and_derivatives(s, t).v, P.p - 1.0);
                EXPECT_NEAR(a, d, 1e-9 * v * (1.0 + c_lambda(P, 2))) << to_string(s.kind);
            }
    }
}

TEST(ClosedForms, BarrierCertificatesBeyondValidityRadius)
{
    for (const ProblemParams& P : param_sets())
        for (const BarrierSpec& s : {BarrierSpec::supersolution(P, 2), BarrierSpec::supersolution(P, 4),
                                     BarrierSpec::subsolution(P)}) {
            ValidityReport v = find_validity_radius(s);
            EXPECT_TRUE(v.found);
            EXPECT_TRUE(v.refined_ok);
            EXPECT_LT(v.R, 100.0);
        }
}

TEST(ClosedForms, SubsolutionClaimHoldsEverywhere)
{
    for (const ProblemParams& P : param_sets()) {
        BarrierSpec s = BarrierSpec::subsolution(P);
        for (double t : geometric_grid(1e-2, 100.0, 50.0))
            EXPECT_LE(normalized_barrier_residual(s, t), 0.0);
    }
}

TEST(ClosedForms, NoCancellationAtLargeRadius)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.5);
    BarrierSpec s = BarrierSpec::supersolution(P, 2);
    for (double t : {50.0, 80.0, 100.0}) {
        const double r = normalized_barrier_residual(s, t);
        EXPECT_TRUE(std::isfinite(r));
        EXPECT_GE(r, 0.0);
    }
}

TEST(ClosedForms, SpecValidation)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.5);
    EXPECT_THROW(BarrierSpec::supersolution(P, 1), DomainError);
    EXPECT_THROW(BarrierSpec::weak_envelope(P, 0.0), DomainError);
    EXPECT_THROW(BarrierSpec::weak_envelope(P, 0.6), DomainError);
    EXPECT_THROW(barrier_residual(BarrierSpec::subsolution(P), 0.0), DomainError);
    EXPECT_THROW(subsolution_residual(BarrierSpec::supersolution(P, 2), 1.0), DomainError);
}

TEST(ClosedForms, GeometricGridEndpoints)
{
    auto g = geometric_grid(1e-2, 100.0, 400.0);
    EXPECT_EQ(g.size(), 1601u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-2);
    EXPECT_DOUBLE_EQ(g.back(), 100.0);
}

TEST(ClosedForms, BarrierProfileConsistent)
{
    const ProblemParams P = ProblemParams::make(3, 2.0, 4.0, 0.0);
    std::vector<double> g{0.0, 0.5, 1.0, 2.0};
    RadialProfile pr = barrier_profile(BarrierSpec::supersolution(P, 2), g);
    EXPECT_EQ(pr.size(), 4u);
    EXPECT_DOUBLE_EQ(pr.u[0], 1.0);
    EXPECT_NO_THROW(pr.validate());
}
