#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hyperlap/exponents.hpp"
#include "oracles/bubble.hpp"
#include "oracles/root_scan.hpp"

using namespace hyperlap;

TEST(Exponents, QuadraticCase)
{
    EXPECT_DOUBLE_EQ(lambda_max(3, 2.0), 1.0);
    EXPECT_DOUBLE_EQ(critical_exponent(3, 2.0), 6.0);
    DecayRoots r = decay_roots(3, 2.0, 0.75);
    EXPECT_NEAR(r.beta, 0.5, 1e-12);
    EXPECT_NEAR(r.alpha, 1.5, 1e-12);
}

TEST(Exponents, LambdaZeroIsExact)
{
    for (auto [n, p] : {std::pair{3, 2.0}, {4, 2.0}, {4, 3.0}, {5, 3.0}, {3, 1.5}}) {
        DecayRoots r = decay_roots(n, p, 0.0);
        EXPECT_EQ(r.beta, 0.0);
        EXPECT_EQ(r.alpha, (n - 1) / (p - 1.0));
    }
}

TEST(Exponents, MatchesBruteForceScan)
{
    for (auto [n, p] : {std::pair{3, 2.0}, {4, 2.0}, {4, 3.0}, {5, 3.0}, {3, 1.5}, {6, 2.5}}) {
        const double lm = lambda_max(n, p);
        for (double frac : {0.05, 0.3, 0.6, 0.9, 0.999}) {
            const double lam = frac * lm;
            auto roots = oracle::decay_roots_scan(n, p, lam);
            ASSERT_EQ(roots.size(), 2u) << n << " " << p << " " << lam;
            DecayRoots r = decay_roots(n, p, lam);
            EXPECT_NEAR(r.beta, roots[0], 1e-9);
            EXPECT_NEAR(r.alpha, roots[1], 1e-9);
            EXPECT_NEAR(f_aux(r.beta, n, p), lam, 1e-12);
            EXPECT_NEAR(f_aux(r.alpha, n, p), lam, 1e-12);
            EXPECT_LT(r.beta, (n - 1) / p);
            EXPECT_GT(r.alpha, (n - 1) / p);
            EXPECT_LE(r.alpha, (n - 1) / (p - 1.0));
        }
    }
}

TEST(Exponents, AuxiliaryFunctionPeak)
{
    const int n = 4;
    const double p = 3.0;
    const double peak = (n - 1) / p;
    EXPECT_NEAR(f_aux(peak, n, p), lambda_max(n, p), 1e-12);
    EXPECT_LT(f_aux(peak * 0.9, n, p), lambda_max(n, p));
    EXPECT_LT(f_aux(peak * 1.1, n, p), lambda_max(n, p));
    EXPECT_EQ(f_aux(0.0, 3, 1.5), 0.0);
}

TEST(Exponents, RejectsInvalidInput)
{
    EXPECT_THROW(decay_roots(3, 2.0, 1.0), DomainError);
    EXPECT_THROW(decay_roots(3, 2.0, -0.1), DomainError);
    EXPECT_THROW(lambda_max(3, 3.0), DomainError);
    EXPECT_THROW(lambda_max(1, 1.5), DomainError);
    EXPECT_THROW(ProblemParams::make(3, 2.0, 7.0, 0.0), DomainError);
    EXPECT_THROW(ProblemParams::make(3, 2.0, 2.0, 0.0), DomainError);
    EXPECT_THROW(ProblemParams::make(2, 2.0, 3.0, 0.0), DomainError);
    EXPECT_NO_THROW(ProblemParams::make(3, 2.0, 6.0, 0.0));
    EXPECT_TRUE(ProblemParams::make(3, 2.0, 6.0, 0.0).is_critical());
}

TEST(Exponents, SphereArea)
{
    EXPECT_NEAR(sphere_area(2), 2.0 * std::numbers::pi, 1e-14);
    EXPECT_NEAR(sphere_area(3), 4.0 * std::numbers::pi, 1e-14);
    EXPECT_NEAR(sphere_area(4), 2.0 * std::numbers::pi * std::numbers::pi, 1e-13);
}

TEST(Exponents, SobolevConstantAgainstBubbleQuadrature)
{
    EXPECT_NEAR(euclidean_sobolev_constant(3, 2.0), 3.0 * std::pow(std::numbers::pi / 2.0, 4.0 / 3.0), 1e-12);
    for (auto [n, p] : {std::pair{3, 2.0}, {4, 2.0}, {4, 3.0}, {5, 1.5}, {5, 3.0}})
        EXPECT_NEAR(euclidean_sobolev_constant(n, p) / oracle::bubble_sobolev_quotient(n, p), 1.0, 1e-8) << n << " " << p;
}
