#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hyperlap/numerics.hpp"
#include "hyperlap/residual.hpp"

using namespace hyperlap;

namespace {

std::vector<double> jittered(std::size_t n, double a, double b, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-0.3, 0.3);
    std::vector<double> t(n);
    const double h = (b - a) / (n - 1);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = a + h * (i + ((i == 0 || i + 1 == n) ? 0.0 : U(rng)));
    return t;
}

} // namespace

TEST(Numerics, SimpsonExactForQuadraticsOnNonuniformGrids)
{
    for (std::size_t n : {5u, 6u, 11u, 12u}) {
        auto t = jittered(n, 0.0, 2.0, static_cast<unsigned>(n));
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i)
            f[i] = 1.0 - 2.0 * t[i] + 3.0 * t[i] * t[i];
        // ∫_0^2 = 2 - 4 + 8
        EXPECT_NEAR(simpson(t, f), 6.0, 1e-12) << n;
    }
}

TEST(Numerics, SimpsonFourthOrderOnSmoothIntegrand)
{
    auto err = [](std::size_t n) {
        std::vector<double> t(n), f(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = static_cast<double>(i) / (n - 1);
            f[i] = std::exp(t[i]);
        }
        return std::abs(simpson(t, f) - (std::exp(1.0) - 1.0));
    };
    EXPECT_GT(err(21) / err(41), 12.0);
}

TEST(Numerics, TrapezoidAndCumulative)
{
    std::vector<double> t{0.0, 0.5, 1.5, 2.0};
    std::vector<double> f{1.0, 2.0, 4.0, 5.0};
    EXPECT_DOUBLE_EQ(trapezoid(t, f), 0.75 + 3.0 + 2.25);
    auto c = cumulative_trapezoid(t, f);
    EXPECT_DOUBLE_EQ(c.front(), 0.0);
    EXPECT_DOUBLE_EQ(c.back(), trapezoid(t, f));
}

TEST(Numerics, DerivativesExactOnPolynomials)
{
    auto t = jittered(30, 0.0, 3.0, 7);
    std::vector<double> f(t.size()), g(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        f[i] = std::pow(t[i], 4) - t[i];
        g[i] = t[i] * t[i];
    }
    auto d5 = derivative5(t, f);
    auto d3 = derivative3(t, g);
    for (std::size_t i = 0; i < t.size(); ++i) {
        EXPECT_NEAR(d5[i], 4.0 * std::pow(t[i], 3) - 1.0, 1e-8);
        EXPECT_NEAR(d3[i], 2.0 * t[i], 1e-10);
    }
}

TEST(Numerics, FornbergWeightsCentral)
{
    auto w = fd_weights_d1<5>(0.0, std::array<double, 5>{-2.0, -1.0, 0.0, 1.0, 2.0});
    EXPECT_NEAR(w[0], 1.0 / 12, 1e-14);
    EXPECT_NEAR(w[1], -8.0 / 12, 1e-14);
    EXPECT_NEAR(w[2], 0.0, 1e-14);
    EXPECT_NEAR(w[3], 8.0 / 12, 1e-14);
    EXPECT_NEAR(w[4], -1.0 / 12, 1e-14);
}

TEST(Numerics, LineFit)
{
    std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    LineFit l = fit_line(x, y);
    EXPECT_NEAR(l.slope, 2.0, 1e-14);
    EXPECT_NEAR(l.intercept, 1.0, 1e-14);
}

TEST(Numerics, GridValidation)
{
    std::vector<double> bad{0.0, 1.0, 1.0};
    std::vector<double> f{1.0, 2.0, 3.0};
    EXPECT_THROW(require_increasing(bad), GridError);
    EXPECT_THROW(simpson(bad, f), GridError);
    std::vector<double> short_f{1.0};
    std::vector<double> t{0.0, 1.0};
    EXPECT_THROW(trapezoid(t, short_f), GridError);
}

TEST(Residual, ReportConsistency)
{
    std::vector<double> g{0.0, 1.0, 2.0};
    ResidualReport r = ResidualReport::from(g, {1.0, -3.0, 2.0});
    EXPECT_DOUBLE_EQ(r.max_abs, 3.0);
    EXPECT_EQ(r.argmax(), 1u);
    EXPECT_NEAR(r.l2, std::sqrt(0.5 * (1 + 9) + 0.5 * (9 + 4)), 1e-14);
    EXPECT_FALSE(r.sign_ok.has_value());
}
