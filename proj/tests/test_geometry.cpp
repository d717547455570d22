#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hyperlap/geometry.hpp"

using namespace hyperlap;

TEST(Geometry, CayleyMapBasics)
{
    Vec zero{0.0, 0.0, 0.0};
    Vec img = cayley_map(zero);
    EXPECT_NEAR(img[2], 1.0, 1e-15);
    EXPECT_THROW(cayley_map(Vec{0.0, 0.0, -1.0}), MapsToInfinity);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        BallPoint x = random_ball_point(4, rng);
        HalfSpacePoint y = ball_to_halfspace(x);
        EXPECT_GT(y.x.back(), 0.0);
        BallPoint back = halfspace_to_ball(y);
        EXPECT_LT(std::sqrt(vec::dist2(back.x, x.x)), 1e-14);
    }
}

TEST(Geometry, PointValidation)
{
    EXPECT_THROW(BallPoint::make(Vec{1.0, 0.0}), GeometryError);
    EXPECT_THROW(HalfSpacePoint::make(Vec{0.3, 0.0}), GeometryError);
    EXPECT_THROW(BoundaryDirection::make(Vec{0.5, 0.5}), GeometryError);
    EXPECT_THROW(OrthogonalSphere::make(Vec{0.5, 0.0}), GeometryError);
    EXPECT_THROW(OrthogonalSphere::moving_plane(BoundaryDirection::make(Vec{1.0, 0.0}), 1.0), GeometryError);
}

TEST(Geometry, DistanceFromOriginAndChartAgreement)
{
    BallPoint o = BallPoint::make(Vec{0.0, 0.0, 0.0});
    BallPoint x = BallPoint::make(Vec{0.5, 0.0, 0.0});
    EXPECT_NEAR(geodesic_distance_ball(o, x), std::log(3.0), 1e-14);
    EXPECT_NEAR(geodesic_radius(x), std::log(3.0), 1e-14);
    // Vertical geodesic in the half-space: log of the height ratio.
    HalfSpacePoint a = HalfSpacePoint::make(Vec{0.0, 0.0, 1.0});
    HalfSpacePoint b = HalfSpacePoint::make(Vec{0.0, 0.0, 5.0});
    EXPECT_NEAR(geodesic_distance_halfspace(a, b), std::log(5.0), 1e-14);
    // Close points keep relative precision.
    HalfSpacePoint c = HalfSpacePoint::make(Vec{1e-9, 0.0, 1.0});
    EXPECT_NEAR(geodesic_distance_halfspace(a, c) / 1e-9, 1.0, 1e-6);
}

TEST(Geometry, ReflectionIsInvolutiveIsometry)
{
    std::mt19937_64 rng(3);
    for (int k = 0; k < 500; ++k) {
        OrthogonalSphere s = random_orthogonal_sphere(3, rng);
        EXPECT_NEAR(s.orthogonality_defect(), 0.0, 1e-12);
        BallPoint x = random_ball_point(3, rng), y = random_ball_point(3, rng);
        BallPoint rx = reflect_sphere(s, x);
        EXPECT_LT(vec::norm(rx.x), 1.0);
        EXPECT_LT(std::sqrt(vec::dist2(reflect_sphere(s, rx).x, x.x)), 1e-12);
        const double d = geodesic_distance_ball(x, y);
        EXPECT_NEAR(geodesic_distance_ball(rx, reflect_sphere(s, y)), d, 1e-10 * (1.0 + d));
    }
}

TEST(Geometry, HyperplaneReflection)
{
    BoundaryDirection xi = BoundaryDirection::make(Vec{0.0, 1.0});
    BallPoint x = BallPoint::make(Vec{0.2, 0.3});
    BallPoint r = reflect_hyperplane(xi, x);
    EXPECT_NEAR(r.x[0], 0.2, 1e-15);
    EXPECT_NEAR(r.x[1], -0.3, 1e-15);
}

TEST(Geometry, ReflectionDistanceVerdicts)
{
    BoundaryDirection xi = BoundaryDirection::make(Vec{1.0, 0.0});
    OrthogonalSphere s = OrthogonalSphere::moving_plane(xi, 0.5);
    // Both points on the side containing the origin.
    BallPoint P = BallPoint::make(Vec{-0.2, 0.1});
    BallPoint E = BallPoint::make(Vec{0.1, -0.3});
    ASSERT_GT(s.side(P.x), 0.0);
    ASSERT_GT(s.side(E.x), 0.0);
    ReflectionCheck c = reflection_distance_check(s, P, E);
    EXPECT_EQ(c.verdict, ReflectionVerdict::ok);
    EXPECT_LE(c.direct, c.reflected);
    // Observer on the sphere: equality.
    const double r = s.radius;
    Vec on{s.center[0] - r * std::cos(0.05), r * std::sin(0.05)};
    ASSERT_LT(vec::norm(on), 1.0);
    ReflectionCheck eq = reflection_distance_check(s, BallPoint::make(on), E);
    EXPECT_EQ(eq.verdict, ReflectionVerdict::equality);
    EXPECT_NEAR(eq.direct, eq.reflected, 1e-9);
    // Opposite sides are rejected.
    BallPoint far = BallPoint::make(Vec{0.9, 0.0});
    ASSERT_LT(s.side(far.x), 0.0);
    EXPECT_THROW(reflection_distance_check(s, P, far), GeometryError);
}

TEST(Geometry, EigenProfileForms)
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        BoundaryDirection xi{random_unit(3, rng)};
        BallPoint x = random_ball_point(3, rng);
        const double r = geodesic_radius(x);
        Vec theta = x.x;
        const double nx = vec::norm(theta);
        if (nx < 1e-8)
            continue;
        for (double& c : theta)
            c /= nx;
        const double a = 1.3;
        EXPECT_NEAR(eigen_profile_polar(xi, r, theta, a) / eigen_profile(xi, x, a), 1.0, 1e-10);
        EXPECT_NEAR(eigen_log_gradient(xi, x, a), a, 1e-6);
    }
}

TEST(Geometry, EigenProfileIsHeightPowerInHalfSpace)
{
    BoundaryDirection south = BoundaryDirection::make(Vec{0.0, 0.0, -1.0});
    std::mt19937_64 rng(9);
    for (int k = 0; k < 200; ++k) {
        BallPoint x = random_ball_point(3, rng);
        const double yn = ball_to_halfspace(x).x.back();
        EXPECT_NEAR(eigen_profile(south, x, 1.7) / std::pow(yn, 1.7), 1.0, 1e-11);
    }
}

TEST(Geometry, FiniteDifferenceGradientOfLinearFunction)
{
    auto f = [](const Vec& y) { return 2.0 * y[0] - 3.0 * y[1]; };
    Vec g = fd_gradient(f, Vec{0.1, 0.2});
    EXPECT_NEAR(g[0], 2.0, 1e-9);
    EXPECT_NEAR(g[1], -3.0, 1e-9);
}

TEST(Geometry, MonteCarloSuiteIsCleanAndDeterministic)
{
    GeometrySuiteReport a = geometry_monte_carlo(5000, 42);
    GeometrySuiteReport b = geometry_monte_carlo(5000, 42);
    EXPECT_EQ(a.reflection_violations, 0u);
    EXPECT_LT(a.involution_max_err, 1e-12);
    EXPECT_LT(a.isometry_max_err, 1e-10);
    EXPECT_LT(a.distance_identity_max_err, 1e-10);
    EXPECT_EQ(a.involution_max_err, b.involution_max_err);
    EXPECT_EQ(a.reflection_checks, b.reflection_checks);
}
