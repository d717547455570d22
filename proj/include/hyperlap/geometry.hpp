#ifndef HYPERLAP_GEOMETRY_HPP
#define HYPERLAP_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "exponents.hpp"

namespace hyperlap {

using Vec = std::vector<double>;

class GeometryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class MapsToInfinity : public GeometryError {
public:
    MapsToInfinity() : GeometryError("point maps to the point at infinity") {}
};

inline constexpr double kBoundaryTol = 1e-12;
inline constexpr std::uint64_t kDefaultSeed = 20240601ULL;

namespace vec {

inline void same_dim(const Vec& a, const Vec& b)
{
    if (a.size() != b.size())
        throw GeometryError("dimension mismatch: " + std::to_string(a.size()) + " vs "
                            + std::to_string(b.size()));
}

inline double dot(const Vec& a, const Vec& b)
{
    same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double dist2(const Vec& a, const Vec& b)
{
    same_dim(a, b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

inline Vec axpy(double s, const Vec& x, const Vec& y)
{
    same_dim(x, y);
    Vec r(y);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] += s * x[i];
    return r;
}

inline Vec unit(std::size_t n, std::size_t k)
{
    Vec e(n, 0.0);
    e.at(k) = 1.0;
    return e;
}

} // namespace vec

struct BallPoint {
    Vec x;

    static BallPoint make(Vec x)
    {
        if (x.size() < 2)
            throw GeometryError("ball point needs dimension >= 2");
        if (1.0 - vec::norm(x) < kBoundaryTol)
            throw GeometryError("ball point on or outside the unit sphere");
        return BallPoint{std::move(x)};
    }
    std::size_t dim() const { return x.size(); }
};

struct HalfSpacePoint {
    Vec x;

    static HalfSpacePoint make(Vec x)
    {
        if (x.size() < 2)
            throw GeometryError("half-space point needs dimension >= 2");
        if (!(x.back() > 0.0))
            throw GeometryError("half-space point needs x_n > 0");
        return HalfSpacePoint{std::move(x)};
    }
    std::size_t dim() const { return x.size(); }
};

struct BoundaryDirection {
    Vec xi;

    static BoundaryDirection make(Vec xi)
    {
        if (std::abs(vec::norm(xi) - 1.0) > 1e-14)
            throw GeometryError("boundary direction must be a unit vector");
        return BoundaryDirection{std::move(xi)};
    }
    std::size_t dim() const { return xi.size(); }
};

struct OrthogonalSphere {
    Vec center;
    double radius = 0.0;

    static OrthogonalSphere make(Vec center)
    {
        double c2 = vec::norm2(center);
        if (!(c2 > 1.0))
            throw GeometryError("orthogonal sphere center must lie outside the closed ball");
        double r = std::sqrt(c2 - 1.0);
        return OrthogonalSphere{std::move(center), r};
    }

    // Moving-plane sphere T_mu(xi), 0 < mu < 1.
    static OrthogonalSphere moving_plane(const BoundaryDirection& xi, double mu)
    {
        if (!(mu > 0.0 && mu < 1.0))
            throw GeometryError("moving-plane parameter must be in (0,1)");
        Vec c(xi.xi);
        for (double& v : c)
            v /= mu;
        return make(std::move(c));
    }

    double orthogonality_defect() const { return radius * radius - (vec::norm2(center) - 1.0); }

    // |x - c|^2 - r^2: negative inside the sphere, positive outside.
    double side(const Vec& x) const { return vec::dist2(x, center) - radius * radius; }
};

inline double geodesic_distance_ball(const BallPoint& x, const BallPoint& y)
{
    vec::same_dim(x.x, y.x);
    double num = std::sqrt(vec::dist2(x.x, y.x));
    double den = std::sqrt((1.0 - vec::norm2(x.x)) * (1.0 - vec::norm2(y.x)));
    return 2.0 * std::asinh(num / den);
}

inline double geodesic_distance_halfspace(const HalfSpacePoint& x, const HalfSpacePoint& y)
{
    vec::same_dim(x.x, y.x);
    double d2 = vec::dist2(x.x, y.x);
    // acosh(1+z) = log1p(z + sqrt(z(z+2))) keeps precision for close points.
    double z = d2 / (2.0 * x.x.back() * y.x.back());
    return std::log1p(z + std::sqrt(z * (z + 2.0)));
}

inline double geodesic_radius(const BallPoint& x)
{
    double r = vec::norm(x.x);
    return std::log((1.0 + r) / (1.0 - r));
}

enum class Chart { ball, halfspace };

inline double conformal_gradient_factor(const BallPoint& x) { return 0.5 * (1.0 - vec::norm2(x.x)); }
inline double conformal_gradient_factor(const HalfSpacePoint& x) { return x.x.back(); }

inline double conformal_gradient_factor(Chart chart, const Vec& x)
{
    return chart == Chart::ball ? conformal_gradient_factor(BallPoint::make(x))
                                : conformal_gradient_factor(HalfSpacePoint::make(x));
}

// Phi(x) = -e_n + 2(x + e_n)/|x + e_n|^2, an involution swapping the two charts.
inline Vec cayley_map(const Vec& x)
{
    const std::size_t n = x.size();
    Vec s(x);
    s[n - 1] += 1.0;
    double s2 = vec::norm2(s);
    if (s2 < 1e-28)
        throw MapsToInfinity();
    Vec r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = 2.0 * s[i] / s2;
    r[n - 1] -= 1.0;
    return r;
}

inline HalfSpacePoint ball_to_halfspace(const BallPoint& x) { return HalfSpacePoint::make(cayley_map(x.x)); }
inline BallPoint halfspace_to_ball(const HalfSpacePoint& y) { return BallPoint::make(cayley_map(y.x)); }

// Boundary directions other than -e_n land on the plane x_n = 0.
inline Vec ball_to_halfspace(const BoundaryDirection& xi)
{
    Vec r = cayley_map(xi.xi);
    r.back() = 0.0;
    return r;
}

inline Vec reflect_sphere(const OrthogonalSphere& s, const Vec& x)
{
    double d2 = vec::dist2(x, s.center);
    if (d2 == 0.0)
        throw GeometryError("reflection of the sphere center");
    Vec r(x.size());
    const double k = s.radius * s.radius / d2;
    for (std::size_t i = 0; i < x.size(); ++i)
        r[i] = s.center[i] + k * (x[i] - s.center[i]);
    return r;
}

inline BallPoint reflect_sphere(const OrthogonalSphere& s, const BallPoint& x)
{
    return BallPoint{reflect_sphere(s, x.x)};
}

// Reflection across the totally geodesic hyperplane through 0 orthogonal to xi.
inline BallPoint reflect_hyperplane(const BoundaryDirection& xi, const BallPoint& x)
{
    return BallPoint{vec::axpy(-2.0 * vec::dot(x.x, xi.xi), xi.xi, x.x)};
}

enum class ReflectionVerdict { ok, equality, violation };

inline const char* to_string(ReflectionVerdict v)
{
    switch (v) {
    case ReflectionVerdict::ok: return "ok";
    case ReflectionVerdict::equality: return "equality";
    default: return "violation";
    }
}

struct ReflectionCheck {
    ReflectionVerdict verdict = ReflectionVerdict::ok;
    double direct = 0.0;
    double reflected = 0.0;
};

// Observer P and object E on the same closed side of the sphere;
// compares dist(P,E) with dist(P',E).
inline ReflectionCheck reflection_distance_check(const OrthogonalSphere& s, const BallPoint& observer,
                                                 const BallPoint& object, double sphere_tol = 1e-9)
{
    double so = s.side(object.x);
    if (std::abs(so) <= sphere_tol * (1.0 + s.radius * s.radius))
        throw GeometryError("object lies on the reflecting sphere");
    double sp = s.side(observer.x);
    double obs_dist = std::abs(std::sqrt(vec::dist2(observer.x, s.center)) - s.radius);
    if (obs_dist > sphere_tol && (sp > 0.0) != (so > 0.0))
        throw GeometryError("observer and object on opposite sides of the sphere");
    ReflectionCheck out;
    BallPoint mirrored = reflect_sphere(s, observer);
    out.direct = geodesic_distance_ball(observer, object);
    out.reflected = geodesic_distance_ball(mirrored, object);
    if (obs_dist <= sphere_tol)
        out.verdict = ReflectionVerdict::equality;
    else if (out.direct <= out.reflected + 1e-12 * (1.0 + out.reflected))
        out.verdict = ReflectionVerdict::ok;
    else
        out.verdict = ReflectionVerdict::violation;
    return out;
}

inline double eigen_profile(const BoundaryDirection& xi, const BallPoint& x, double exponent)
{
    vec::same_dim(xi.xi, x.x);
    double base = (1.0 - vec::norm2(x.x)) / vec::dist2(x.x, xi.xi);
    return std::pow(base, exponent);
}

// Same profile written in geodesic polar coordinates (r, theta) about 0.
inline double eigen_profile_polar(const BoundaryDirection& xi, double r, const Vec& theta, double exponent)
{
    return std::pow(std::cosh(r) - vec::dot(xi.xi, theta) * std::sinh(r), -exponent);
}

// Euclidean central-difference gradient in the ball chart.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h = 1e-5)
{
    Vec g(x.size());
    Vec y(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        double fp = f(y);
        y[i] = x[i] - h;
        double fm = f(y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

inline double eigen_log_gradient(const BoundaryDirection& xi, const BallPoint& x, double exponent,
                                 double h = 1e-5)
{
    auto E = [&](const Vec& y) {
        return std::pow((1.0 - vec::norm2(y)) / vec::dist2(y, xi.xi), exponent);
    };
    Vec g = fd_gradient(E, x.x, h);
    return conformal_gradient_factor(x) * vec::norm(g) / E(x.x);
}

// Sampling helpers.
inline Vec random_unit(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> N(0.0, 1.0);
    Vec v(n);
    double s = 0.0;
    do {
        for (double& c : v)
            c = N(rng);
        s = vec::norm(v);
    } while (s < 1e-8);
    for (double& c : v)
        c /= s;
    return v;
}

// Ball point with hyperbolic radius uniform in [0, r_max].
inline BallPoint random_ball_point(std::size_t n, std::mt19937_64& rng, double r_max = 4.0)
{
    std::uniform_real_distribution<double> U(0.0, r_max);
    Vec d = random_unit(n, rng);
    double rho = std::tanh(0.5 * U(rng));
    for (double& c : d)
        c *= rho;
    return BallPoint::make(std::move(d));
}

inline OrthogonalSphere random_orthogonal_sphere(std::size_t n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.05, 0.95);
    return OrthogonalSphere::moving_plane(BoundaryDirection{random_unit(n, rng)}, U(rng));
}

struct GeometrySuiteReport {
    std::size_t samples = 0;
    double involution_max_err = 0.0;
    double isometry_max_err = 0.0;
    double distance_identity_max_err = 0.0;
    std::size_t reflection_checks = 0;
    std::size_t reflection_violations = 0;
    std::size_t reflection_equalities = 0;
};

// Seeded Monte Carlo over dimensions 2..5; errors are relative to 1 + |value|.
inline GeometrySuiteReport geometry_monte_carlo(std::size_t samples, std::uint64_t seed = kDefaultSeed)
{
    std::mt19937_64 rng(seed);
    GeometrySuiteReport r;
    r.samples = samples;
    auto rel = [](double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); };
    for (std::size_t k = 0; k < samples; ++k) {
        const std::size_t n = 2 + k % 4;
        BallPoint x = random_ball_point(n, rng);
        BallPoint y = random_ball_point(n, rng);
        Vec back = cayley_map(cayley_map(x.x));
        r.involution_max_err = std::max(r.involution_max_err, std::sqrt(vec::dist2(back, x.x)));

        const double d = geodesic_distance_ball(x, y);
        const double dh = geodesic_distance_halfspace(ball_to_halfspace(x), ball_to_halfspace(y));
        r.distance_identity_max_err = std::max(r.distance_identity_max_err, rel(dh, d));

        OrthogonalSphere s = random_orthogonal_sphere(n, rng);
        const double dr = geodesic_distance_ball(reflect_sphere(s, x), reflect_sphere(s, y));
        r.isometry_max_err = std::max(r.isometry_max_err, rel(dr, d));

        // Put the object on the observer's side, away from the sphere.
        BallPoint object = y;
        if ((s.side(object.x) > 0.0) != (s.side(x.x) > 0.0))
            object = reflect_sphere(s, object);
        if (std::abs(s.side(object.x)) <= 1e-6 || std::abs(s.side(x.x)) <= 1e-6)
            continue;
        ReflectionCheck c = reflection_distance_check(s, x, object);
        ++r.reflection_checks;
        if (c.verdict == ReflectionVerdict::violation)
            ++r.reflection_violations;
        if (c.verdict == ReflectionVerdict::equality)
            ++r.reflection_equalities;
    }
    return r;
}

} // namespace hyperlap

#endif
