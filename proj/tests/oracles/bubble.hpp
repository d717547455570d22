#pragma once

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace oracle {

// Sobolev quotient of the Euclidean bubble (1 + r^{p/(p-1)})^{-(n-p)/p} by quadrature.
inline double bubble_sobolev_quotient(int n, double p)
{
    const double ps = n * p / (n - p);
    const double m = p / (p - 1.0);
    const double e = (n - p) / p;
    auto U = [&](double r) { return std::pow(1.0 + std::pow(r, m), -e); };
    auto dU = [&](double r) { return -e * m * std::pow(r, m - 1.0) * std::pow(1.0 + std::pow(r, m), -e - 1.0); };
    auto finite = [](auto g) {
        return [g](double r) {
            const double v = g(r);
            return std::isfinite(v) ? v : 0.0;
        };
    };
    boost::math::quadrature::exp_sinh<double> I;
    const double w = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
    const double num = w * I.integrate(finite([&](double r) { return std::pow(std::abs(dU(r)), p) * std::pow(r, n - 1); }));
    const double den = w * I.integrate(finite([&](double r) { return std::pow(U(r), ps) * std::pow(r, n - 1); }));
    return num / std::pow(den, p / ps);
}

} // namespace oracle
