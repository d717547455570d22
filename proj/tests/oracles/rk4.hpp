#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace oracle {

struct Rk4Sample {
    double t;
    double u;
};

// Fixed-step classical RK4 on (u, F), F = sinh^{n-1}|u'|^{p-2}u', from a two-term series at t0.
inline std::vector<Rk4Sample> radial_rk4(double alpha, int n, double p, double q, double lambda, double t_end,
                                         double h = 1e-4, double t0 = 1e-3)
{
    auto g = [&](double u) {
        const double a = std::max(u, 0.0);
        return lambda * std::pow(a, p - 1.0) + std::pow(a, q - 1.0);
    };
    auto rhs = [&](double t, const std::array<double, 2>& y) {
        const double S = std::pow(std::sinh(t), n - 1);
        const double F = y[1];
        const double du = F == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(F) / S, 1.0 / (p - 1.0)), F);
        return std::array<double, 2>{du, -S * g(y[0])};
    };
    // F ≈ -g(α) t^n / n and u ≈ α - ((p-1)/p)(g(α)/n)^{1/(p-1)} t^{p/(p-1)} near the origin.
    const double ga = g(alpha);
    std::array<double, 2> y{alpha - (p - 1.0) / p * std::pow(ga / n, 1.0 / (p - 1.0)) * std::pow(t0, p / (p - 1.0)),
                            -ga * std::pow(t0, n) / n};
    std::vector<Rk4Sample> out{{t0, y[0]}};
    double t = t0;
    while (t < t_end - 1e-12) {
        const double s = std::min(h, t_end - t);
        auto k1 = rhs(t, y);
        std::array<double, 2> y2{y[0] + 0.5 * s * k1[0], y[1] + 0.5 * s * k1[1]};
        auto k2 = rhs(t + 0.5 * s, y2);
        std::array<double, 2> y3{y[0] + 0.5 * s * k2[0], y[1] + 0.5 * s * k2[1]};
        auto k3 = rhs(t + 0.5 * s, y3);
        std::array<double, 2> y4{y[0] + s * k3[0], y[1] + s * k3[1]};
        auto k4 = rhs(t + s, y4);
        for (int i = 0; i < 2; ++i)
            y[i] += s / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        t += s;
        out.push_back({t, y[0]});
    }
    return out;
}

} // namespace oracle
