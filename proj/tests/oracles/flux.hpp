#pragma once

#include <cmath>
#include <vector>

namespace oracle {

// F(t) = -∫_0^t sinh^{n-1}(s)(λu^{p-1} + u^{q-1}) ds by the trapezoid rule on the given samples.
inline std::vector<double> flux_by_trapezoid(const std::vector<double>& t, const std::vector<double>& u, int n,
                                             double p, double q, double lambda)
{
    std::vector<double> F(t.size(), 0.0);
    auto integrand = [&](std::size_t i) {
        const double a = std::max(u[i], 0.0);
        return std::pow(std::sinh(t[i]), n - 1) * (lambda * std::pow(a, p - 1.0) + std::pow(a, q - 1.0));
    };
    // Leading-order start: ∫_0^{t0} ≈ g(u0) t0^n / n.
    F[0] = -(lambda * std::pow(u[0], p - 1.0) + std::pow(u[0], q - 1.0)) * std::pow(t[0], n) / n;
    for (std::size_t i = 1; i < t.size(); ++i)
        F[i] = F[i - 1] - 0.5 * (t[i] - t[i - 1]) * (integrand(i) + integrand(i - 1));
    return F;
}

} // namespace oracle
