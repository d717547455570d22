#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Sparse>

namespace oracle {

struct CollocationResult {
    std::vector<double> t;
    std::vector<double> u;
    int iterations = 0;
    bool converged = false;
};

// Newton on second-order differences for -u'' - (n-1)coth(t)u' - λu = u^{q-1} (p = 2),
// u'(0) = 0 by symmetry and the Robin condition u' = -α_λ u at t = L.
inline CollocationResult ground_state_collocation(int n, double q, double lambda, double alpha_decay, double L,
                                                  std::size_t N, std::vector<double> guess)
{
    const double h = L / static_cast<double>(N - 1);
    CollocationResult r;
    r.t.resize(N);
    for (std::size_t i = 0; i < N; ++i)
        r.t[i] = h * static_cast<double>(i);
    std::vector<double> u = std::move(guess);
    for (int it = 0; it < 60; ++it) {
        Eigen::VectorXd G(N);
        std::vector<Eigen::Triplet<double>> J;
        for (std::size_t i = 0; i < N; ++i) {
            const double ui = u[i];
            const double nl = lambda * ui + std::pow(std::max(ui, 0.0), q - 1.0);
            const double dnl = lambda + (q - 1.0) * std::pow(std::max(ui, 0.0), q - 2.0);
            if (i == 0) {
                // Near 0 the operator tends to -n u''.
                G[0] = -n * 2.0 * (u[1] - u[0]) / (h * h) - nl;
                J.emplace_back(0, 0, 2.0 * n / (h * h) - dnl);
                J.emplace_back(0, 1, -2.0 * n / (h * h));
            } else if (i == N - 1) {
                G[i] = (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * h) + alpha_decay * u[i];
                J.emplace_back(i, i, 3.0 / (2.0 * h) + alpha_decay);
                J.emplace_back(i, i - 1, -4.0 / (2.0 * h));
                J.emplace_back(i, i - 2, 1.0 / (2.0 * h));
            } else {
                const double c = (n - 1) / std::tanh(r.t[i]);
                G[i] = -(u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h) - c * (u[i + 1] - u[i - 1]) / (2.0 * h) - nl;
                J.emplace_back(i, i - 1, -1.0 / (h * h) + c / (2.0 * h));
                J.emplace_back(i, i, 2.0 / (h * h) - dnl);
                J.emplace_back(i, i + 1, -1.0 / (h * h) - c / (2.0 * h));
            }
        }
        Eigen::SparseMatrix<double> A(N, N);
        A.setFromTriplets(J.begin(), J.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        Eigen::VectorXd d = lu.solve(-G);
        double dmax = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            u[i] += d[i];
            dmax = std::max(dmax, std::abs(d[i]));
        }
        r.iterations = it + 1;
        if (dmax < 1e-12 * std::max(1.0, std::abs(u[0]))) {
            r.converged = true;
            break;
        }
    }
    r.u = std::move(u);
    return r;
}

} // namespace oracle
