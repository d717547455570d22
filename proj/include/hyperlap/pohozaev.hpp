#ifndef HYPERLAP_POHOZAEV_HPP
#define HYPERLAP_POHOZAEV_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "numerics.hpp"
#include "radial_ode.hpp"

namespace hyperlap {

struct PohozaevReport {
    double R = 0.0;
    double lhs1 = 0.0, rhs1 = 0.0, res1 = 0.0, scale1 = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0, res2 = 0.0, scale2 = 0.0;
    // ((n-p)/p) ∫ |u'|^{p-2}u'u sinh^n: negative on positive decreasing profiles.
    double contradiction_term = 0.0;
    // Boundary remainder of the combined identity; equals the volume term on solutions.
    double boundary_remainder = 0.0;
    double combined_gap = 0.0;
    // ∫_0^{min(R,1)} u^p sinh^n.
    double contradiction_scale = 0.0;
    // |Simpson - trapezoid| for the volume term.
    double contradiction_quad_error = 0.0;

    double rel1() const { return std::abs(res1) / scale1; }
    double rel2() const { return std::abs(res2) / scale2; }
};

inline void require_pohozaev_params(const ProblemParams& P)
{
    if (P.lambda != 0.0 || !P.is_critical())
        throw DomainError("Pohozaev identities need lambda = 0 and q = p*");
}

// Evaluated at the largest grid radius not exceeding R; boundary terms use the stored flux.
inline PohozaevReport pohozaev_residuals(const RadialProfile& prof, double R, bool check_params = true)
{
    const auto& P = prof.params;
    if (check_params)
        require_pohozaev_params(P);
    const double n = P.n, p = P.p, ps = P.p_star();
    std::size_t k = 0;
    while (k + 1 < prof.size() && prof.t[k + 1] <= R)
        ++k;
    if (k < 4 || prof.t[k] <= 0.0)
        throw GridError("Pohozaev radius too close to the origin for this grid");
    const std::size_t M = k + 1;
    std::vector<double> g1(M), g2(M), g3(M), g4(M);
    for (std::size_t i = 0; i < M; ++i) {
        const double t = prof.t[i];
        const double sh = std::sinh(t);
        const double S = std::pow(sh, n - 1);
        const double u = std::max(prof.u[i], 0.0);
        const double dp = std::pow(std::abs(prof.du[i]), p);
        const double up = std::pow(u, ps);
        g1[i] = (dp - up) * S * std::cosh(t);
        g4[i] = (dp + up) * S * std::cosh(t);
        g2[i] = sh * prof.flux[i] * prof.u[i];
        g3[i] = std::pow(u, p) * sh * S;
    }
    std::span<const double> t(prof.t.data(), M);
    const double I1 = simpson(t, g1);
    const double I2 = simpson(t, g2);
    const double I2_trap = trapezoid(t, g2);
    // Gradient and potential volumes separately; their difference cancels for concentrated profiles.
    const double I1_abs = std::abs((p - n) / p) * simpson(t, g4);

    const double Rk = prof.t[k];
    const double shR = std::sinh(Rk);
    const double uR = prof.u[k];
    const double FR = prof.flux[k];
    const double duR = std::abs(prof.du[k]);
    const double B1 = ((p - 1.0) / p * std::pow(duR, p) + std::pow(std::max(uR, 0.0), ps) / ps) * std::pow(shR, n);
    const double B2 = -FR * std::cosh(Rk) * uR;

    PohozaevReport r;
    r.R = Rk;
    r.lhs1 = (p - n) / p * I1;
    r.rhs1 = B1;
    r.res1 = r.lhs1 - r.rhs1;
    r.scale1 = std::max({std::abs(r.lhs1), std::abs(r.rhs1), I1_abs, 1e-300});
    r.lhs2 = -I1;
    r.rhs2 = I2 + B2;
    r.res2 = r.lhs2 - r.rhs2;
    r.scale2 = std::max({std::abs(r.lhs2), std::abs(I2), std::abs(B2), I1_abs * p / (n - p), 1e-300});
    r.contradiction_term = (n - p) / p * I2;
    r.contradiction_quad_error = (n - p) / p * std::abs(I2 - I2_trap);
    r.boundary_remainder = B1 - (n - p) / p * B2;
    r.combined_gap = r.contradiction_term - r.boundary_remainder;

    std::size_t k1 = 0;
    while (k1 + 1 < M && prof.t[k1 + 1] <= std::min(Rk, 1.0))
        ++k1;
    r.contradiction_scale = simpson(std::span<const double>(prof.t.data(), k1 + 1),
                                    std::span<const double>(g3.data(), k1 + 1));
    return r;
}

// The scale test is meaningful while α^{(q-2)(p-1)} stays of order one.
inline bool contradiction_scale_applies(double alpha, const ProblemParams& P)
{
    return std::pow(alpha, (P.q - 2.0) * (P.p - 1.0)) >= 0.1;
}

// Strictly negative volume term, resolved beyond the quadrature error. The scale test
// applies to O(1) initial heights only; the ratio degenerates like a power of α otherwise.
inline bool contradiction_negative(const PohozaevReport& r, bool scale_check)
{
    if (!(r.contradiction_term < 0.0) || std::abs(r.contradiction_term) <= 100.0 * r.contradiction_quad_error)
        return false;
    return !scale_check || r.contradiction_term <= -1e-3 * r.contradiction_scale;
}

} // namespace hyperlap

#endif
