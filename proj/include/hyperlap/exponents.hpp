#ifndef HYPERLAP_EXPONENTS_HPP
#define HYPERLAP_EXPONENTS_HPP

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bisection.hpp"

namespace hyperlap {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline std::string fmt_args(int n, double p)
{
    std::ostringstream os;
    os << "(n=" << n << ", p=" << p << ")";
    return os.str();
}

inline void require_np(int n, double p)
{
    if (n < 2 || !(p > 1.0) || !(p < n) || !std::isfinite(p))
        throw DomainError("need n >= 2 and 1 < p < n " + fmt_args(n, p));
}

} // namespace detail

inline double lambda_max(int n, double p)
{
    detail::require_np(n, p);
    return std::pow((n - 1) / p, p);
}

inline double critical_exponent(int n, double p)
{
    detail::require_np(n, p);
    return n * p / (n - p);
}

// |a|^{p-2} a (n-1-(p-1)a), with the removable value 0 at a = 0.
inline double f_aux(double alpha, int n, double p)
{
    if (alpha == 0.0)
        return 0.0;
    return std::pow(std::abs(alpha), p - 2.0) * alpha * ((n - 1) - (p - 1.0) * alpha);
}

// Surface area of the unit sphere S^{n-1}.
inline double sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

struct ProblemParams {
    int n = 3;
    double p = 2.0;
    double q = 4.0;
    double lambda = 0.0;

    static ProblemParams make(int n, double p, double q, double lambda)
    {
        ProblemParams P{n, p, q, lambda};
        P.validate();
        return P;
    }

    double lambda_max() const { return hyperlap::lambda_max(n, p); }
    double p_star() const { return critical_exponent(n, p); }
    bool is_critical() const { return std::abs(q - p_star()) <= 1e-12 * p_star(); }

    void validate() const
    {
        detail::require_np(n, p);
        if (n == 2 && !(p < 2.0))
            throw DomainError("n = 2 requires p < 2");
        const double ps = p_star();
        if (!(q > p) || q > ps * (1.0 + 1e-12))
            throw DomainError("need p < q <= p* = " + std::to_string(ps));
        const double lm = lambda_max();
        if (!(lambda >= 0.0) || !(lambda < lm))
            throw DomainError("need 0 <= lambda < lambda_max = " + std::to_string(lm));
    }
};

struct DecayRoots {
    double beta = 0.0;
    double alpha = 0.0;
};

inline DecayRoots decay_roots(int n, double p, double lambda)
{
    const double lm = lambda_max(n, p);
    if (!(lambda >= 0.0) || !(lambda < lm))
        throw DomainError("decay_roots: need 0 <= lambda < lambda_max");
    const double peak = (n - 1) / p;
    const double top = (n - 1) / (p - 1.0);
    if (lambda == 0.0)
        return {0.0, top};
    auto g = [&](double a) { return f_aux(a, n, p) - lambda; };
    DecayRoots r;
    r.beta = bisect(g, 0.0, peak).root;
    r.alpha = bisect(g, peak, top).root;
    return r;
}

inline DecayRoots decay_roots(const ProblemParams& P)
{
    return decay_roots(P.n, P.p, P.lambda);
}

// Sharp constant in ∫|∇u|^p >= S (∫|u|^{p*})^{p/p*} on R^n (Talenti form).
inline double euclidean_sobolev_constant(int n, double p)
{
    detail::require_np(n, p);
    const double nn = n;
    const double ratio = std::exp(std::lgamma(1.0 + nn / 2.0) + std::lgamma(nn)
                                  - std::lgamma(nn / p) - std::lgamma(1.0 + nn - nn / p));
    const double C = std::pow(std::numbers::pi, -0.5) * std::pow(nn, -1.0 / p)
                     * std::pow((p - 1.0) / (nn - p), 1.0 - 1.0 / p) * std::pow(ratio, 1.0 / nn);
    return std::pow(C, -p);
}

} // namespace hyperlap

#endif
