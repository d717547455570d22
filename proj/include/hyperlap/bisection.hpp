#ifndef HYPERLAP_BISECTION_HPP
#define HYPERLAP_BISECTION_HPP

#include <cmath>
#include <stdexcept>

namespace hyperlap {

struct BisectionResult {
    double root = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int iterations = 0;
};

// Bracketed bisection on a continuous g with g(lo)·g(hi) ≤ 0.
// Runs until the bracket is below abs_tol or cannot shrink further.
template <class G>
BisectionResult bisect(G&& g, double lo, double hi, double abs_tol = 0.0, int max_iter = 2000)
{
    if (!(lo < hi))
        throw std::invalid_argument("bisect: empty bracket");
    double glo = g(lo);
    double ghi = g(hi);
    if (glo == 0.0)
        return {lo, lo, lo, 0};
    if (ghi == 0.0)
        return {hi, hi, hi, 0};
    if ((glo > 0.0) == (ghi > 0.0))
        throw std::invalid_argument("bisect: endpoints do not bracket a sign change");
    int it = 0;
    for (; it < max_iter; ++it) {
        double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi || hi - lo <= abs_tol)
            break;
        double gm = g(mid);
        if (gm == 0.0)
            return {mid, mid, mid, it + 1};
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return {lo + 0.5 * (hi - lo), lo, hi, it};
}

} // namespace hyperlap

#endif
