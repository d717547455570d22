#ifndef HYPERLAP_NUMERICS_HPP
#define HYPERLAP_NUMERICS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hyperlap {

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_increasing(std::span<const double> t)
{
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw GridError("grid not strictly increasing");
}

inline void require_aligned(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size())
        throw GridError("misaligned arrays");
}

// Fornberg weights for the first derivative at x0 over nodes x[0..M).
template <std::size_t M>
std::array<double, M> fd_weights_d1(double x0, const std::array<double, M>& x)
{
    double c[M][2] = {};
    c[0][0] = 1.0;
    double c1 = 1.0;
    double c4 = x[0] - x0;
    for (std::size_t i = 1; i < M; ++i) {
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::array<double, M> w{};
    for (std::size_t i = 0; i < M; ++i)
        w[i] = c[i][1];
    return w;
}

// Five-point derivative on an arbitrary grid; one-sided stencils at the ends.
inline std::vector<double> derivative5(std::span<const double> t, std::span<const double> f)
{
    require_aligned(t, f);
    const std::size_t N = t.size();
    if (N < 5)
        throw GridError("derivative5 needs at least 5 points");
    std::vector<double> d(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t s = i < 2 ? 0 : (i + 3 > N ? N - 5 : i - 2);
        std::array<double, 5> x{t[s], t[s + 1], t[s + 2], t[s + 3], t[s + 4]};
        auto w = fd_weights_d1<5>(t[i], x);
        double acc = 0.0;
        for (std::size_t k = 0; k < 5; ++k)
            acc += w[k] * f[s + k];
        d[i] = acc;
    }
    return d;
}

// Second-order derivative: centered three-point inside, one-sided three-point at the ends.
inline std::vector<double> derivative3(std::span<const double> t, std::span<const double> f)
{
    require_aligned(t, f);
    const std::size_t N = t.size();
    if (N < 3)
        throw GridError("derivative3 needs at least 3 points");
    std::vector<double> d(N);
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t s = i == 0 ? 0 : (i + 1 == N ? N - 3 : i - 1);
        std::array<double, 3> x{t[s], t[s + 1], t[s + 2]};
        auto w = fd_weights_d1<3>(t[i], x);
        d[i] = w[0] * f[s] + w[1] * f[s + 1] + w[2] * f[s + 2];
    }
    return d;
}

inline double trapezoid(std::span<const double> t, std::span<const double> f)
{
    require_aligned(t, f);
    double s = 0.0;
    for (std::size_t i = 1; i < t.size(); ++i)
        s += 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return s;
}

// Composite Simpson on a nonuniform grid (exact for quadratics on each panel pair).
// An odd trailing interval uses the quadratic through the last three nodes.
inline double simpson(std::span<const double> t, std::span<const double> f)
{
    require_aligned(t, f);
    require_increasing(t);
    const std::size_t N = t.size();
    if (N < 2)
        return 0.0;
    if (N == 2)
        return 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    double s = 0.0;
    std::size_t i = 0;
    for (; i + 2 < N; i += 2) {
        double h0 = t[i + 1] - t[i];
        double h1 = t[i + 2] - t[i + 1];
        double H = h0 + h1;
        s += H / 6.0
             * ((2.0 - h1 / h0) * f[i] + (H * H / (h0 * h1)) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
    }
    if (i + 1 < N) {
        double h0 = t[N - 2] - t[N - 3];
        double h1 = t[N - 1] - t[N - 2];
        s += h1 / 6.0
             * (-(h1 * h1) / (h0 * (h0 + h1)) * f[N - 3] + (3.0 + h1 / h0) * f[N - 2]
                + (3.0 * h0 + 2.0 * h1) / (h0 + h1) * f[N - 1]);
    }
    return s;
}

inline std::vector<double> cumulative_trapezoid(std::span<const double> t, std::span<const double> f)
{
    require_aligned(t, f);
    std::vector<double> c(t.size(), 0.0);
    for (std::size_t i = 1; i < t.size(); ++i)
        c[i] = c[i - 1] + 0.5 * (t[i] - t[i - 1]) * (f[i] + f[i - 1]);
    return c;
}

// Least-squares line y = a + b x.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    require_aligned(x, y);
    const double n = static_cast<double>(x.size());
    if (x.size() < 2)
        throw GridError("line fit needs two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    double b = sxy / sxx;
    return {my - b * mx, b};
}

} // namespace hyperlap

#endif
