#ifndef HYPERLAP_RESIDUAL_HPP
#define HYPERLAP_RESIDUAL_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace hyperlap {

struct ResidualReport {
    std::vector<double> grid;
    std::vector<double> pointwise;
    double max_abs = 0.0;
    double l2 = 0.0;
    std::optional<bool> sign_ok;

    // l2 is the trapezoid L² norm over the grid (plain magnitude for a single point).
    static ResidualReport from(std::vector<double> grid, std::vector<double> pointwise)
    {
        ResidualReport r;
        r.grid = std::move(grid);
        r.pointwise = std::move(pointwise);
        for (double v : r.pointwise)
            r.max_abs = std::max(r.max_abs, std::abs(v));
        if (r.pointwise.size() == 1) {
            r.l2 = std::abs(r.pointwise[0]);
        } else {
            double s = 0.0;
            for (std::size_t i = 1; i < r.grid.size(); ++i)
                s += 0.5 * (r.grid[i] - r.grid[i - 1])
                     * (r.pointwise[i] * r.pointwise[i] + r.pointwise[i - 1] * r.pointwise[i - 1]);
            r.l2 = std::sqrt(s);
        }
        return r;
    }

    std::size_t argmax() const
    {
        std::size_t k = 0;
        for (std::size_t i = 0; i < pointwise.size(); ++i)
            if (std::abs(pointwise[i]) > std::abs(pointwise[k]))
                k = i;
        return k;
    }
};

} // namespace hyperlap

#endif
