#ifndef HYPERLAP_RK45_HPP
#define HYPERLAP_RK45_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace hyperlap {

template <std::size_t N>
using State = std::array<double, N>;

// Fourth-order continuous extension of one accepted step.
template <std::size_t N>
struct DenseSegment {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State<N>, 5> r{};

    double t1() const { return t0 + h; }

    State<N> eval(double t) const
    {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        return y;
    }
};

struct StepControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double h_init = 1e-4;
    double h_max = 0.5;
    std::size_t max_steps = 2000000;
};

enum class StepStatus { ok, underflow, nonfinite };

// Dormand–Prince 5(4) with FSAL and dense output. Works in either time direction.
template <std::size_t N, class Rhs>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, double t0, const State<N>& y0, double h0)
        : rhs_(rhs), t_(t0), y_(y0), h_(h0)
    {
        k1_ = rhs_(t_, y_);
    }

    double t() const { return t_; }
    const State<N>& y() const { return y_; }
    const DenseSegment<N>& segment() const { return seg_; }
    std::size_t accepted() const { return accepted_; }
    std::size_t rejected() const { return rejected_; }
    double last_h() const { return h_; }

    // Restart from a new state (e.g. after a change of variables).
    void reset(double t0, const State<N>& y0)
    {
        t_ = t0;
        y_ = y0;
        k1_ = rhs_(t_, y_);
    }

    // One accepted step toward t_limit. scale_abs[i] multiplies abs_tol for component i.
    StepStatus advance(double t_limit, const StepControl& ctl, const State<N>& scale_abs)
    {
        const double dir = t_limit >= t_ ? 1.0 : -1.0;
        bool last_rejected = false;
        for (;;) {
            const double nominal = std::min(std::abs(h_), ctl.h_max);
            double h = nominal;
            double remaining = std::abs(t_limit - t_);
            if (h >= remaining || remaining - h < 1e-12 * std::max(1.0, std::abs(t_)))
                h = remaining;
            if (h < 1e-14 * std::max(1.0, std::abs(t_)))
                return StepStatus::underflow;
            h *= dir;

            State<N> k2, k3, k4, k5, k6, k7, y1, tmp;
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a21 * k1_[i]);
            k2 = rhs_(t_ + c2 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            k3 = rhs_(t_ + c3 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            k4 = rhs_(t_ + c4 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = rhs_(t_ + c5 * h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                tmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = rhs_(t_ + h, tmp);
            for (std::size_t i = 0; i < N; ++i)
                y1[i] = y_[i] + h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            k7 = rhs_(t_ + h, y1);

            double err = 0.0;
            bool finite = true;
            for (std::size_t i = 0; i < N; ++i) {
                double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
                double sc = ctl.abs_tol * scale_abs[i] + ctl.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
                if (!std::isfinite(y1[i]) || !std::isfinite(e))
                    finite = false;
                double r = e / sc;
                err += r * r;
            }
            err = std::sqrt(err / N);

            if (!finite) {
                h_ = 0.25 * h;
                ++rejected_;
                last_rejected = true;
                if (std::abs(h_) < 1e-14 * std::max(1.0, std::abs(t_)))
                    return StepStatus::nonfinite;
                continue;
            }
            if (err <= 1.0) {
                seg_.t0 = t_;
                seg_.h = h;
                for (std::size_t i = 0; i < N; ++i) {
                    double ydiff = y1[i] - y_[i];
                    double bspl = h * k1_[i] - ydiff;
                    seg_.r[0][i] = y_[i];
                    seg_.r[1][i] = ydiff;
                    seg_.r[2][i] = bspl;
                    seg_.r[3][i] = ydiff - h * k7[i] - bspl;
                    seg_.r[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                if (last_rejected)
                    fac = std::min(fac, 1.0);
                h_ = std::abs(h) * fac;
                if (std::abs(h) < nominal)
                    h_ = std::max(h_, nominal);
                t_ = (std::abs(t_limit - (t_ + h)) < 1e-12 * std::max(1.0, std::abs(t_))) ? t_limit : t_ + h;
                y_ = y1;
                k1_ = k7;
                ++accepted_;
                return StepStatus::ok;
            }
            h_ = std::abs(h) * std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
            ++rejected_;
            last_rejected = true;
        }
    }

private:
    Rhs rhs_;
    double t_;
    State<N> y_;
    State<N> k1_{};
    double h_;
    DenseSegment<N> seg_{};
    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

} // namespace hyperlap

#endif
