#pragma once

// Dormand-Prince 5(4) with local extrapolation, FSAL and the order-4 continuous
// extension of Hairer, Norsett & Wanner (the coefficients of DOPRI5).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>

#include "relpend/errors.hpp"

namespace relpend::detail {

template <std::size_t Dim>
using Vec = std::array<double, Dim>;

struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 10'000'000;
    double initial_step = 1e-3;
};

/// One accepted step [t_begin, t_end] together with its interpolant.
template <std::size_t Dim>
class DenseSegment {
public:
    double t_begin = 0.0;
    double t_end = 0.0;
    Vec<Dim> y_begin{};
    Vec<Dim> y_end{};

    [[nodiscard]] Vec<Dim> at(double t) const noexcept {
        const double h = t_end - t_begin;
        const double th = (t - t_begin) / h;
        const double th1 = 1.0 - th;
        Vec<Dim> y{};
        for (std::size_t i = 0; i < Dim; ++i) {
            y[i] = r0_[i] + th * (r1_[i] + th1 * (r2_[i] + th * (r3_[i] + th1 * r4_[i])));
        }
        return y;
    }

    void build(double h, const Vec<Dim>& k1, const Vec<Dim>& k3, const Vec<Dim>& k4,
               const Vec<Dim>& k5, const Vec<Dim>& k6, const Vec<Dim>& k7) noexcept {
        constexpr double d1 = -12715105075.0 / 11282082432.0;
        constexpr double d3 = 87487479700.0 / 32700410799.0;
        constexpr double d4 = -10690763975.0 / 1880347072.0;
        constexpr double d5 = 701980252875.0 / 199316789632.0;
        constexpr double d6 = -1453857185.0 / 822651844.0;
        constexpr double d7 = 69997945.0 / 29380423.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double ydiff = y_end[i] - y_begin[i];
            const double bspl = h * k1[i] - ydiff;
            r0_[i] = y_begin[i];
            r1_[i] = ydiff;
            r2_[i] = bspl;
            r3_[i] = ydiff - h * k7[i] - bspl;
            r4_[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
    }

private:
    Vec<Dim> r0_{}, r1_{}, r2_{}, r3_{}, r4_{};
};

template <std::size_t Dim>
struct IntegrationEnd {
    double t = 0.0;
    Vec<Dim> y{};
    std::size_t steps = 0;
    bool stopped_early = false;
};

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 >= t0).
///
/// `observer(segment)` is called after every accepted step; returning false
/// stops the integration at the end of that step.
template <std::size_t Dim, class Rhs, class Observer>
IntegrationEnd<Dim> dopri5(Rhs&& rhs, double t0, const Vec<Dim>& y0, double t1,
                           const StepControl& ctl, Observer&& observer) {
    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                     a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    IntegrationEnd<Dim> end{t0, y0, 0, false};
    if (t1 <= t0) return end;

    const double span = t1 - t0;
    double h = std::min(std::abs(ctl.initial_step), span);
    if (!(h > 0.0)) h = span * 1e-3;

    Vec<Dim> y = y0;
    double t = t0;
    Vec<Dim> k1 = rhs(t, y);
    Vec<Dim> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{}, ynew{};
    bool last_rejected = false;
    DenseSegment<Dim> seg;

    std::size_t steps = 0;
    while (t < t1) {
        if (steps >= ctl.max_steps) {
            throw IntegrationError("step budget of " + std::to_string(ctl.max_steps) +
                                       " exhausted at t = " + std::to_string(t),
                                   t);
        }
        bool last = false;
        if (t + h >= t1 || t1 - (t + h) < 1e-12 * span) {
            h = t1 - t;
            last = true;
        }

        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_next = last ? t1 : t + h;
        k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < Dim; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(t_next, ynew);
        ++steps;

        double err = 0.0;
        for (std::size_t i = 0; i < Dim; ++i) {
            const double sk = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / sk;
            err += ei * ei;
        }
        err = std::sqrt(err / static_cast<double>(Dim));
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            seg.t_begin = t;
            seg.t_end = t_next;
            seg.y_begin = y;
            seg.y_end = ynew;
            seg.build(h, k1, k3, k4, k5, k6, k7);

            y = ynew;
            k1 = k7;
            t = t_next;

            const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2,
                                          last_rejected ? 1.0 : 10.0);
            last_rejected = false;
            const bool keep_going = observer(static_cast<const DenseSegment<Dim>&>(seg));
            if (!keep_going) {
                end.t = t;
                end.y = y;
                end.steps = steps;
                end.stopped_early = true;
                return end;
            }
            h *= fac;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            last_rejected = true;
        }
    }
    end.t = t;
    end.y = y;
    end.steps = steps;
    return end;
}

template <std::size_t Dim, class Rhs>
IntegrationEnd<Dim> dopri5(Rhs&& rhs, double t0, const Vec<Dim>& y0, double t1, const StepControl& ctl) {
    return dopri5<Dim>(std::forward<Rhs>(rhs), t0, y0, t1, ctl,
                       [](const DenseSegment<Dim>&) { return true; });
}

}  // namespace relpend::detail
