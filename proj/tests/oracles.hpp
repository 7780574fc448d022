#pragma once
// Independent reference computations for the tests. Nothing here calls the
// library's vector field or integrator: the equations of motion are written
// out again and stepped with classical fixed-step RK4.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "relpend/model.hpp"
#include "relpend/poincare.hpp"

namespace oracle {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Problem {
    double a;
    double T;
    int N;
    std::vector<double> c;
    std::vector<double> s;

    explicit Problem(const relpend::PendulumParams& p)
        : a(p.a()), T(p.period()), N(p.winding()), c(p.forcing().cos_coeffs()), s(p.forcing().sin_coeffs()) {}

    double f(double t) const {
        double out = 0.0;
        for (std::size_t k = 0; k < c.size(); ++k) out += c[k] * std::cos((k + 1) * two_pi * t / T);
        for (std::size_t k = 0; k < s.size(); ++k) out += s[k] * std::sin((k + 1) * two_pi * t / T);
        return out;
    }

    // q' = p / sqrt(1 + p^2) - K,  p' = -a sin(q + K t) + f(t)
    std::array<double, 2> rhs(double t, const std::array<double, 2>& y) const {
        const double K = two_pi * N / T;
        return {y[1] / std::sqrt(1.0 + y[1] * y[1]) - K, -a * std::sin(y[0] + K * t) + f(t)};
    }
};

/// Classical RK4 with `steps` equal steps on [t0, t1].
inline std::array<double, 2> rk4(const Problem& pr, std::array<double, 2> y, double t0, double t1, std::size_t steps) {
    const double h = (t1 - t0) / static_cast<double>(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = t0 + h * static_cast<double>(i);
        const auto k1 = pr.rhs(t, y);
        const auto k2 = pr.rhs(t + 0.5 * h, {y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
        const auto k3 = pr.rhs(t + 0.5 * h, {y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
        const auto k4 = pr.rhs(t + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
        y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
    return y;
}

/// Time-T map by RK4 with 10^6 steps.
inline relpend::CylinderState rk4_map(const relpend::PendulumParams& p, const relpend::CylinderState& z,
                                      std::size_t steps = 1'000'000) {
    const auto y = rk4(Problem(p), {z.q, z.p}, 0.0, p.period(), steps);
    return {y[0], y[1]};
}

/// Newton on S(z) - z with a central-difference Jacobian (no monodromy).
inline std::optional<relpend::CylinderState> fd_newton(const relpend::PendulumParams& p, relpend::CylinderState z,
                                                       const relpend::IntegratorConfig& cfg, double tol = 1e-10) {
    auto F = [&](const relpend::CylinderState& w) {
        const auto s = relpend::poincare_map(p, w, cfg);
        return std::array<double, 2>{s.q - w.q, s.p - w.p};
    };
    constexpr double h = 1e-6;
    for (int it = 0; it < 50; ++it) {
        const auto f = F(z);
        if (std::hypot(f[0], f[1]) < 0.1 * tol) return z;
        const auto fqp = F({z.q + h, z.p}), fqm = F({z.q - h, z.p});
        const auto fpp = F({z.q, z.p + h}), fpm = F({z.q, z.p - h});
        const double j11 = (fqp[0] - fqm[0]) / (2 * h), j21 = (fqp[1] - fqm[1]) / (2 * h);
        const double j12 = (fpp[0] - fpm[0]) / (2 * h), j22 = (fpp[1] - fpm[1]) / (2 * h);
        const double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 1e-14)) return std::nullopt;
        const double dq = (j22 * f[0] - j12 * f[1]) / det;
        const double dp = (-j21 * f[0] + j11 * f[1]) / det;
        if (!(std::hypot(dq, dp) < 2.0)) return std::nullopt;
        z.q -= dq;
        z.p -= dp;
    }
    const auto f = F(z);
    if (std::hypot(f[0], f[1]) < tol) return z;
    return std::nullopt;
}

/// Fixed points reached by fd_newton from seeds in [0, 2 pi) x [-p_max, p_max],
/// reduced mod 2 pi and merged when closer than `merge`.
inline std::vector<relpend::CylinderState> multi_start(const relpend::PendulumParams& p, std::size_t n_q, std::size_t n_p,
                                                       double p_max, const relpend::IntegratorConfig& cfg,
                                                       double merge = 1e-6) {
    std::vector<relpend::CylinderState> found;
    for (std::size_t i = 0; i < n_q; ++i) {
        for (std::size_t j = 0; j < n_p; ++j) {
            const relpend::CylinderState seed{two_pi * (i + 0.5) / n_q, -p_max + 2.0 * p_max * (j + 0.5) / n_p};
            auto z = fd_newton(p, seed, cfg);
            if (!z) continue;
            z->q = std::fmod(z->q, two_pi);
            if (z->q < 0.0) z->q += two_pi;
            bool dup = false;
            for (const auto& g : found) {
                double dq = std::abs(g.q - z->q);
                dq = std::min(dq, two_pi - dq);
                if (dq < merge && std::abs(g.p - z->p) < merge) dup = true;
            }
            if (!dup) found.push_back(*z);
        }
    }
    return found;
}

/// Sign changes of P - gamma(Q) along S(Gamma) sampled at n points of the
/// analytic curve gamma, walked once around the loop.
inline std::size_t dense_intersections(const relpend::PendulumParams& p, const std::function<double(double)>& gamma,
                                       std::size_t n, const relpend::IntegratorConfig& cfg) {
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = two_pi * static_cast<double>(i) / static_cast<double>(n);
        const auto s = relpend::poincare_map(p, {q, gamma(q)}, cfg);
        d[i] = s.p - gamma(s.q);
    }
    std::size_t changes = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if ((d[i] < 0.0) != (d[(i + 1) % n] < 0.0)) ++changes;
    }
    return changes;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace oracle
