#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace relpend {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Zero-mean T-periodic forcing
///
///   f(t) = sum_k c_k cos(k w t) + s_k sin(k w t),   w = 2 pi / T,  k = 1..K
///
/// There is no constant term, so the mean over a period vanishes by construction.
class ForcingSeries {
public:
    ForcingSeries() = default;
    ForcingSeries(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs);

    [[nodiscard]] const std::vector<double>& cos_coeffs() const noexcept { return cos_; }
    [[nodiscard]] const std::vector<double>& sin_coeffs() const noexcept { return sin_; }

    /// Highest harmonic carried by either coefficient list.
    [[nodiscard]] std::size_t harmonics() const noexcept;
    [[nodiscard]] bool is_zero() const noexcept;

    [[nodiscard]] double value(double t, double period) const noexcept;

    /// sum_k |c_k| + |s_k|, an upper bound for max_t |f(t)|.
    [[nodiscard]] double sup_norm_bound() const noexcept;

    [[nodiscard]] ForcingSeries scaled(double factor) const;

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Gravity coefficient a, period T, winding number N and forcing f.
///
/// The drift speed K = 2 N pi / T is derived once at construction.
/// a = 0 is accepted (free rotator) for testing against closed forms.
class PendulumParams {
public:
    PendulumParams(double a, double period, int winding, ForcingSeries forcing = {});

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] int winding() const noexcept { return winding_; }
    [[nodiscard]] const ForcingSeries& forcing() const noexcept { return forcing_; }
    [[nodiscard]] double drift() const noexcept { return drift_; }

    /// True when a == 0: outside the pendulum's physical hypotheses.
    [[nodiscard]] bool is_free_rotator() const noexcept { return a_ == 0.0; }

    [[nodiscard]] double forcing_at(double t) const noexcept { return forcing_.value(t, period_); }

    /// pi^2 / T^2, the largest a for which the period map is guaranteed to twist.
    [[nodiscard]] double twist_threshold() const noexcept;

    [[nodiscard]] PendulumParams with_forcing(ForcingSeries forcing) const;

private:
    double a_;
    double period_;
    int winding_;
    ForcingSeries forcing_;
    double drift_;
};

/// Point on the lifted cylinder in co-moving coordinates: q = x - K t and p the
/// relativistic momentum.
struct CylinderState {
    double q = 0.0;
    double p = 0.0;

    friend bool operator==(const CylinderState&, const CylinderState&) = default;
};

/// Pendulum angle and velocity in the laboratory frame.
struct LabState {
    double x = 0.0;
    double v = 0.0;
};

struct VectorField {
    double dq = 0.0;
    double dp = 0.0;
};

[[nodiscard]] double drift_speed(const PendulumParams& params) noexcept;

/// |2 N pi / T| < 1, strict.
[[nodiscard]] bool admissible(const PendulumParams& params) noexcept;

/// p = v / sqrt(1 - v^2); throws DomainError unless |v| < 1.
[[nodiscard]] double to_momentum(double v);

/// v = p / sqrt(1 + p^2)
[[nodiscard]] double to_velocity(double p) noexcept;

[[nodiscard]] VectorField vector_field(const PendulumParams& params, double t,
                                       const CylinderState& s) noexcept;

/// sqrt(p^2 + 1) - K p - a cos(q + K t) - f(t) q
[[nodiscard]] double hamiltonian(const PendulumParams& params, double t,
                                 const CylinderState& s) noexcept;

/// 1/sqrt(1 - v^2) - a cos x + a; throws DomainError unless |v| < 1.
[[nodiscard]] double energy(double a, const LabState& s);

[[nodiscard]] LabState to_lab(const PendulumParams& params, double t, const CylinderState& s) noexcept;
[[nodiscard]] CylinderState to_cylinder(const PendulumParams& params, double t, const LabState& s);

}  // namespace relpend
