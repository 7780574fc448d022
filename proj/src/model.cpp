#include "relpend/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relpend/errors.hpp"

namespace relpend {

ForcingSeries::ForcingSeries(std::vector<double> cos_coeffs, std::vector<double> sin_coeffs)
    : cos_(std::move(cos_coeffs)), sin_(std::move(sin_coeffs)) {
    for (double c : cos_) {
        if (!std::isfinite(c)) throw ParameterError("forcing cosine coefficient is not finite");
    }
    for (double s : sin_) {
        if (!std::isfinite(s)) throw ParameterError("forcing sine coefficient is not finite");
    }
}

std::size_t ForcingSeries::harmonics() const noexcept { return std::max(cos_.size(), sin_.size()); }

bool ForcingSeries::is_zero() const noexcept {
    auto zero = [](double c) { return c == 0.0; };
    return std::all_of(cos_.begin(), cos_.end(), zero) && std::all_of(sin_.begin(), sin_.end(), zero);
}

double ForcingSeries::value(double t, double period) const noexcept {
    const double w = kTwoPi / period;
    double f = 0.0;
    for (std::size_t k = 0; k < cos_.size(); ++k) {
        if (cos_[k] != 0.0) f += cos_[k] * std::cos(static_cast<double>(k + 1) * w * t);
    }
    for (std::size_t k = 0; k < sin_.size(); ++k) {
        if (sin_[k] != 0.0) f += sin_[k] * std::sin(static_cast<double>(k + 1) * w * t);
    }
    return f;
}

double ForcingSeries::sup_norm_bound() const noexcept {
    double bound = 0.0;
    for (double c : cos_) bound += std::abs(c);
    for (double s : sin_) bound += std::abs(s);
    return bound;
}

ForcingSeries ForcingSeries::scaled(double factor) const {
    auto c = cos_;
    auto s = sin_;
    for (auto& x : c) x *= factor;
    for (auto& x : s) x *= factor;
    return {std::move(c), std::move(s)};
}

PendulumParams::PendulumParams(double a, double period, int winding, ForcingSeries forcing)
    : a_(a), period_(period), winding_(winding), forcing_(std::move(forcing)) {
    if (!std::isfinite(a) || a < 0.0) throw ParameterError("a must be a finite non-negative number");
    if (!std::isfinite(period) || period <= 0.0) throw ParameterError("T must be finite and positive");
    drift_ = kTwoPi * static_cast<double>(winding_) / period_;
}

double PendulumParams::twist_threshold() const noexcept {
    return std::numbers::pi * std::numbers::pi / (period_ * period_);
}

PendulumParams PendulumParams::with_forcing(ForcingSeries forcing) const {
    return {a_, period_, winding_, std::move(forcing)};
}

double drift_speed(const PendulumParams& params) noexcept { return params.drift(); }

bool admissible(const PendulumParams& params) noexcept { return std::abs(params.drift()) < 1.0; }

double to_momentum(double v) {
    if (!(std::abs(v) < 1.0)) {
        throw DomainError("superluminal velocity |v| = " + std::to_string(std::abs(v)) + " >= 1");
    }
    return v / std::sqrt((1.0 - v) * (1.0 + v));
}

double to_velocity(double p) noexcept { return p / std::sqrt(1.0 + p * p); }

VectorField vector_field(const PendulumParams& params, double t, const CylinderState& s) noexcept {
    const double k = params.drift();
    return {to_velocity(s.p) - k, -params.a() * std::sin(s.q + k * t) + params.forcing_at(t)};
}

double hamiltonian(const PendulumParams& params, double t, const CylinderState& s) noexcept {
    const double k = params.drift();
    return std::sqrt(s.p * s.p + 1.0) - k * s.p - params.a() * std::cos(s.q + k * t) -
           params.forcing_at(t) * s.q;
}

double energy(double a, const LabState& s) {
    if (!(std::abs(s.v) < 1.0)) throw DomainError("energy undefined for |v| >= 1");
    return 1.0 / std::sqrt((1.0 - s.v) * (1.0 + s.v)) - a * std::cos(s.x) + a;
}

LabState to_lab(const PendulumParams& params, double t, const CylinderState& s) noexcept {
    return {s.q + params.drift() * t, to_velocity(s.p)};
}

CylinderState to_cylinder(const PendulumParams& params, double t, const LabState& s) {
    return {s.x - params.drift() * t, to_momentum(s.v)};
}

}  // namespace relpend
