#include "relpend/integrate.hpp"

#include <cmath>

#include "relpend/dopri.hpp"
#include "relpend/errors.hpp"

namespace relpend {

using detail::Vec;

namespace {

detail::StepControl step_control(const PendulumParams& params, const IntegratorConfig& cfg) {
    cfg.validate();
    return {cfg.rtol, cfg.atol, cfg.max_steps, cfg.initial_step.value_or(params.period() / 1000.0)};
}

void check_interval(double t0, double t1) {
    if (!(t1 >= t0)) throw ParameterError("integration interval must satisfy t1 >= t0");
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0) || !(atol > 0.0)) throw ParameterError("integrator tolerances must be positive");
    if (max_steps < 1) throw ParameterError("integrator max_steps must be at least 1");
    if (initial_step && !(*initial_step > 0.0)) throw ParameterError("initial_step must be positive");
}

IntegratorConfig IntegratorConfig::tightened(double factor) const {
    IntegratorConfig out = *this;
    out.rtol /= factor;
    out.atol /= factor;
    return out;
}

CylinderState flow(const PendulumParams& params, const CylinderState& s0, double t0, double t1,
                   const IntegratorConfig& cfg) {
    check_interval(t0, t1);
    const auto ctl = step_control(params, cfg);
    auto rhs = [&params](double t, const Vec<2>& y) {
        const auto f = vector_field(params, t, {y[0], y[1]});
        return Vec<2>{f.dq, f.dp};
    };
    const auto end = detail::dopri5<2>(rhs, t0, Vec<2>{s0.q, s0.p}, t1, ctl);
    return {end.y[0], end.y[1]};
}

TangentFlowResult flow_with_tangent(const PendulumParams& params, const CylinderState& s0, double t0,
                                    double t1, const IntegratorConfig& cfg) {
    check_interval(t0, t1);
    const auto ctl = step_control(params, cfg);
    const double a = params.a();
    const double k = params.drift();
    // y = (q, p, m11, m12, m21, m22, action)
    auto rhs = [&params, a, k](double t, const Vec<7>& y) {
        const double q = y[0];
        const double p = y[1];
        const double w = 1.0 + p * p;
        const double g = 1.0 / (w * std::sqrt(w));
        const double phase = q + k * t;
        const double c = a * std::cos(phase);
        const double f = params.forcing_at(t);
        return Vec<7>{
            p / std::sqrt(w) - k,
            -a * std::sin(phase) + f,
            g * y[4],
            g * y[5],
            -c * y[2],
            -c * y[3],
            -1.0 / std::sqrt(w) + c + f * q,
        };
    };
    const Vec<7> y0{s0.q, s0.p, 1.0, 0.0, 0.0, 1.0, 0.0};
    const auto end = detail::dopri5<7>(rhs, t0, y0, t1, ctl);
    const auto& y = end.y;
    return {{y[0], y[1]}, {y[2], y[3], y[4], y[5]}, y[6]};
}

std::vector<TrajectorySample> sample_trajectory(const PendulumParams& params, const CylinderState& s0,
                                                double t0, double t1, std::size_t n_samples,
                                                const IntegratorConfig& cfg) {
    if (n_samples < 2) throw ParameterError("sample_trajectory needs at least 2 samples");
    check_interval(t0, t1);
    const auto ctl = step_control(params, cfg);

    std::vector<TrajectorySample> rows;
    rows.reserve(n_samples);
    auto emit = [&](double t, double q, double p) {
        const LabState lab = to_lab(params, t, {q, p});
        rows.push_back({t, q, p, lab.x, lab.v, energy(params.a(), lab)});
    };
    auto sample_time = [&](std::size_t i) {
        if (i + 1 == n_samples) return t1;
        return t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    };

    emit(t0, s0.q, s0.p);
    std::size_t next = 1;
    auto rhs = [&params](double t, const Vec<2>& y) {
        const auto f = vector_field(params, t, {y[0], y[1]});
        return Vec<2>{f.dq, f.dp};
    };
    auto observer = [&](const detail::DenseSegment<2>& seg) {
        while (next < n_samples) {
            const double ts = sample_time(next);
            if (ts > seg.t_end) break;
            const Vec<2> y = (ts == seg.t_end) ? seg.y_end : seg.at(ts);
            emit(ts, y[0], y[1]);
            ++next;
        }
        return true;
    };
    const auto end = detail::dopri5<2>(rhs, t0, Vec<2>{s0.q, s0.p}, t1, ctl, observer);
    // Degenerate interval t0 == t1: every sample sits at the start.
    while (next < n_samples) {
        emit(sample_time(next), end.y[0], end.y[1]);
        ++next;
    }
    return rows;
}

}  // namespace relpend
