#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "relpend/model.hpp"

namespace relpend {

/// Tolerances and budget for the adaptive Dormand-Prince 5(4) integrator.
struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    std::size_t max_steps = 10'000'000;
    /// First trial step; T / 1000 when unset.
    std::optional<double> initial_step;

    /// Throws ParameterError on non-positive tolerances or a zero step budget.
    void validate() const;

    /// Same budget with both tolerances divided by `factor`.
    [[nodiscard]] IntegratorConfig tightened(double factor) const;
};

/// Row-major 2x2 matrix.
struct Matrix2 {
    double m11 = 1.0, m12 = 0.0;
    double m21 = 0.0, m22 = 1.0;

    [[nodiscard]] double det() const noexcept { return m11 * m22 - m12 * m21; }
    [[nodiscard]] double trace() const noexcept { return m11 + m22; }
};

/// End state of a flow together with its Jacobian with respect to (q0, p0)
/// and the accumulated action -1/sqrt(1+p^2) + a cos(q + K t) + f(t) q.
struct TangentFlowResult {
    CylinderState state;
    Matrix2 monodromy;
    double action = 0.0;
};

struct TrajectorySample {
    double t = 0.0;
    double q = 0.0;
    double p = 0.0;
    double x = 0.0;
    double v = 0.0;
    double E = 0.0;
};

/// State at t1 of the solution through (t0, s0).
///
/// Throws ParameterError if t1 < t0 and IntegrationError when the step budget
/// runs out.
[[nodiscard]] CylinderState flow(const PendulumParams& params, const CylinderState& s0, double t0,
                                 double t1, const IntegratorConfig& cfg = {});

/// Flow plus variational equations (monodromy starts at the identity) and the
/// action integral, integrated together as one seven-component system.
[[nodiscard]] TangentFlowResult flow_with_tangent(const PendulumParams& params,
                                                  const CylinderState& s0, double t0, double t1,
                                                  const IntegratorConfig& cfg = {});

/// n_samples equally spaced rows over [t0, t1] taken from the dense output.
/// Throws ParameterError if n_samples < 2.
[[nodiscard]] std::vector<TrajectorySample> sample_trajectory(const PendulumParams& params,
                                                              const CylinderState& s0, double t0,
                                                              double t1, std::size_t n_samples,
                                                              const IntegratorConfig& cfg = {});

}  // namespace relpend
