#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relpend/integrate.hpp"
#include "relpend/model.hpp"
#include "relpend/parallel.hpp"

namespace relpend {

/// Momentum half-height of a strip whose boundary circles are pushed in
/// opposite directions by the period map.
///
/// p_hat is where p/sqrt(1+p^2) reaches |K|; during one period p moves by at
/// most T (a + sup|f|), so starting beyond p_tilde keeps |p| > p_hat throughout.
struct StripBound {
    double p_hat = 0.0;
    double p_tilde = 0.0;
    double margin = 1.0;
};

struct MomentumInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Time-T map S(q, p) = (Q, P) of the co-moving Hamiltonian system.
/// Throws ParameterError for inadmissible parameters.
[[nodiscard]] CylinderState poincare_map(const PendulumParams& params, const CylinderState& s0,
                                         const IntegratorConfig& cfg = {});

/// S together with its Jacobian and the action integral over one period.
[[nodiscard]] TangentFlowResult poincare_map_with_tangent(const PendulumParams& params,
                                                          const CylinderState& s0,
                                                          const IntegratorConfig& cfg = {});

/// Generating function V(theta, r): the action integral along the orbit
/// started at (theta, r) over [0, T]. Satisfies dV = P dQ - p dq.
[[nodiscard]] double generating_function(const PendulumParams& params, double theta, double r,
                                         const IntegratorConfig& cfg = {});

/// Partials of V predicted from the monodromy:
/// V_theta = P dQ/dtheta - r,  V_r = P dQ/dr.
struct ActionGradient {
    double d_theta = 0.0;
    double d_r = 0.0;
};

[[nodiscard]] ActionGradient generating_function_gradient(const PendulumParams& params, double theta,
                                                          double r, const IntegratorConfig& cfg = {});

[[nodiscard]] StripBound strip_bound(const PendulumParams& params, double margin = 1.0);

/// min_q Q(q, p_tilde) - q and max_q Q(q, -p_tilde) - q over the sampled circle.
struct BoundaryTwist {
    double min_upper = 0.0;
    double max_lower = 0.0;
    std::size_t grid = 0;
};

/// Samples q_i = 2 pi i / n_grid on both boundary circles.
/// Throws BoundaryTwistError (carrying the offending q) if either sign is wrong.
[[nodiscard]] BoundaryTwist boundary_twist_check(const PendulumParams& params, const StripBound& bound,
                                                 std::size_t n_grid, const IntegratorConfig& cfg = {},
                                                 Execution exec = Execution::parallel);

/// dQ/dp0 at one initial condition (monodromy entry m12).
[[nodiscard]] double twist_at(const PendulumParams& params, const CylinderState& s0,
                              const IntegratorConfig& cfg = {});

struct TwistReport {
    double min_twist = 0.0;
    double argmin_q = 0.0;
    double argmin_p = 0.0;
    std::size_t grid = 0;
    MomentumInterval region;
};

/// Minimum of dQ/dp0 over q0 in {2 pi i / n} x p0 in linspace(region, n).
/// A positive value certifies the twist condition on the sampled grid only.
[[nodiscard]] TwistReport twist_margin(const PendulumParams& params, MomentumInterval region,
                                       std::size_t n_grid, const IntegratorConfig& cfg = {},
                                       Execution exec = Execution::parallel);

enum class IntersectionKind { crossings, invariant, inconclusive };

struct IntersectionResult {
    IntersectionKind kind = IntersectionKind::crossings;
    std::size_t count = 0;
    /// max |P_i - gamma(Q_i)| over the mapped samples.
    double max_deviation = 0.0;
};

struct IntersectionOptions {
    /// |distance| below this at a polyline vertex cannot be told apart from a touch.
    double tangency_tol = 1e-10;
    /// Every mapped vertex within this distance of the curve means S(Gamma) = Gamma.
    double invariance_tol = 1e-9;
};

/// Counts transversal crossings between the closed graph polyline Gamma given
/// by `curve` (q strictly increasing inside one 2 pi window) and its image S(Gamma).
[[nodiscard]] IntersectionResult curve_intersection_count(const PendulumParams& params,
                                                          std::span<const CylinderState> curve,
                                                          const IntegratorConfig& cfg = {},
                                                          const IntersectionOptions& opts = {},
                                                          Execution exec = Execution::parallel);

/// Iterates S from each seed, recording (q mod 2 pi, p) after every iterate.
struct OrbitPoint {
    std::size_t seed = 0;
    std::size_t iterate = 0;
    double q = 0.0;
    double p = 0.0;
};

[[nodiscard]] std::vector<OrbitPoint> iterate_map(const PendulumParams& params,
                                                  std::span<const CylinderState> seeds,
                                                  std::size_t iterates, const IntegratorConfig& cfg = {},
                                                  Execution exec = Execution::parallel);

/// Reduces an angle to [0, 2 pi).
[[nodiscard]] double wrap_angle(double q) noexcept;

}  // namespace relpend
