#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "relpend/integrate.hpp"
#include "relpend/model.hpp"
#include "relpend/parallel.hpp"
#include "relpend/poincare.hpp"

namespace relpend {

struct SolverConfig {
    /// Angles sampled when scanning the reduced function for sign changes.
    std::size_t grid = 720;
    /// Required |S(z) - z| for an accepted orbit.
    double tolerance = 1e-10;
    /// max |Phi| below this is reported as a continuum of fixed points.
    double degeneracy_tolerance = 1e-8;
    double bisection_tolerance = 1e-12;
    /// Orbits closer than this in (q mod 2 pi, p) are the same orbit.
    double dedup_tolerance = 1e-6;
    /// |Phi| at a local minimum below which a touching zero is tried with Newton.
    double touch_tolerance = 1e-6;
    /// Seeds per axis for the multi-start Newton fallback.
    std::size_t newton_grid = 32;
    std::size_t newton_max_iterations = 40;
    /// Newton polish and residuals run with the integrator tolerances divided
    /// by this factor; the map's global error must sit well below `tolerance`.
    double polish_tightening = 100.0;
    double margin = 1.0;
    double index_radius = 1e-3;
    std::size_t index_samples = 256;
};

enum class LinearClass { elliptic, hyperbolic, parabolic };

[[nodiscard]] std::string_view to_string(LinearClass c) noexcept;

struct StabilityClass {
    LinearClass linear = LinearClass::elliptic;
    bool unstable = false;
};

/// A T-periodic solution with winding number N, stored by its initial
/// condition in co-moving coordinates (q0 reduced to [0, 2 pi)).
struct PeriodicOrbit {
    double q0 = 0.0;
    double p0 = 0.0;
    double residual = 0.0;
    /// Fixed-point index; empty when it could not be defined.
    std::optional<int> index;
    double trace = 0.0;
    LinearClass linear_class = LinearClass::elliptic;
    int winding = 0;
    bool unstable = false;

    [[nodiscard]] CylinderState state() const noexcept { return {q0, p0}; }
};

/// phi(theta): the r with Q(theta, r) = theta; Phi(theta) = P(theta, phi) - phi.
struct ReducedCurve {
    std::vector<double> theta;
    std::vector<double> phi;
    std::vector<double> Phi;

    [[nodiscard]] double max_abs_Phi() const noexcept;
};

/// Every point of the graph r = phi(theta) is fixed.
struct DegenerateContinuum {
    ReducedCurve curve;
};

struct FixedPointSet {
    std::variant<std::vector<PeriodicOrbit>, DegenerateContinuum> solutions;
    /// Set when the twist condition failed and orbits came from multi-start Newton;
    /// completeness is then not guaranteed.
    bool no_twist_fallback = false;
    /// max |Phi| over the scan grid (NaN under the fallback).
    double max_abs_Phi = 0.0;
    /// Candidate zeros whose Newton polish missed the tolerance.
    std::size_t unconverged = 0;

    [[nodiscard]] bool is_degenerate() const noexcept {
        return std::holds_alternative<DegenerateContinuum>(solutions);
    }
    /// Empty for a continuum.
    [[nodiscard]] const std::vector<PeriodicOrbit>& orbits() const noexcept;
};

/// Unique r in (-p~, p~) with Q(theta, r) = theta, by bisection.
///
/// Throws BoundaryTwistError when the bracket ends have the same sign and
/// TwistViolationError if r -> Q(theta, r) is caught decreasing.
[[nodiscard]] double reduced_point(const PendulumParams& params, double theta, const StripBound& bound,
                                   const IntegratorConfig& cfg = {}, double tolerance = 1e-12);

/// Phi(theta) = P(theta, phi(theta)) - phi(theta).
[[nodiscard]] double reduced_value(const PendulumParams& params, double theta, const StripBound& bound,
                                   const IntegratorConfig& cfg = {}, double tolerance = 1e-12);

/// phi and Phi on M equispaced angles in [0, 2 pi).
[[nodiscard]] ReducedCurve build_reduced_curve(const PendulumParams& params, std::size_t M,
                                               const StripBound& bound, const IntegratorConfig& cfg = {},
                                               double tolerance = 1e-12,
                                               Execution exec = Execution::parallel);

/// Newton iteration on S(z) - z with the monodromy as Jacobian, all at the
/// accuracy given by `cfg`. Returns the polished point when |S(z) - z| < tolerance.
[[nodiscard]] std::optional<CylinderState> newton_fixed_point(const PendulumParams& params,
                                                              const CylinderState& seed,
                                                              const IntegratorConfig& cfg,
                                                              const SolverConfig& scfg);

/// All geometrically distinct fixed points of the period map, or the continuum.
/// Throws ParameterError for inadmissible parameters.
[[nodiscard]] FixedPointSet find_fixed_points(const PendulumParams& params, const IntegratorConfig& cfg = {},
                                              const SolverConfig& scfg = {},
                                              Execution exec = Execution::parallel);

/// Winding number of z -> S(z) - z around the circle |z - center| = radius.
///
/// Throws CircleTooSmallError if the displacement drops below 1e-12 on the
/// circle, and InconsistencyError for an index outside {-1, 0, 1} when
/// `twist_certified` is set.
[[nodiscard]] int fixed_point_index(const PendulumParams& params, const CylinderState& center,
                                    double radius = 1e-3, std::size_t n_samples = 256,
                                    const IntegratorConfig& cfg = {}, bool twist_certified = true,
                                    Execution exec = Execution::parallel);

/// elliptic |tr| < 2, hyperbolic |tr| > 2, parabolic within 1e-9 of +-2.
/// Unstable if hyperbolic, or isolated with index <= 0.
[[nodiscard]] StabilityClass classify_stability(double trace, std::optional<int> index = std::nullopt,
                                                bool isolated = false) noexcept;

struct LabSample {
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
};

/// x(t) = q(t) + K t over one period; checks x(T) - x(0) = 2 N pi (1e-8) and
/// max |v| < 1, throwing InconsistencyError otherwise.
[[nodiscard]] std::vector<LabSample> reconstruct_lab_solution(const PendulumParams& params,
                                                              const CylinderState& orbit,
                                                              std::size_t n_samples,
                                                              const IntegratorConfig& cfg = {});

}  // namespace relpend
