#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "relpend/integrate.hpp"
#include "relpend/model.hpp"
#include "relpend/poincare.hpp"
#include "relpend/solver.hpp"

namespace relpend::cli {

/// Malformed or inconsistent configuration (exit 64).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SimulateOptions {
    CylinderState start;
    double t0 = 0.0;
    /// One period when unset.
    std::optional<double> t1;
    std::size_t samples = 1001;
};

struct PoincareGridOptions {
    /// Explicit seeds win over the grid.
    std::vector<CylinderState> seeds;
    std::size_t grid_q = 8;
    std::size_t grid_p = 8;
    /// +-p~ of the strip when unset.
    std::optional<MomentumInterval> region;
    std::size_t iterates = 200;
};

struct TwistMapOptions {
    std::size_t grid = 32;
    std::optional<MomentumInterval> region;
    std::size_t boundary_grid = 64;
    /// CSV files of graph curves (q,p rows) whose intersections with their image are counted.
    std::vector<std::string> curves;
};

struct AutonomousOptions {
    /// Libration levels sampled inside (1, 1 + 2a).
    std::size_t libration_levels = 50;
    std::size_t running_levels = 50;
    /// Running levels span (1 + 2a, 1 + 2a + running_span].
    double running_span = 10.0;
    /// Turns counted by T_N; max(1, |N|) when unset.
    std::optional<int> turns;
};

struct SweepTuple {
    double a = 0.0;
    double T = 0.0;
    int N = 0;
    double forcing_scale = 1.0;

    friend bool operator<(const SweepTuple& l, const SweepTuple& r) noexcept {
        if (l.a != r.a) return l.a < r.a;
        if (l.T != r.T) return l.T < r.T;
        if (l.N != r.N) return l.N < r.N;
        return l.forcing_scale < r.forcing_scale;
    }
};

struct SweepOptions {
    /// Cartesian product of the four axes; an empty axis uses the base value.
    std::vector<double> a;
    std::vector<double> T;
    std::vector<int> N;
    std::vector<double> forcing_scale;
    std::size_t twist_grid = 16;

    [[nodiscard]] std::vector<SweepTuple> tuples(const PendulumParams& base) const;
};

struct VerifyOptions {
    /// Requires a positive twist margin for the configured parameters.
    bool assert_twist = false;
    /// Run only these suites; all when empty.
    std::vector<std::string> suites;
};

struct RunConfig {
    std::optional<PendulumParams> params;
    IntegratorConfig integrator;
    SolverConfig solver;
    std::optional<std::string> output;
    SimulateOptions simulate;
    PoincareGridOptions poincare_grid;
    TwistMapOptions twist_map;
    AutonomousOptions autonomous;
    SweepOptions sweep;
    VerifyOptions verify;

    /// Throws ConfigError when the command needs parameters and none were given.
    [[nodiscard]] const PendulumParams& require_params() const;
};

/// Parses the whole document; every object rejects keys it does not know.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig load_config(const std::string& path);

}  // namespace relpend::cli
