#pragma once

#include <cstddef>
#include <string_view>

#include "relpend/integrate.hpp"
#include "relpend/parallel.hpp"

namespace relpend {

// Unforced pendulum (f = 0). Energy levels of
//   E(x, v) = 1/sqrt(1 - v^2) - a cos x + a
// split the phase portrait at E = 1 (rest) and E = 1 + 2a (separatrix).

enum class EnergyClass { equilibrium_center, libration, separatrix, running };

[[nodiscard]] std::string_view to_string(EnergyClass c) noexcept;

struct EnergyLevel {
    double E = 1.0;
    EnergyClass cls = EnergyClass::equilibrium_center;
};

/// Throws DomainError for E < 1 or a < 0.
[[nodiscard]] EnergyClass classify_energy(double a, double E);

/// Time for a running solution with energy E to advance from 0 to 2 N pi:
///   T_N(E) = int_0^{2 N pi} dx / sqrt(1 - 1/(E + a cos x - a)^2)
/// Adaptive Gauss-Kronrod, 1e-10 relative. Requires E > 1 + 2a and N >= 1.
[[nodiscard]] double running_time(double a, double E, int N);

/// The unique E > 1 + 2a with T_N(E) = T (bisection).
/// Throws DomainError when T <= 2 N pi.
[[nodiscard]] double solve_running_energy(double a, double T, int N);

/// Velocity at x = 0 of the running solution with energy E (v > 0).
[[nodiscard]] double running_velocity_at_origin(double a, double E);

enum class TurningSide { negative, positive };

/// Minimal period of the closed orbit at energy 1 < E < 1 + 2a, measured
/// between successive turning points with event location on v = 0.
[[nodiscard]] double libration_period(double a, double E, TurningSide start = TurningSide::negative,
                                      const IntegratorConfig& cfg = {});

struct PeriodScan {
    double min_period = 0.0;
    double argmin_E = 0.0;
    std::size_t levels = 0;
};

/// Minimum libration period over n_levels energies with E - 1 geometrically
/// spaced across (1, 1 + 2a).
[[nodiscard]] PeriodScan min_libration_period_scan(double a, std::size_t n_levels,
                                                   const IntegratorConfig& cfg = {},
                                                   Execution exec = Execution::parallel);

/// Energies sampled by min_libration_period_scan.
[[nodiscard]] std::vector<double> libration_energy_grid(double a, std::size_t n_levels);

}  // namespace relpend
