#include "relpend/autonomous.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "relpend/dopri.hpp"
#include "relpend/errors.hpp"
#include "relpend/model.hpp"

namespace relpend {

namespace {

void require_gravity(double a) {
    if (!std::isfinite(a) || a < 0.0) throw DomainError("a must be finite and non-negative");
}

/// One period's worth of x: the integrand is 2 pi periodic, so T_N = N * T_1.
double running_time_one_turn(double a, double E) {
    auto integrand = [a, E](double x) {
        const double u = E + a * std::cos(x) - a;
        return u / std::sqrt((u - 1.0) * (u + 1.0));
    };
    double err = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, kTwoPi, 20, 1e-12, &err);
    return value;
}

}  // namespace

std::string_view to_string(EnergyClass c) noexcept {
    switch (c) {
        case EnergyClass::equilibrium_center:
            return "equilibrium-center";
        case EnergyClass::libration:
            return "libration";
        case EnergyClass::separatrix:
            return "separatrix";
        case EnergyClass::running:
            return "running";
    }
    return "unknown";
}

EnergyClass classify_energy(double a, double E) {
    require_gravity(a);
    if (!(E >= 1.0)) throw DomainError("energy below the rest level E = 1");
    const double sep = 1.0 + 2.0 * a;
    if (E == 1.0) return EnergyClass::equilibrium_center;
    if (E < sep) return EnergyClass::libration;
    if (E == sep) return EnergyClass::separatrix;
    return EnergyClass::running;
}

double running_time(double a, double E, int N) {
    require_gravity(a);
    if (N < 1) throw DomainError("running_time needs N >= 1");
    if (!(E > 1.0 + 2.0 * a)) throw DomainError("running_time needs E > 1 + 2a");
    return static_cast<double>(N) * running_time_one_turn(a, E);
}

double running_velocity_at_origin(double /*a*/, double E) {
    if (!(E > 1.0)) throw DomainError("running solution needs E > 1");
    return std::sqrt((1.0 - 1.0 / E) * (1.0 + 1.0 / E));
}

double solve_running_energy(double a, double T, int N) {
    require_gravity(a);
    if (N < 1) throw DomainError("solve_running_energy needs N >= 1");
    const double lower_limit = kTwoPi * static_cast<double>(N);
    if (!(T > lower_limit)) {
        std::ostringstream os;
        os << "no running solution: T = " << T << " <= 2 N pi = " << lower_limit;
        throw DomainError(os.str());
    }
    const double base = 1.0 + 2.0 * a;
    auto tn = [&](double E) { return running_time(a, E, N); };

    double lo_off = 1e-6;
    while (tn(base + lo_off) <= T) {
        lo_off /= 10.0;
        if (lo_off < 1e-14) throw DomainError("target period too long to bracket near the separatrix");
    }
    double lo = base + lo_off;
    double hi = base + 1.0;
    for (int grow = 0; tn(hi) > T; ++grow) {
        if (grow > 200) throw ConvergenceError("could not bracket the running energy");
        hi = lo + 2.0 * (hi - lo);
    }
    for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tn(mid) > T) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double E = 0.5 * (lo + hi);
    if (!(std::abs(tn(E) - T) < 1e-9 * T)) {
        throw ConvergenceError("running energy residual above 1e-9 T");
    }
    return E;
}

double libration_period(double a, double E, TurningSide start, const IntegratorConfig& cfg) {
    require_gravity(a);
    if (!(E > 1.0 && E < 1.0 + 2.0 * a)) throw DomainError("libration needs 1 < E < 1 + 2a");
    cfg.validate();

    const double amplitude = std::acos(1.0 - (E - 1.0) / a);
    const double x0 = start == TurningSide::negative ? -amplitude : amplitude;
    // p leaves zero with the sign of -sin(x0) and returns to zero at the next turning point.
    const double leaving_sign = start == TurningSide::negative ? 1.0 : -1.0;

    using detail::Vec;
    auto rhs = [a](double, const Vec<2>& y) {
        return Vec<2>{to_velocity(y[1]), -a * std::sin(y[0])};
    };
    const detail::StepControl ctl{cfg.rtol, cfg.atol, cfg.max_steps, cfg.initial_step.value_or(1e-3)};

    bool found = false;
    detail::DenseSegment<2> hit;
    auto observer = [&](const detail::DenseSegment<2>& seg) {
        if (leaving_sign * seg.y_end[1] <= 0.0 && seg.t_begin > 0.0 && leaving_sign * seg.y_begin[1] > 0.0) {
            hit = seg;
            found = true;
            return false;
        }
        return true;
    };
    const double horizon = 1e6;
    detail::dopri5<2>(rhs, 0.0, Vec<2>{x0, 0.0}, horizon, ctl, observer);
    if (!found) throw ConvergenceError("no return to a turning point within the integration horizon");

    // Root of the interpolant, then Newton on the true flow restarted at the step start.
    double lo = hit.t_begin;
    double hi = hit.t_end;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (leaving_sign * hit.at(mid)[1] > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double t_star = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
        const auto end = detail::dopri5<2>(rhs, hit.t_begin, hit.y_begin, t_star, ctl);
        const double pdot = -a * std::sin(end.y[0]);
        if (pdot == 0.0) break;
        t_star -= end.y[1] / pdot;
    }
    return 2.0 * t_star;
}

std::vector<double> libration_energy_grid(double a, std::size_t n_levels) {
    require_gravity(a);
    if (n_levels == 0) return {};
    const double d_min = 2.0 * a * 1e-4;
    const double d_max = 2.0 * a * (1.0 - 1e-4);
    std::vector<double> out(n_levels);
    for (std::size_t k = 0; k < n_levels; ++k) {
        const double s = n_levels == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n_levels - 1);
        out[k] = 1.0 + d_min * std::pow(d_max / d_min, s);
    }
    return out;
}

PeriodScan min_libration_period_scan(double a, std::size_t n_levels, const IntegratorConfig& cfg, Execution exec) {
    if (!(a > 0.0)) throw DomainError("libration scan needs a > 0");
    if (n_levels == 0) throw DomainError("libration scan needs at least one level");
    const auto energies = libration_energy_grid(a, n_levels);
    const auto periods = map_indices(
        n_levels, [&](std::size_t k) { return libration_period(a, energies[k], TurningSide::negative, cfg); }, exec);
    const auto it = std::min_element(periods.begin(), periods.end());
    return {*it, energies[static_cast<std::size_t>(it - periods.begin())], n_levels};
}

}  // namespace relpend
