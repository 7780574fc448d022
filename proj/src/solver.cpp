#include "relpend/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "relpend/errors.hpp"

namespace relpend {

namespace {

// Slack for the monotonicity check inside reduced_point; differences this
// small are integration noise, not a twist violation.
constexpr double kMonotoneSlack = 1e-9;

double circular_distance(double a, double b) noexcept {
    const double d = std::abs(wrap_angle(a) - wrap_angle(b));
    return std::min(d, kTwoPi - d);
}

double residual_norm(const CylinderState& a, const CylinderState& b) noexcept {
    return std::hypot(a.q - b.q, a.p - b.p);
}

struct Candidate {
    CylinderState z;
    double residual;
};

/// Sorts by (q mod 2 pi, p) and drops later copies of the same orbit.
std::vector<Candidate> deduplicate(std::vector<Candidate> cands, double tol) {
    for (auto& c : cands) c.z.q = wrap_angle(c.z.q);
    std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) {
        if (l.z.q != r.z.q) return l.z.q < r.z.q;
        return l.z.p < r.z.p;
    });
    std::vector<Candidate> out;
    for (const auto& c : cands) {
        bool dup = false;
        for (auto& kept : out) {
            if (circular_distance(kept.z.q, c.z.q) < tol && std::abs(kept.z.p - c.z.p) < tol) {
                if (c.residual < kept.residual) kept = c;
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const Candidate& l, const Candidate& r) {
        if (l.z.q != r.z.q) return l.z.q < r.z.q;
        return l.z.p < r.z.p;
    });
    return out;
}

double angle_step(double from, double to) noexcept {
    double d = to - from;
    while (d > std::numbers::pi) d -= kTwoPi;
    while (d <= -std::numbers::pi) d += kTwoPi;
    return d;
}

}  // namespace

std::string_view to_string(LinearClass c) noexcept {
    switch (c) {
        case LinearClass::elliptic:
            return "elliptic";
        case LinearClass::hyperbolic:
            return "hyperbolic";
        case LinearClass::parabolic:
            return "parabolic";
    }
    return "unknown";
}

double ReducedCurve::max_abs_Phi() const noexcept {
    double m = 0.0;
    for (double v : Phi) m = std::max(m, std::abs(v));
    return m;
}

const std::vector<PeriodicOrbit>& FixedPointSet::orbits() const noexcept {
    static const std::vector<PeriodicOrbit> empty;
    if (const auto* v = std::get_if<std::vector<PeriodicOrbit>>(&solutions)) return *v;
    return empty;
}

double reduced_point(const PendulumParams& params, double theta, const StripBound& bound,
                     const IntegratorConfig& cfg, double tolerance) {
    auto gap = [&](double r) { return poincare_map(params, {theta, r}, cfg).q - theta; };

    double lo = -bound.p_tilde;
    double hi = bound.p_tilde;
    double g_lo = gap(lo);
    double g_hi = gap(hi);
    if (!(g_lo < 0.0 && g_hi > 0.0)) {
        std::ostringstream os;
        os << "boundary twist violated at theta = " << theta << ": Q - theta = " << g_lo << " at -p~, "
           << g_hi << " at +p~";
        throw BoundaryTwistError(os.str(), theta);
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double g = gap(mid);
        if (g < g_lo - kMonotoneSlack || g > g_hi + kMonotoneSlack) {
            std::ostringstream os;
            os << "r -> Q(theta, r) is not increasing at theta = " << theta << ", r = " << mid;
            throw TwistViolationError(os.str());
        }
        if (g == 0.0) return mid;
        if (g < 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    return 0.5 * (lo + hi);
}

double reduced_value(const PendulumParams& params, double theta, const StripBound& bound,
                     const IntegratorConfig& cfg, double tolerance) {
    const double r = reduced_point(params, theta, bound, cfg, tolerance);
    return poincare_map(params, {theta, r}, cfg).p - r;
}

ReducedCurve build_reduced_curve(const PendulumParams& params, std::size_t M, const StripBound& bound,
                                 const IntegratorConfig& cfg, double tolerance, Execution exec) {
    if (M == 0) throw ParameterError("reduced curve needs at least one angle");
    struct Sample {
        double phi;
        double Phi;
    };
    const auto samples = map_indices(
        M,
        [&](std::size_t i) {
            const double theta = kTwoPi * static_cast<double>(i) / static_cast<double>(M);
            const double r = reduced_point(params, theta, bound, cfg, tolerance);
            return Sample{r, poincare_map(params, {theta, r}, cfg).p - r};
        },
        exec);
    ReducedCurve curve;
    curve.theta.resize(M);
    curve.phi.resize(M);
    curve.Phi.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
        curve.theta[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(M);
        curve.phi[i] = samples[i].phi;
        curve.Phi[i] = samples[i].Phi;
    }
    return curve;
}

std::optional<CylinderState> newton_fixed_point(const PendulumParams& params, const CylinderState& seed,
                                                const IntegratorConfig& cfg, const SolverConfig& scfg) {
    CylinderState z = seed;
    // The residual comes from the plain map so the accepted point is a fixed
    // point of the same map that certifies it; the tangent system only supplies J.
    double r = residual_norm(poincare_map(params, z, cfg), z);
    for (std::size_t it = 0; it < scfg.newton_max_iterations && r >= 0.01 * scfg.tolerance; ++it) {
        const auto res = poincare_map_with_tangent(params, z, cfg);
        const CylinderState s = poincare_map(params, z, cfg);
        const double fq = s.q - z.q;
        const double fp = s.p - z.p;
        const Matrix2& m = res.monodromy;
        const double j11 = m.m11 - 1.0, j12 = m.m12, j21 = m.m21, j22 = m.m22 - 1.0;
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || std::abs(det) < 1e-300) break;
        const double dq = (j22 * fq - j12 * fp) / det;
        const double dp = (-j21 * fq + j11 * fp) / det;
        if (!std::isfinite(dq) || !std::isfinite(dp) || std::hypot(dq, dp) > 10.0) return std::nullopt;
        const CylinderState next{z.q - dq, z.p - dp};
        const double r_next = residual_norm(poincare_map(params, next, cfg), next);
        if (!(r_next < r) && std::hypot(dq, dp) < 1e-13 * (1.0 + std::hypot(z.q, z.p))) break;
        z = next;
        r = r_next;
    }
    if (!(r < scfg.tolerance)) return std::nullopt;
    return z;
}

int fixed_point_index(const PendulumParams& params, const CylinderState& center, double radius,
                      std::size_t n_samples, const IntegratorConfig& cfg, bool twist_certified,
                      Execution exec) {
    if (!(radius > 0.0)) throw ParameterError("index circle radius must be positive");
    if (n_samples < 8) throw ParameterError("index circle needs at least 8 samples");

    auto displacement_angle = [&](double phase) {
        const CylinderState z{center.q + radius * std::cos(phase), center.p + radius * std::sin(phase)};
        const CylinderState s = poincare_map(params, z, cfg);
        const double dq = s.q - z.q;
        const double dp = s.p - z.p;
        if (std::hypot(dq, dp) < 1e-12) {
            std::ostringstream os;
            os << "displacement vanishes on the index circle (radius " << radius << ") at phase " << phase;
            throw CircleTooSmallError(os.str());
        }
        return std::atan2(dp, dq);
    };

    const auto angles = map_indices(
        n_samples,
        [&](std::size_t k) { return displacement_angle(kTwoPi * static_cast<double>(k) / static_cast<double>(n_samples)); },
        exec);

    // Accumulate the turning of the field, bisecting any arc on which the
    // field angle jumps by more than a quarter turn.
    constexpr int kMaxDepth = 16;
    double total = 0.0;
    auto accumulate = [&](auto&& self, double phase0, double ang0, double phase1, double ang1, int depth) -> void {
        const double step = angle_step(ang0, ang1);
        if (std::abs(step) <= 0.5 * std::numbers::pi || depth >= kMaxDepth) {
            total += step;
            return;
        }
        const double mid = 0.5 * (phase0 + phase1);
        const double ang_mid = displacement_angle(mid);
        self(self, phase0, ang0, mid, ang_mid, depth + 1);
        self(self, mid, ang_mid, phase1, ang1, depth + 1);
    };
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double ph0 = kTwoPi * static_cast<double>(k) / static_cast<double>(n_samples);
        const double ph1 = kTwoPi * static_cast<double>(k + 1) / static_cast<double>(n_samples);
        accumulate(accumulate, ph0, angles[k], ph1, angles[(k + 1) % n_samples], 0);
    }

    const double turns = total / kTwoPi;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-6) {
        std::ostringstream os;
        os << "displacement winding " << turns << " is not an integer";
        throw InconsistencyError(os.str());
    }
    const int index = static_cast<int>(rounded);
    if (twist_certified && (index < -1 || index > 1)) {
        std::ostringstream os;
        os << "fixed point index " << index << " outside {-1, 0, 1} for a twist map";
        throw InconsistencyError(os.str());
    }
    return index;
}

StabilityClass classify_stability(double trace, std::optional<int> index, bool isolated) noexcept {
    StabilityClass out;
    if (std::abs(trace - 2.0) <= 1e-9 || std::abs(trace + 2.0) <= 1e-9) {
        out.linear = LinearClass::parabolic;
    } else if (std::abs(trace) < 2.0) {
        out.linear = LinearClass::elliptic;
    } else {
        out.linear = LinearClass::hyperbolic;
    }
    out.unstable = out.linear == LinearClass::hyperbolic || (isolated && index && *index <= 0);
    return out;
}

FixedPointSet find_fixed_points(const PendulumParams& params, const IntegratorConfig& cfg,
                                const SolverConfig& scfg, Execution exec) {
    if (scfg.grid < 2) throw ParameterError("solver grid must have at least 2 angles");
    const StripBound bound = strip_bound(params, scfg.margin);
    const IntegratorConfig fine = cfg.tightened(scfg.polish_tightening);
    FixedPointSet result;

    // Below pi^2/T^2 the period map twists; at or above it the grid is checked.
    bool twist_ok = params.a() < params.twist_threshold();
    if (!twist_ok) {
        const auto rep = twist_margin(params, {-bound.p_tilde, bound.p_tilde}, 16, cfg, exec);
        twist_ok = rep.min_twist > 0.0;
    }

    std::vector<Candidate> cands;
    std::optional<ReducedCurve> curve;
    if (twist_ok) {
        try {
            curve = build_reduced_curve(params, scfg.grid, bound, cfg, scfg.bisection_tolerance, exec);
        } catch (const TwistViolationError&) {
            curve.reset();
        } catch (const BoundaryTwistError&) {
            curve.reset();
        }
    }

    if (curve) {
        result.max_abs_Phi = curve->max_abs_Phi();
        if (result.max_abs_Phi < scfg.degeneracy_tolerance) {
            result.solutions = DegenerateContinuum{std::move(*curve)};
            return result;
        }

        const std::size_t M = scfg.grid;
        const auto& Phi = curve->Phi;
        std::vector<std::size_t> brackets;
        std::vector<std::size_t> touches;
        for (std::size_t i = 0; i < M; ++i) {
            const double f0 = Phi[i];
            const double f1 = Phi[(i + 1) % M];
            if (f0 == 0.0 || (f0 < 0.0) != (f1 < 0.0)) {
                brackets.push_back(i);
                continue;
            }
            const double fm = Phi[(i + M - 1) % M];
            if (std::abs(f0) < scfg.touch_tolerance && std::abs(f0) <= std::abs(fm) && std::abs(f0) <= std::abs(f1)) {
                touches.push_back(i);
            }
        }

        struct Root {
            bool found;
            Candidate c;
        };
        auto polish = [&](CylinderState seed) -> Root {
            if (auto z = newton_fixed_point(params, seed, fine, scfg)) {
                return {true, {*z, residual_norm(poincare_map(params, *z, fine), *z)}};
            }
            return {false, {seed, std::numeric_limits<double>::infinity()}};
        };

        auto roots = map_indices(
            brackets.size(),
            [&](std::size_t b) {
                const std::size_t i = brackets[b];
                double lo = curve->theta[i];
                double hi = (i + 1 == M) ? kTwoPi : curve->theta[i + 1];
                double f_lo = Phi[i];
                if (f_lo != 0.0) {
                    while (hi - lo > scfg.bisection_tolerance) {
                        const double mid = 0.5 * (lo + hi);
                        if (mid <= lo || mid >= hi) break;
                        const double fm = reduced_value(params, mid, bound, cfg, scfg.bisection_tolerance);
                        if (fm == 0.0) {
                            lo = hi = mid;
                            break;
                        }
                        if ((fm < 0.0) == (f_lo < 0.0)) {
                            lo = mid;
                            f_lo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                }
                const double theta = 0.5 * (lo + hi);
                const double r = reduced_point(params, theta, bound, cfg, scfg.bisection_tolerance);
                return polish({theta, r});
            },
            exec);
        auto touched = map_indices(
            touches.size(),
            [&](std::size_t k) {
                const std::size_t i = touches[k];
                return polish({curve->theta[i], curve->phi[i]});
            },
            exec);

        for (const auto& r : roots) {
            if (r.found) {
                cands.push_back(r.c);
            } else {
                ++result.unconverged;
            }
        }
        for (const auto& r : touched) {
            if (r.found) cands.push_back(r.c);
        }
    } else {
        result.no_twist_fallback = true;
        result.max_abs_Phi = std::numeric_limits<double>::quiet_NaN();
        const std::size_t n = scfg.newton_grid;
        const MomentumInterval strip{-bound.p_tilde, bound.p_tilde};
        auto seeds = map_indices(
            n * n,
            [&](std::size_t idx) -> std::optional<Candidate> {
                const double q = kTwoPi * static_cast<double>(idx / n) / static_cast<double>(n);
                const std::size_t j = idx % n;
                const double p = n == 1 ? 0.0
                                        : strip.lo + (strip.hi - strip.lo) * static_cast<double>(j) /
                                                         static_cast<double>(n - 1);
                if (auto z = newton_fixed_point(params, {q, p}, fine, scfg)) {
                    if (std::abs(z->p) <= bound.p_tilde) {
                        return Candidate{*z, residual_norm(poincare_map(params, *z, fine), *z)};
                    }
                }
                return std::nullopt;
            },
            exec);
        for (const auto& s : seeds) {
            if (s) cands.push_back(*s);
        }
    }

    const auto unique = deduplicate(std::move(cands), scfg.dedup_tolerance);

    // Keep every index circle clear of the other fixed points (radius <= spacing / 4).
    std::vector<PeriodicOrbit> orbits(unique.size());
    const bool certified = !result.no_twist_fallback;
    for (std::size_t i = 0; i < unique.size(); ++i) {
        const CylinderState z = unique[i].z;
        double radius = scfg.index_radius;
        for (std::size_t j = 0; j < unique.size(); ++j) {
            if (j == i) continue;
            const double d = std::hypot(circular_distance(z.q, unique[j].z.q), z.p - unique[j].z.p);
            radius = std::min(radius, 0.25 * d);
        }
        PeriodicOrbit& o = orbits[i];
        o.q0 = z.q;
        o.p0 = z.p;
        o.residual = unique[i].residual;
        o.winding = params.winding();
        o.trace = poincare_map_with_tangent(params, z, fine).monodromy.trace();
        try {
            o.index = fixed_point_index(params, z, radius, scfg.index_samples, cfg, certified, exec);
        } catch (const CircleTooSmallError&) {
            o.index.reset();
        }
        const auto cls = classify_stability(o.trace, o.index, o.index.has_value());
        o.linear_class = cls.linear;
        o.unstable = cls.unstable;
    }
    result.solutions = std::move(orbits);
    return result;
}

std::vector<LabSample> reconstruct_lab_solution(const PendulumParams& params, const CylinderState& orbit,
                                                std::size_t n_samples, const IntegratorConfig& cfg) {
    if (!admissible(params)) throw ParameterError("inadmissible parameters: |2 N pi / T| >= 1");
    const auto rows = sample_trajectory(params, orbit, 0.0, params.period(), n_samples, cfg);
    std::vector<LabSample> out;
    out.reserve(rows.size());
    double vmax = 0.0;
    for (const auto& r : rows) {
        out.push_back({r.t, r.x, r.v});
        vmax = std::max(vmax, std::abs(r.v));
    }
    const double advance = out.back().x - out.front().x;
    const double expected = kTwoPi * static_cast<double>(params.winding());
    if (!(std::abs(advance - expected) <= 1e-8)) {
        std::ostringstream os;
        os.precision(17);
        os << "x(T) - x(0) = " << advance << " differs from 2 N pi = " << expected;
        throw InconsistencyError(os.str());
    }
    if (!(vmax < 1.0)) throw InconsistencyError("reconstructed velocity reached |v| >= 1");
    return out;
}

}  // namespace relpend
