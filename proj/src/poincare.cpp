#include "relpend/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "relpend/errors.hpp"

namespace relpend {

namespace {

void require_admissible(const PendulumParams& params) {
    if (!admissible(params)) {
        std::ostringstream os;
        os << "inadmissible parameters: |2 N pi / T| = " << std::abs(params.drift()) << " >= 1";
        throw ParameterError(os.str());
    }
}

double grid_angle(std::size_t i, std::size_t n) {
    return kTwoPi * static_cast<double>(i) / static_cast<double>(n);
}

double linspace(MomentumInterval r, std::size_t i, std::size_t n) {
    if (n == 1) return 0.5 * (r.lo + r.hi);
    if (i + 1 == n) return r.hi;
    return r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

/// Periodic piecewise-linear interpolation through the curve samples.
class GraphPolyline {
public:
    explicit GraphPolyline(std::span<const CylinderState> curve) {
        if (curve.size() < 3) throw ParameterError("curve needs at least 3 samples");
        nodes_.reserve(curve.size() + 1);
        values_.reserve(curve.size() + 1);
        for (const auto& s : curve) {
            if (!std::isfinite(s.q) || !std::isfinite(s.p)) throw ParameterError("curve sample is not finite");
            if (!nodes_.empty() && !(s.q > nodes_.back())) {
                throw ParameterError("curve samples must have strictly increasing q");
            }
            nodes_.push_back(s.q);
            values_.push_back(s.p);
        }
        if (!(nodes_.back() - nodes_.front() < kTwoPi)) {
            throw ParameterError("curve samples must lie inside one 2 pi window");
        }
        nodes_.push_back(nodes_.front() + kTwoPi);
        values_.push_back(values_.front());
    }

    [[nodiscard]] double base() const noexcept { return nodes_.front(); }
    [[nodiscard]] std::size_t samples() const noexcept { return nodes_.size() - 1; }
    [[nodiscard]] double node(std::size_t j) const noexcept { return nodes_[j]; }

    [[nodiscard]] double operator()(double q) const noexcept {
        double qq = base() + std::fmod(q - base(), kTwoPi);
        if (qq < base()) qq += kTwoPi;
        if (qq >= nodes_.back()) qq = base();
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), qq);
        const auto j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - nodes_.begin() - 1, 0));
        const double w = (qq - nodes_[j]) / (nodes_[j + 1] - nodes_[j]);
        return values_[j] + w * (values_[j + 1] - values_[j]);
    }

private:
    std::vector<double> nodes_;
    std::vector<double> values_;
};

}  // namespace

double wrap_angle(double q) noexcept {
    double r = std::fmod(q, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

CylinderState poincare_map(const PendulumParams& params, const CylinderState& s0,
                           const IntegratorConfig& cfg) {
    require_admissible(params);
    return flow(params, s0, 0.0, params.period(), cfg);
}

TangentFlowResult poincare_map_with_tangent(const PendulumParams& params, const CylinderState& s0,
                                            const IntegratorConfig& cfg) {
    require_admissible(params);
    return flow_with_tangent(params, s0, 0.0, params.period(), cfg);
}

double generating_function(const PendulumParams& params, double theta, double r,
                           const IntegratorConfig& cfg) {
    return poincare_map_with_tangent(params, {theta, r}, cfg).action;
}

ActionGradient generating_function_gradient(const PendulumParams& params, double theta, double r,
                                            const IntegratorConfig& cfg) {
    const auto res = poincare_map_with_tangent(params, {theta, r}, cfg);
    const double p1 = res.state.p;
    return {p1 * res.monodromy.m11 - r, p1 * res.monodromy.m12};
}

StripBound strip_bound(const PendulumParams& params, double margin) {
    require_admissible(params);
    if (!(margin > 0.0)) throw ParameterError("strip margin must be positive");
    const double k = std::abs(params.drift());
    const double p_hat = k / std::sqrt((1.0 - k) * (1.0 + k));
    const double p_tilde = p_hat + params.period() * (params.a() + params.forcing().sup_norm_bound()) + margin;
    return {p_hat, p_tilde, margin};
}

BoundaryTwist boundary_twist_check(const PendulumParams& params, const StripBound& bound, std::size_t n_grid,
                                   const IntegratorConfig& cfg, Execution exec) {
    require_admissible(params);
    if (n_grid == 0) throw ParameterError("boundary twist grid must be non-empty");
    struct Gap {
        double upper;
        double lower;
    };
    const auto gaps = map_indices(
        n_grid,
        [&](std::size_t i) {
            const double q = grid_angle(i, n_grid);
            return Gap{poincare_map(params, {q, bound.p_tilde}, cfg).q - q,
                       poincare_map(params, {q, -bound.p_tilde}, cfg).q - q};
        },
        exec);

    BoundaryTwist out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), n_grid};
    std::size_t worst_upper = 0;
    std::size_t worst_lower = 0;
    for (std::size_t i = 0; i < n_grid; ++i) {
        if (gaps[i].upper < out.min_upper) {
            out.min_upper = gaps[i].upper;
            worst_upper = i;
        }
        if (gaps[i].lower > out.max_lower) {
            out.max_lower = gaps[i].lower;
            worst_lower = i;
        }
    }
    if (!(out.min_upper > 0.0)) {
        std::ostringstream os;
        os << "boundary twist fails on p = +" << bound.p_tilde << ": Q - q = " << out.min_upper;
        throw BoundaryTwistError(os.str(), grid_angle(worst_upper, n_grid));
    }
    if (!(out.max_lower < 0.0)) {
        std::ostringstream os;
        os << "boundary twist fails on p = -" << bound.p_tilde << ": Q - q = " << out.max_lower;
        throw BoundaryTwistError(os.str(), grid_angle(worst_lower, n_grid));
    }
    return out;
}

double twist_at(const PendulumParams& params, const CylinderState& s0, const IntegratorConfig& cfg) {
    return poincare_map_with_tangent(params, s0, cfg).monodromy.m12;
}

TwistReport twist_margin(const PendulumParams& params, MomentumInterval region, std::size_t n_grid,
                         const IntegratorConfig& cfg, Execution exec) {
    require_admissible(params);
    if (n_grid == 0) throw ParameterError("twist grid must be non-empty");
    if (!(region.hi >= region.lo)) throw ParameterError("momentum region must satisfy lo <= hi");

    const auto values = map_indices(
        n_grid * n_grid,
        [&](std::size_t idx) {
            const double q = grid_angle(idx / n_grid, n_grid);
            const double p = linspace(region, idx % n_grid, n_grid);
            return twist_at(params, {q, p}, cfg);
        },
        exec);

    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    return {*it, grid_angle(idx / n_grid, n_grid), linspace(region, idx % n_grid, n_grid), n_grid, region};
}

IntersectionResult curve_intersection_count(const PendulumParams& params, std::span<const CylinderState> curve,
                                            const IntegratorConfig& cfg, const IntersectionOptions& opts,
                                            Execution exec) {
    require_admissible(params);
    const GraphPolyline gamma(curve);
    const std::size_t m = gamma.samples();

    auto image = map_indices(m, [&](std::size_t i) { return poincare_map(params, curve[i], cfg); }, exec);

    IntersectionResult out;
    for (const auto& z : image) out.max_deviation = std::max(out.max_deviation, std::abs(z.p - gamma(z.q)));
    if (out.max_deviation < opts.invariance_tol) {
        out.kind = IntersectionKind::invariant;
        return out;
    }

    // Signed vertical distance of S(Gamma) above Gamma at every vertex of the
    // common refinement of both polylines, walked once around the loop.
    std::vector<double> dist;
    dist.reserve(4 * m);
    std::vector<double> cuts;
    for (std::size_t i = 0; i < m; ++i) {
        const CylinderState a = image[i];
        CylinderState b = image[(i + 1) % m];
        if (i + 1 == m) b.q += kTwoPi;

        cuts.clear();
        cuts.push_back(0.0);
        const double dq = b.q - a.q;
        if (dq != 0.0) {
            const double lo = std::min(a.q, b.q);
            const double hi = std::max(a.q, b.q);
            const auto w0 = static_cast<long long>(std::floor((lo - gamma.base()) / kTwoPi)) - 1;
            const auto w1 = static_cast<long long>(std::floor((hi - gamma.base()) / kTwoPi)) + 1;
            for (long long w = w0; w <= w1; ++w) {
                for (std::size_t j = 0; j < m; ++j) {
                    const double node = gamma.node(j) + kTwoPi * static_cast<double>(w);
                    if (node > lo && node < hi) cuts.push_back((node - a.q) / dq);
                }
            }
            std::sort(cuts.begin(), cuts.end());
        }
        for (double s : cuts) {
            const double q = a.q + s * dq;
            const double p = a.p + s * (b.p - a.p);
            dist.push_back(p - gamma(q));
        }
    }

    bool touching = false;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const double d0 = dist[i];
        const double d1 = dist[(i + 1) % dist.size()];
        if (std::abs(d0) < opts.tangency_tol) touching = true;
        if ((d0 < 0.0 && d1 > 0.0) || (d0 > 0.0 && d1 < 0.0)) ++out.count;
    }
    out.kind = touching ? IntersectionKind::inconclusive : IntersectionKind::crossings;
    return out;
}

std::vector<OrbitPoint> iterate_map(const PendulumParams& params, std::span<const CylinderState> seeds,
                                    std::size_t iterates, const IntegratorConfig& cfg, Execution exec) {
    require_admissible(params);
    const auto per_seed = map_indices(
        seeds.size(),
        [&](std::size_t i) {
            std::vector<OrbitPoint> pts;
            pts.reserve(iterates + 1);
            CylinderState z = seeds[i];
            pts.push_back({i, 0, wrap_angle(z.q), z.p});
            for (std::size_t k = 1; k <= iterates; ++k) {
                z = poincare_map(params, z, cfg);
                z.q = wrap_angle(z.q);
                pts.push_back({i, k, z.q, z.p});
            }
            return pts;
        },
        exec);
    std::vector<OrbitPoint> out;
    out.reserve(seeds.size() * (iterates + 1));
    for (const auto& pts : per_seed) out.insert(out.end(), pts.begin(), pts.end());
    return out;
}

}  // namespace relpend
