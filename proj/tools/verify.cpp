#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "relpend/autonomous.hpp"
#include "relpend/errors.hpp"
#include "relpend/io.hpp"
#include "relpend/solver.hpp"

namespace relpend::cli {

namespace {

constexpr std::uint64_t kSeed = 0x5eedULL;

class Recorder {
public:
    explicit Recorder(SuiteResult& r) : r_(r) {}

    void below(std::string name, double observed, double limit) { add(std::move(name), observed, limit, false); }
    void at_most(std::string name, double observed, double limit) { add(std::move(name), observed, limit, true); }

private:
    void add(std::string name, double observed, double limit, bool inclusive) {
        const bool ok = inclusive ? observed <= limit : observed < limit;
        r_.checks.push_back({std::move(name), observed, limit, inclusive, ok && std::isfinite(observed)});
    }
    SuiteResult& r_;
};

struct Env {
    PendulumParams params;
    IntegratorConfig integrator;
    SolverConfig solver;
    bool assert_twist;
};

PendulumParams default_params() { return {0.2, kTwoPi, 0, ForcingSeries({0.1}, {})}; }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

PendulumParams unforced_rest_frame(double a, double T) { return {a, T, 0, {}}; }

void suite_model(const Env& env, Recorder& rec) {
    std::mt19937_64 rng(kSeed);
    double roundtrip = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double v = uniform(rng, -0.999, 0.999);
        roundtrip = std::max(roundtrip, std::abs(to_velocity(to_momentum(v)) - v));
    }
    rec.below("to_velocity(to_momentum(v)) - v", roundtrip, 1e-14);

    const auto& p = env.params;
    double excess = -std::numeric_limits<double>::infinity();
    double below_one = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const CylinderState s{uniform(rng, -20.0, 20.0), uniform(rng, -50.0, 50.0)};
        const double t = uniform(rng, 0.0, p.period());
        const auto f = vector_field(p, t, s);
        excess = std::max(excess, std::abs(f.dp) - (p.a() + p.forcing().sup_norm_bound()));
        const LabState lab = to_lab(p, t, s);
        below_one = std::max(below_one, 1.0 - energy(p.a(), lab));
    }
    rec.at_most("|dp/dt| - (a + sup|f|)", excess, 0.0);
    rec.at_most("1 - energy", below_one, 0.0);

    double mean = 0.0;
    for (int set = 0; set < 20; ++set) {
        std::vector<double> c(1 + set % 5), s(1 + (set * 3) % 4);
        for (auto& x : c) x = uniform(rng, -1.0, 1.0);
        for (auto& x : s) x = uniform(rng, -1.0, 1.0);
        const ForcingSeries f(c, s);
        const double T = uniform(rng, 1.0, 20.0);
        constexpr int nodes = 10000;
        double sum = 0.0;
        for (int k = 0; k < nodes; ++k) sum += f.value(T * k / nodes, T);
        mean = std::max(mean, std::abs(sum * T / nodes));
    }
    rec.below("|mean of f over [0, T]|", mean, 1e-12);

    int non_monotone = 0;
    for (int N = -3; N <= 3; ++N) {
        for (double T = 0.5; T < 40.0; T += 0.5) {
            const bool here = admissible({1.0, T, N, {}});
            const bool later = admissible({1.0, T + 0.25, N, {}});
            if (here && !later) ++non_monotone;
        }
    }
    rec.at_most("admissible(T) but not admissible(T')", non_monotone, 0.0);
}

void suite_integrate(const Env& env, Recorder& rec) {
    std::mt19937_64 rng(kSeed + 1);
    const double a = env.params.a();
    const double T = env.params.period();
    const auto rest = unforced_rest_frame(a, T);
    const auto& cfg = env.integrator;

    // A 5(4) pair at rtol 1e-10 drifts by a few 1e-9 over ten periods, so the
    // energy budget is checked at tolerances a hundred times tighter.
    const IntegratorConfig tight = cfg.tightened(100.0);
    double drift = 0.0;
    double vmax = 0.0;
    for (int i = 0; i < 20; ++i) {
        const CylinderState s0{uniform(rng, -std::numbers::pi, std::numbers::pi), uniform(rng, -3.0, 3.0)};
        const auto rows = sample_trajectory(rest, s0, 0.0, 10.0 * T, 11, tight);
        for (const auto& r : rows) {
            drift = std::max(drift, std::abs(r.E - rows.front().E));
            vmax = std::max(vmax, std::abs(r.v));
        }
    }
    rec.below("energy drift over 10 T at rtol / 100 (f = 0, N = 0)", drift, 1e-9);
    rec.below("sampled |v|", vmax, 1.0);

    double reversal = 0.0;
    for (int i = 0; i < 10; ++i) {
        const CylinderState s0{uniform(rng, -3.0, 3.0), uniform(rng, -2.0, 2.0)};
        const auto s1 = flow(rest, s0, 0.0, T, cfg);
        const auto s2 = flow(rest, {s1.q, -s1.p}, 0.0, T, cfg);
        reversal = std::max(reversal, std::hypot(s2.q - s0.q, -s2.p - s0.p));
    }
    rec.below("time-reversal return distance", reversal, 1e-8);

    double tangent = 0.0;
    const auto& p = env.params;
    constexpr double h = 1e-6;
    for (int i = 0; i < 10; ++i) {
        const CylinderState s0{uniform(rng, -3.0, 3.0), uniform(rng, -2.0, 2.0)};
        const auto m = flow_with_tangent(p, s0, 0.0, T, cfg).monodromy;
        const auto qp = flow(p, {s0.q + h, s0.p}, 0.0, T, cfg);
        const auto qm = flow(p, {s0.q - h, s0.p}, 0.0, T, cfg);
        const auto pp = flow(p, {s0.q, s0.p + h}, 0.0, T, cfg);
        const auto pm = flow(p, {s0.q, s0.p - h}, 0.0, T, cfg);
        tangent = std::max({tangent, std::abs((qp.q - qm.q) / (2 * h) - m.m11), std::abs((qp.p - qm.p) / (2 * h) - m.m21),
                            std::abs((pp.q - pm.q) / (2 * h) - m.m12), std::abs((pp.p - pm.p) / (2 * h) - m.m22)});
    }
    rec.below("monodromy vs central differences", tangent, 1e-5);
}

void suite_symplecticity(const Env& env, Recorder& rec) {
    auto worst_det = [&](const PendulumParams& p, std::size_t n) {
        const double pt = strip_bound(p).p_tilde;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const CylinderState s{kTwoPi * i / n, -pt + 2.0 * pt * j / (n - 1)};
                worst = std::max(worst, std::abs(poincare_map_with_tangent(p, s, env.integrator).monodromy.det() - 1.0));
            }
        }
        return worst;
    };
    if (admissible(env.params)) rec.below("|det M - 1| on 16x16 strip (config)", worst_det(env.params, 16), 1e-8);

    std::mt19937_64 rng(kSeed + 2);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double T = uniform(rng, 3.0, 9.0);
        const double a = uniform(rng, 0.01, 1.0) * std::numbers::pi * std::numbers::pi / (T * T);
        const int N = k % 2;
        const PendulumParams p(a, T, N, ForcingSeries({uniform(rng, -0.5, 0.5)}, {0.0, uniform(rng, -0.5, 0.5)}));
        if (admissible(p)) worst = std::max(worst, worst_det(p, 8));
    }
    rec.below("|det M - 1| on 8x8 strips (random twist parameters)", worst, 1e-8);
}

void suite_generating_function(const Env& env, Recorder& rec) {
    const auto& p = env.params;
    if (!admissible(p)) return;
    const auto& cfg = env.integrator;
    const double pt = strip_bound(p).p_tilde;
    constexpr std::size_t n = 8;
    constexpr double h = 1e-5;
    double periodic = 0.0;
    double gradient = 0.0;
    double equivariance = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double th = kTwoPi * i / n;
            const double r = 0.5 * pt * (-1.0 + 2.0 * j / (n - 1));
            periodic = std::max(periodic, std::abs(generating_function(p, th + kTwoPi, r, cfg) - generating_function(p, th, r, cfg)));
            const auto g = generating_function_gradient(p, th, r, cfg);
            const double vt = (generating_function(p, th + h, r, cfg) - generating_function(p, th - h, r, cfg)) / (2 * h);
            const double vr = (generating_function(p, th, r + h, cfg) - generating_function(p, th, r - h, cfg)) / (2 * h);
            gradient = std::max({gradient, std::abs(vt - g.d_theta), std::abs(vr - g.d_r)});
            const auto s0 = poincare_map(p, {th, r}, cfg);
            const auto s1 = poincare_map(p, {th + kTwoPi, r}, cfg);
            equivariance = std::max(equivariance, std::hypot(s1.q - s0.q - kTwoPi, s1.p - s0.p));
        }
    }
    rec.below("|V(theta + 2 pi, r) - V(theta, r)|", periodic, 1e-8);
    rec.below("dV vs P dQ - p dq", gradient, 1e-5);
    rec.below("S(q + 2 pi, p) - S(q, p) - (2 pi, 0)", equivariance, 1e-9);
}

void suite_twist(const Env& env, Recorder& rec) {
    const auto& cfg = env.integrator;
    double weakest = std::numeric_limits<double>::infinity();
    for (double a : {0.05, 0.1, 0.2, 0.24}) {
        const PendulumParams p(a, kTwoPi, 0, {});
        weakest = std::min(weakest, twist_margin(p, {-2.26, 2.26}, 16, cfg).min_twist);
    }
    rec.below("-min dQ/dp0, a <= 0.24, T = 2 pi", -weakest, 0.0);

    const double root = std::sqrt(0.3);
    const double at_03 = twist_at(PendulumParams(0.3, kTwoPi, 0, {}), {0.0, 0.0}, cfg);
    rec.below("dQ/dp0(0,0) at a = 0.3 vs sin(2 pi sqrt a)/sqrt a", std::abs(at_03 - std::sin(kTwoPi * root) / root), 1e-3);
    const double at_025 = twist_at(PendulumParams(0.25, kTwoPi, 0, {}), {0.0, 0.0}, cfg);
    rec.below("dQ/dp0(0,0) at a = 0.25", std::abs(at_025), 1e-7);

    if (env.assert_twist) {
        const auto& p = env.params;
        if (!admissible(p)) throw ParameterError("twist assertion needs admissible parameters");
        const double pt = strip_bound(p).p_tilde;
        double margin = twist_margin(p, {-pt, pt}, 16, cfg).min_twist;
        margin = std::min(margin, twist_at(p, {0.0, 0.0}, cfg));
        rec.below("-min dQ/dp0 for the configured parameters", -margin, 0.0);
    }
}

void suite_solver(const Env& env, Recorder& rec) {
    const auto& p = env.params;
    if (!admissible(p)) return;
    const auto& cfg = env.integrator;
    const auto set = find_fixed_points(p, cfg, env.solver);
    if (set.is_degenerate()) {
        rec.below("max |Phi| of the continuum", set.max_abs_Phi, env.solver.degeneracy_tolerance);
        return;
    }
    const auto& orbits = set.orbits();
    rec.at_most("2 - number of orbits", 2.0 - static_cast<double>(orbits.size()), 0.0);
    rec.at_most("unconverged candidates", static_cast<double>(set.unconverged), 0.0);

    const IntegratorConfig doubled = cfg.tightened(2.0 * env.solver.polish_tightening);
    double residual = 0.0;
    int out_of_range = 0;
    int undefined = 0;
    int sum = 0;
    int unstable = 0;
    int sign_mismatch = 0;
    const StripBound bound = strip_bound(p, env.solver.margin);
    for (const auto& o : orbits) {
        const auto s = poincare_map(p, o.state(), doubled);
        residual = std::max(residual, std::hypot(s.q - o.q0, s.p - o.p0));
        unstable += o.unstable ? 1 : 0;
        if (!o.index) {
            ++undefined;
            continue;
        }
        if (*o.index < -1 || *o.index > 1) ++out_of_range;
        sum += *o.index;
        if (!set.no_twist_fallback) {
            constexpr double h = 1e-4;
            const double slope = (reduced_value(p, o.q0 + h, bound, cfg) - reduced_value(p, o.q0 - h, bound, cfg)) / (2 * h);
            if (std::abs(slope) > 1e-6 && *o.index != (slope > 0.0 ? -1 : 1)) ++sign_mismatch;
        }
    }
    rec.below("|S(z) - z| at doubled accuracy", residual, env.solver.tolerance);
    rec.at_most("orbits without an index", undefined, 0.0);
    rec.at_most("indices outside {-1, 0, 1}", out_of_range, 0.0);
    rec.at_most("|sum of indices|", std::abs(sum), 0.0);
    rec.at_most("orbits flagged unstable < 1", unstable >= 1 ? 0.0 : 1.0, 0.0);
    rec.at_most("index != -sign(Phi')", sign_mismatch, 0.0);
}

void suite_autonomous(const Env& env, Recorder& rec) {
    std::mt19937_64 rng(kSeed + 3);
    const auto& cfg = env.integrator;

    int increases = 0;
    for (double a : {0.05, 0.2, 1.0}) {
        double prev = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 50; ++k) {
            const double E = 1.0 + 2.0 * a + 0.01 + (10.0 - 0.01) * k / 49.0;
            const double t = running_time(a, E, 1);
            if (!(t < prev)) ++increases;
            prev = t;
        }
    }
    rec.at_most("T_N(E) non-decreasing steps", increases, 0.0);

    double closed = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double E = uniform(rng, 1.05, 20.0);
        const int N = 1 + i % 3;
        closed = std::max(closed, std::abs(running_time(0.0, E, N) - kTwoPi * N / std::sqrt(1.0 - 1.0 / (E * E))));
    }
    rec.below("free T_N(E) vs 2 N pi / sqrt(1 - 1/E^2)", closed, 1e-9);

    double symmetry = 0.0;
    for (double E : {1.01, 1.2, 1.45}) {
        symmetry = std::max(symmetry, std::abs(libration_period(0.25, E, TurningSide::negative, cfg) -
                                               libration_period(0.25, E, TurningSide::positive, cfg)));
    }
    rec.below("libration period under x0 -> -x0", symmetry, 1e-10);

    int misclassified = 0;
    misclassified += classify_energy(0.25, 1.0) != EnergyClass::equilibrium_center;
    misclassified += classify_energy(0.25, 1.5) != EnergyClass::separatrix;
    misclassified += classify_energy(0.25, std::nextafter(1.5, 0.0)) != EnergyClass::libration;
    misclassified += classify_energy(0.25, std::nextafter(1.5, 2.0)) != EnergyClass::running;
    rec.at_most("energy classes at the boundaries", misclassified, 0.0);

    // A running orbit integrated directly reaches 2 pi at T_1(E) and keeps E.
    double reach = 0.0;
    double conserve = 0.0;
    for (double E : {1.25, 1.6, 3.0}) {
        const double a = 0.1;
        const double tn = running_time(a, E, 1);
        const PendulumParams rest(a, tn, 0, {});
        const CylinderState s0{0.0, to_momentum(running_velocity_at_origin(a, E))};
        const auto rows = sample_trajectory(rest, s0, 0.0, tn, 5, cfg.tightened(100.0));
        reach = std::max(reach, std::abs(rows.back().q - kTwoPi));
        for (const auto& r : rows) conserve = std::max(conserve, std::abs(r.E - E));
    }
    rec.below("x(T_1(E)) - 2 pi", reach, 1e-7);
    rec.below("energy along the running orbit at rtol / 100", conserve, 1e-9);

    const PendulumParams run(0.1, 2.0 * kTwoPi, 1, {});
    const double E = solve_running_energy(0.1, run.period(), 1);
    const CylinderState z{0.0, to_momentum(running_velocity_at_origin(0.1, E))};
    const auto lab = reconstruct_lab_solution(run, z, 65, cfg);
    rec.below("x(T) - x(0) - 2 pi (a = 0.1, T = 4 pi)", std::abs(lab.back().x - lab.front().x - kTwoPi), 1e-8);

    const auto scan = min_libration_period_scan(0.25, 50, cfg);
    rec.below("2 pi - min libration period (a = 1/4)", kTwoPi - scan.min_period, 0.0);
}

using SuiteFn = std::function<void(const Env&, Recorder&)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> suites = {
        {"model", suite_model},
        {"integrate", suite_integrate},
        {"symplecticity", suite_symplecticity},
        {"generating-function", suite_generating_function},
        {"twist", suite_twist},
        {"solver", suite_solver},
        {"autonomous", suite_autonomous},
    };
    return suites;
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << std::scientific << v;
    return os.str();
}

}  // namespace

bool SuiteResult::passed() const noexcept {
    if (!error.empty()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const CheckResult* SuiteResult::worst() const noexcept {
    const CheckResult* pick = nullptr;
    double score = -std::numeric_limits<double>::infinity();
    for (const auto& c : checks) {
        if (!c.passed) return &c;
        // Closeness to a positive limit on a log scale; counts against zero rank last.
        double s = -std::numeric_limits<double>::max();
        if (c.limit > 0.0) s = c.observed > 0.0 ? std::log10(c.observed / c.limit) : -1000.0;
        if (!pick || s > score) {
            pick = &c;
            score = s;
        }
    }
    return pick;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, _] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

SuiteResult run_suite(const std::string& name, const RunConfig& cfg) {
    SuiteResult result;
    result.suite = name;
    const auto& reg = registry();
    const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == name; });
    if (it == reg.end()) throw ConfigError("unknown verify suite \"" + name + "\"");
    const Env env{cfg.params.value_or(default_params()), cfg.integrator, cfg.solver, cfg.verify.assert_twist};
    Recorder rec(result);
    try {
        it->second(env, rec);
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

int cmd_verify(const RunConfig& cfg, Streams io) {
    const auto& selected = cfg.verify.suites.empty() ? suite_names() : cfg.verify.suites;
    for (const auto& name : selected) {
        if (std::find(suite_names().begin(), suite_names().end(), name) == suite_names().end()) {
            throw ConfigError("unknown verify suite \"" + name + "\"");
        }
    }
    bool all = true;
    for (const auto& name : selected) {
        const SuiteResult r = run_suite(name, cfg);
        const bool ok = r.passed();
        all = all && ok;
        io.out << (ok ? "PASS " : "FAIL ") << std::left << std::setw(20) << name;
        if (!r.error.empty()) {
            io.out << " error: " << r.error << "\n";
            continue;
        }
        if (const CheckResult* w = r.worst()) {
            io.out << (ok ? " worst: " : " failing: ") << w->name << " = " << sci(w->observed)
                   << (w->inclusive ? " (limit <= " : " (limit < ") << sci(w->limit) << ")";
        } else {
            io.out << " (no checks apply to these parameters)";
        }
        io.out << "\n";
    }
    io.out << (all ? "all suites passed\n" : "verification failed\n");
    return all ? exit_code::ok : exit_code::verify_failed;
}

}  // namespace relpend::cli
