#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "relpend/autonomous.hpp"
#include "relpend/parallel.hpp"
#include "relpend/poincare.hpp"
#include "relpend/solver.hpp"

using namespace relpend;

namespace {
struct Threads {
    explicit Threads(int n) { set_max_threads(n); }
    ~Threads() { set_max_threads(0); }
};

const PendulumParams forced(0.2, kTwoPi, 0, ForcingSeries({0.1}, {0.0, 0.05}));
}  // namespace

TEST_CASE("map_indices fills every slot in order") {
    Threads t(4);
    for (auto exec : {Execution::serial, Execution::parallel}) {
        const auto v = map_indices(1000, [](std::size_t i) { return static_cast<double>(i) * 0.5; }, exec);
        REQUIRE(v.size() == 1000);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == 0.5 * static_cast<double>(i));
    }
    CHECK(map_indices(0, [](std::size_t) { return 1; }).empty());
}

TEST_CASE("map_indices rethrows the exception of the lowest failing index") {
    Threads t(4);
    std::atomic<int> calls{0};
    auto fn = [&](std::size_t i) -> int {
        ++calls;
        if (i == 17 || i == 900) throw std::runtime_error("index " + std::to_string(i));
        return 0;
    };
    for (auto exec : {Execution::serial, Execution::parallel}) {
        try {
            (void)map_indices(1000, fn, exec);
            FAIL("expected a throw");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "index 17");
        }
    }
    // The parallel path finishes the loop before rethrowing.
    CHECK(calls.load() >= 1000);
}

TEST_CASE("thread limit is recorded") {
    Threads t(3);
    CHECK(max_threads() == 3);
    set_max_threads(0);
    CHECK(max_threads() >= 1);
    set_max_threads(-5);
    CHECK(max_threads() >= 1);
}

TEST_CASE("parallel kernels are bit-identical to the serial reference") {
    Threads t(4);
    const auto bound = strip_bound(forced);

    const auto ts = twist_margin(forced, {-bound.p_tilde, bound.p_tilde}, 12, {}, Execution::serial);
    const auto tp = twist_margin(forced, {-bound.p_tilde, bound.p_tilde}, 12, {}, Execution::parallel);
    CHECK(ts.min_twist == tp.min_twist);
    CHECK(ts.argmin_q == tp.argmin_q);
    CHECK(ts.argmin_p == tp.argmin_p);

    const auto bs = boundary_twist_check(forced, bound, 64, {}, Execution::serial);
    const auto bp = boundary_twist_check(forced, bound, 64, {}, Execution::parallel);
    CHECK(bs.min_upper == bp.min_upper);
    CHECK(bs.max_lower == bp.max_lower);

    const auto cs = build_reduced_curve(forced, 48, bound, {}, 1e-12, Execution::serial);
    const auto cp = build_reduced_curve(forced, 48, bound, {}, 1e-12, Execution::parallel);
    CHECK(cs.phi == cp.phi);
    CHECK(cs.Phi == cp.Phi);

    const std::vector<CylinderState> seeds{{0.1, 0.2}, {2.0, -0.3}, {4.0, 1.0}};
    const auto is = iterate_map(forced, seeds, 10, {}, Execution::serial);
    const auto ip = iterate_map(forced, seeds, 10, {}, Execution::parallel);
    REQUIRE(is.size() == ip.size());
    for (std::size_t i = 0; i < is.size(); ++i) {
        CHECK(is[i].q == ip[i].q);
        CHECK(is[i].p == ip[i].p);
    }

    std::vector<CylinderState> curve(128);
    for (std::size_t i = 0; i < curve.size(); ++i) curve[i] = {kTwoPi * i / 128.0, 0.3 * std::cos(kTwoPi * i / 128.0)};
    const auto xs = curve_intersection_count(forced, curve, {}, {}, Execution::serial);
    const auto xp = curve_intersection_count(forced, curve, {}, {}, Execution::parallel);
    CHECK(xs.count == xp.count);
    CHECK(xs.max_deviation == xp.max_deviation);

    CHECK(fixed_point_index(PendulumParams(0.2, kTwoPi, 0), {kTwoPi / 2, 0.0}, 1e-3, 64, {}, true, Execution::serial) ==
          fixed_point_index(PendulumParams(0.2, kTwoPi, 0), {kTwoPi / 2, 0.0}, 1e-3, 64, {}, true, Execution::parallel));

    const auto ls = min_libration_period_scan(0.2, 12, {}, Execution::serial);
    const auto lp = min_libration_period_scan(0.2, 12, {}, Execution::parallel);
    CHECK(ls.min_period == lp.min_period);
}

TEST_CASE("find_fixed_points does not depend on the thread count") {
    std::vector<double> q0s;
    for (int threads : {1, 2, 4}) {
        Threads t(threads);
        const auto set = find_fixed_points(forced);
        std::vector<double> q;
        for (const auto& o : set.orbits()) q.push_back(o.q0);
        if (q0s.empty()) q0s = q;
        CHECK(q == q0s);
    }
}
