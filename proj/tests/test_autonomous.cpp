#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "relpend/autonomous.hpp"
#include "relpend/errors.hpp"
#include "relpend/integrate.hpp"

using namespace relpend;
using doctest::Approx;

namespace {
const double pi = std::numbers::pi;

double free_time(double E, int N) { return 2 * N * pi / std::sqrt(1.0 - 1.0 / (E * E)); }

// First time x reaches `target` from (0, v0) for the unforced pendulum,
// by RK4 steps of h and bisection on the step that crosses.
double time_to_reach(double a, double v0, double target, double h) {
    const oracle::Problem pr(PendulumParams(a, 1.0, 0));
    std::array<double, 2> y{0.0, to_momentum(v0)};
    double t = 0.0;
    for (;;) {
        const auto next = oracle::rk4(pr, y, t, t + h, 1);
        if (next[0] >= target) break;
        y = next;
        t += h;
    }
    double lo = 0.0, hi = h;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (oracle::rk4(pr, y, t, t + mid, 1)[0] < target ? lo : hi) = mid;
    }
    return t + 0.5 * (lo + hi);
}
}  // namespace

TEST_CASE("energy classification") {
    CHECK(classify_energy(0.25, 1.0) == EnergyClass::equilibrium_center);
    CHECK(classify_energy(0.25, 1.2) == EnergyClass::libration);
    CHECK(classify_energy(0.25, 1.5) == EnergyClass::separatrix);
    CHECK(classify_energy(0.25, 2.0) == EnergyClass::running);
    CHECK_THROWS_AS((void)classify_energy(0.25, 0.999), DomainError);
    CHECK_THROWS_AS((void)classify_energy(-0.1, 1.5), DomainError);
    CHECK(to_string(EnergyClass::separatrix) == "separatrix");

    std::mt19937_64 rng(51);
    for (int i = 0; i < 200; ++i) {
        const double a = oracle::uniform(rng, 0.01, 2.0);
        CHECK(classify_energy(a, 1.0 + 2.0 * a) == EnergyClass::separatrix);
        const double e1 = oracle::uniform(rng, 1.0, 3.0 + 4 * a), e2 = oracle::uniform(rng, 1.0, 3.0 + 4 * a);
        const auto lo = classify_energy(a, std::min(e1, e2)), hi = classify_energy(a, std::max(e1, e2));
        CHECK(static_cast<int>(lo) <= static_cast<int>(hi));
    }
}

TEST_CASE("running time examples") {
    CHECK(running_time(0.0, 1.25, 1) == Approx(kTwoPi / 0.6).epsilon(1e-10));
    CHECK(std::abs(running_time(0.1, 10.0, 1) / kTwoPi - 1.0) < 0.01);
    CHECK_THROWS_AS((void)running_time(0.1, 1.2, 1), DomainError);
    CHECK_THROWS_AS((void)running_time(0.1, 1.5, 0), DomainError);
}

TEST_CASE("running time matches the time for an integrated orbit to reach 2 pi") {
    const double a = 0.1, E = 1.21;
    const double v0 = running_velocity_at_origin(a, E);
    CHECK(energy(a, {0.0, v0}) == Approx(E).epsilon(1e-14));
    CHECK(std::abs(running_time(a, E, 1) - time_to_reach(a, v0, kTwoPi, 1e-3)) < 1e-7);
}

TEST_CASE("running time in the free case is the closed form") {
    std::mt19937_64 rng(52);
    for (int i = 0; i < 20; ++i) {
        const double E = oracle::uniform(rng, 1.05, 20.0);
        const int N = 1 + i % 3;
        CHECK(std::abs(running_time(0.0, E, N) - free_time(E, N)) < 1e-9);
    }
}

TEST_CASE("running time decreases with energy") {
    for (double a : {0.05, 0.25, 1.0}) {
        double prev = INFINITY;
        for (int i = 0; i < 50; ++i) {
            const double E = 1 + 2 * a + 0.01 + (10.0 - 0.01) * i / 49.0;
            const double t = running_time(a, E, 1);
            CHECK(t < prev);
            CHECK(t > kTwoPi);
            prev = t;
        }
    }
}

TEST_CASE("running energy inversion") {
    CHECK(std::abs(solve_running_energy(0.0, free_time(1.25, 1), 1) - 1.25) < 1e-8);
    CHECK(std::abs(solve_running_energy(0.0, 4 * pi, 1) - 1.0 / std::sqrt(0.75)) < 1e-8);
    for (double E : {1.01, 1.3, 2.0, 7.5}) CHECK(std::abs(solve_running_energy(0.0, free_time(E, 2), 2) - E) < 1e-8);
    const double E = solve_running_energy(0.1, 4 * pi, 1);
    CHECK(E > 1.2);
    CHECK(std::abs(running_time(0.1, E, 1) - 4 * pi) < 1e-9 * 4 * pi);
    CHECK_THROWS_AS((void)solve_running_energy(0.1, kTwoPi, 1), DomainError);
    CHECK_THROWS_AS((void)solve_running_energy(0.1, 5.0, 1), DomainError);
}

TEST_CASE("running orbit conserves energy and reaches 2 pi at T_N") {
    const double a = 0.1, E = 1.5;
    const double TN = running_time(a, E, 1);
    const PendulumParams p(a, TN, 0);
    const CylinderState z{0.0, to_momentum(running_velocity_at_origin(a, E))};
    const auto cfg = IntegratorConfig{}.tightened(100.0);
    const auto rows = sample_trajectory(p, z, 0.0, TN, 51, cfg);
    for (const auto& r : rows) CHECK(std::abs(r.E - E) < 1e-9);
    CHECK(std::abs(rows.back().x - kTwoPi) < 1e-7);
}

TEST_CASE("libration period examples") {
    CHECK(std::abs(libration_period(0.25, 1.0001) / (4 * pi) - 1.0) < 0.005);
    CHECK(libration_period(0.25, 1.4999) > 30.0);
    for (double E = 1.001; E < 1.5; E += 0.05) CHECK(libration_period(0.25, E) > kTwoPi);
    CHECK_THROWS_AS((void)libration_period(0.25, 1.0), DomainError);
    CHECK_THROWS_AS((void)libration_period(0.25, 1.5), DomainError);
}

TEST_CASE("libration period does not depend on the starting turning point") {
    for (double a : {0.1, 0.25, 1.0}) {
        for (double s : {0.01, 0.3, 0.7, 0.95}) {
            const double E = 1.0 + 2.0 * a * s;
            CHECK(std::abs(libration_period(a, E, TurningSide::negative) - libration_period(a, E, TurningSide::positive)) < 1e-10);
        }
    }
}

TEST_CASE("libration period scans") {
    const auto q = min_libration_period_scan(0.25, 50);
    CHECK(q.min_period > kTwoPi);
    CHECK(q.levels == 50);
    const auto grid = libration_energy_grid(0.25, 50);
    REQUIRE(grid.size() == 50);
    CHECK(grid.front() > 1.0);
    CHECK(grid.back() < 1.5);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);

    const auto t = min_libration_period_scan(0.1, 50);
    CHECK(t.min_period > kTwoPi / std::sqrt(0.1) - 1e-3);
    CHECK(t.min_period > kTwoPi);

    // The relativistic correction lengthens the period, so even at a = 1 the
    // smallest sampled period stays just above the linearized 2 pi.
    const auto u = min_libration_period_scan(1.0, 50);
    CHECK(u.min_period > kTwoPi);
    CHECK(u.min_period < kTwoPi * 1.001);

    const auto serial = min_libration_period_scan(0.25, 20, {}, Execution::serial);
    const auto parallel = min_libration_period_scan(0.25, 20, {}, Execution::parallel);
    CHECK(serial.min_period == parallel.min_period);
    CHECK(serial.argmin_E == parallel.argmin_E);
}
