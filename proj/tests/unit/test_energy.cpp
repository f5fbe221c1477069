#include "support.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace cfo;
using namespace cfo::test;

TEST_CASE("power rate evaluates the cubic") {
    CHECK(power_rate(segment(0, 1, 100, 50, 100, {5, 0, 0, 0}), 80) == doctest::Approx(5.0));
    CHECK(power_rate(segment(0, 1, 100, 50, 100, {0, 1, 0, 0}), 60) == doctest::Approx(60.0));
    const double r = 70;
    const double expect = -20 + 0.1 * r + 0.00005 * r * r * r;
    CHECK(power_rate(segment(0, 1, 100, 50, 100, {-20, 0.1, 0, 0.00005}), r) ==
          doctest::Approx(expect).epsilon(1e-14));
    CHECK_THROWS_AS((void)power_rate(segment(0, 1, 100, 50, 100, {5, 0, 0, 0}), 120), DomainError);
}

TEST_CASE("edge energy") {
    CHECK(edge_energy(segment(0, 1, 100, 40, 100, {5, 0, 0, 0}), 2.0) == doctest::Approx(10.0));

    // downhill: negative power across the whole speed range
    RoadSegment down = segment(0, 1, 100, 50, 100, {5, -3, 0, 1.0 / 12960.0});
    for (double t = 1.0; t <= 2.0; t += 0.1) CHECK(edge_energy(down, t) < 0.0);

    CHECK_THROWS_AS((void)edge_energy(down, 0.5), DomainError);

    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        std::array<double, 4> a{uniform(rng, -50, 50), uniform(rng, -2, 2), uniform(rng, 0, 0.01),
                                uniform(rng, 0, 1e-4)};
        RoadSegment s = segment(0, 1, uniform(rng, 10, 300), 50, 100, a);
        double t = uniform(rng, s.length_km / 100, s.length_km / 50);
        double r = s.length_km / t;
        double direct = t * (a[0] + a[1] * r + a[2] * r * r + a[3] * r * r * r);
        CHECK(std::abs(edge_energy(s, t) - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
    }
}

TEST_CASE("affine trade-off minimum") {
    RoadSegment s = segment(0, 1, 200, 50, 100, truck_power(0.7));
    auto fast = minimize_affine_tradeoff(s, 1.0, 0.0);
    CHECK(fast.t == doctest::Approx(2.0));
    CHECK(fast.value == doctest::Approx(2.0));

    auto zero = minimize_affine_tradeoff(s, 0.0, 0.0);
    CHECK(zero.value == 0.0);
    CHECK(zero.t >= 2.0);
    CHECK(zero.t <= 4.0);

    // dense grid
    const double lt = 2.0, lb = 1.0;
    auto m = minimize_affine_tradeoff(s, lt, lb);
    double best = std::numeric_limits<double>::infinity();
    const int n = 1000000;
    for (int i = 0; i <= n; ++i) {
        double t = 2.0 + 2.0 * i / n;
        best = std::min(best, lt * t + lb * edge_energy(s, t));
    }
    CHECK(m.value <= best + 1e-8 * std::abs(best));
    CHECK(m.value >= best - 1e-8 * std::abs(best));
}

TEST_CASE("t* is non-increasing in the time price") {
    RoadSegment s = segment(0, 1, 150, 50, 100, truck_power(0.4));
    double prev = std::numeric_limits<double>::infinity();
    for (double lt = 0.0; lt <= 200.0; lt += 2.5) {
        double t = minimize_affine_tradeoff(s, lt, 1.0).t;
        CHECK(t <= prev + 1e-12);
        prev = t;
    }
}

TEST_CASE("synthetic segments are convex and min energy sits inside the bounds") {
    RoadSegment s = segment(0, 1, 150, 50, 100, truck_power(0.4));
    CHECK(energy_is_convex(s));
    double m = min_edge_energy(s);
    for (double t = 1.5; t <= 3.0; t += 0.01) CHECK(m <= edge_energy(s, t) + 1e-9);
}
