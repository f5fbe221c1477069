#include "support.hpp"

#include "cfo/charging.hpp"
#include "cfo/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace cfo;
using namespace cfo::test;

namespace {

// 0 -> 67 % in 40 min, 67 -> 92 % in the next 20 min, then a slow tail
ChargeCurve datum_curve(double capacity) {
    return ChargeCurve({0.0, 40.0, 60.0, 90.0}, {0.0, 0.67, 0.92, 1.0}, capacity);
}

// midpoint rule split at the curve knots, `steps` cells in total
double quadrature(const ChargingStation& st, double soc, double t_c, double start, double eta,
                  long steps) {
    const ChargeCurve& c = st.curve;
    double u0 = c.time_at(soc);
    double u1 = std::min(u0 + t_c, c.full_time());
    std::vector<double> cuts{u0};
    for (double k : c.knots())
        if (k > u0 && k < u1) cuts.push_back(k);
    cuts.push_back(u1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double a = cuts[i], b = cuts[i + 1];
        long n = std::max(1L, static_cast<long>(steps * (b - a) / (u1 - u0)));
        double h = (b - a) / n;
        double rate = c.rate(0.5 * (a + b));
        double sum = 0.0;
        for (long j = 0; j < n; ++j) sum += st.intensity.curve().eval_clamped(start + a + (j + 0.5) * h - u0);
        total += sum * h * rate;
    }
    return total / eta;
}

} // namespace

TEST_CASE("soc increment datums") {
    const double B = 1000.0;
    CHECK(soc_increment(ChargeCurve::standard(B), 0.0, 300.0) == 0.0);
    CHECK(soc_increment(datum_curve(B), 20.0 / 60.0, 0.67 * B) == doctest::Approx(0.25 * B).epsilon(1e-12));
    CHECK(soc_increment(ChargeCurve::standard(B), 48.0 / 60.0, 0.0) ==
          doctest::Approx(0.80 * B).epsilon(1e-12));
    CHECK(soc_increment(ChargeCurve::standard(B), 10.0, 0.0) == doctest::Approx(B));
    CHECK_THROWS_AS((void)soc_increment(ChargeCurve::standard(B), -1.0, 0.0), DomainError);
    CHECK_THROWS_AS((void)soc_increment(ChargeCurve::standard(B), 1.0, 1200.0), DomainError);
}

TEST_CASE("standard curve shape") {
    ChargeCurve c = ChargeCurve::standard(1000.0);
    CHECK(c.is_concave());
    CHECK(c.knots().size() == 6);
    CHECK(c.full_level() == doctest::Approx(1000.0));
    CHECK(c.time_at(c.soc_at(0.9)) == doctest::Approx(0.9));
    CHECK_THROWS_AS(ChargeCurve({1.0, 2.0}, {0.0, 1.0}, 10.0), ConfigError);
    CHECK_THROWS_AS(ChargeCurve({0.0, 2.0, 2.0}, {0.0, 0.5, 1.0}, 10.0), ConfigError);
}

TEST_CASE("intensity lookup") {
    IntensitySignal gas = IntensitySignal::constant(0.39, 24.0);
    for (double t : {0.0, 3.3, 12.0, 24.0}) CHECK(intensity_at(gas, t) == doctest::Approx(0.39));

    IntensitySignal ramp({0.0, 1.0}, {1.02, 0.0});
    CHECK(intensity_at(ramp, 0.5) == doctest::Approx(0.51));

    IntensitySignal green = IntensitySignal::constant(0.0, 24.0);
    CHECK(intensity_at(green, 7.0) == 0.0);

    CHECK_THROWS_AS((void)intensity_at(ramp, 2.0), DomainError);
}

TEST_CASE("carbon footprint") {
    ChargingStation st = station(0, 1.0, 48.0);
    CHECK(carbon_footprint(st, 400.0, 0.0, 1.0, 0.95) == 0.0);
    for (double soc : {0.0, 250.0, 790.0, 880.0})
        for (double tc : {0.1, 0.5, 1.2})
            CHECK(carbon_footprint(st, soc, tc, 2.0, 1.0) ==
                  doctest::Approx(soc_increment(st.curve, tc, soc)).epsilon(1e-12));

    st.intensity = IntensitySignal({0.0, 2.0, 3.0, 5.5, 8.0, 24.0}, {0.8, 0.2, 0.9, 0.1, 0.5, 0.4});
    double exact = carbon_footprint(st, 500.0, 1.0, 2.4, 0.95);
    double numeric = quadrature(st, 500.0, 1.0, 2.4, 0.95, 1000000);
    CHECK(std::abs(exact - numeric) <= 1e-7 * std::abs(numeric));
}

TEST_CASE("stop cost by mode") {
    ChargingStation st = station(0, 0.39, 48.0);
    std::mt19937_64 rng(11);
    CHECK(stop_cost(ObjectiveMode::Time, st, 300.0, 0.75, 0.25, 1.0, 0.9) == doctest::Approx(1.0));
    for (int i = 0; i < 100; ++i) {
        double soc = uniform(rng, 0, 1000), tc = uniform(rng, 0, 1.25), tw = uniform(rng, 0, 1);
        double arr = uniform(rng, 0, 20);
        CHECK(stop_cost(ObjectiveMode::Energy, st, soc, tc, tw, arr, 1.0) ==
              doctest::Approx(soc_increment(st.curve, tc, soc)));
        CHECK(stop_cost(ObjectiveMode::Carbon, st, soc, tc, tw, arr, 0.95) ==
              doctest::Approx(carbon_footprint(st, soc, tc, arr + tw, 0.95)).epsilon(1e-14));
    }
}

TEST_CASE("objective names round-trip") {
    for (ObjectiveMode m : {ObjectiveMode::Carbon, ObjectiveMode::Energy, ObjectiveMode::Time})
        CHECK(objective_from_string(to_string(m)) == m);
    CHECK_THROWS_AS((void)objective_from_string("CARBON"), ConfigError);
}
