#include "cfo/energy.hpp"

#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cfo {

namespace {

// relative slack for bound checks; travel times computed as D / R can land a
// rounding step outside [t_lb, t_ub]
constexpr double kBoundSlack = 1e-12;

bool within(double x, double lo, double hi) {
    double pad = kBoundSlack * std::max({1.0, std::abs(lo), std::abs(hi)});
    return x >= lo - pad && x <= hi + pad;
}

double energy_unchecked(const RoadSegment& s, double t) {
    const auto& a = s.power_coeffs;
    double r = s.length_km / t;
    return t * (a[0] + r * (a[1] + r * (a[2] + r * a[3])));
}

} // namespace

double power_rate(const RoadSegment& segment, double speed_kmh) {
    if (!within(speed_kmh, segment.speed_min_kmh, segment.speed_max_kmh))
        throw DomainError("power_rate: speed " + std::to_string(speed_kmh) +
                          " km/h outside the segment bounds");
    const auto& a = segment.power_coeffs;
    double r = speed_kmh;
    return a[0] + r * (a[1] + r * (a[2] + r * a[3]));
}

double edge_energy(const RoadSegment& segment, double hours) {
    TimeBounds b = travel_time_bounds(segment);
    if (!within(hours, b.lower, b.upper))
        throw DomainError("edge_energy: travel time " + std::to_string(hours) +
                          " h outside the segment bounds");
    return energy_unchecked(segment, hours);
}

double edge_energy_slope(const RoadSegment& segment, double hours) {
    const auto& a = segment.power_coeffs;
    double r = segment.length_km / hours;
    return a[0] - a[2] * r * r - 2.0 * a[3] * r * r * r;
}

TradeoffMinimum minimize_affine_tradeoff(const RoadSegment& segment, double lambda_tau,
                                         double lambda_beta) {
    if (lambda_tau < 0.0 || lambda_beta < 0.0)
        throw DomainError("minimize_affine_tradeoff: multipliers must be non-negative");
    TimeBounds b = travel_time_bounds(segment);
    auto g = [&](double t) { return lambda_tau * t + lambda_beta * energy_unchecked(segment, t); };
    auto dg = [&](double t) { return lambda_tau + lambda_beta * edge_energy_slope(segment, t); };

    if (b.upper <= b.lower || dg(b.lower) >= 0.0) return {b.lower, g(b.lower)};
    if (dg(b.upper) < 0.0) return {b.upper, g(b.upper)};
    // g' is non-decreasing; find the first point where it turns non-negative.
    // A fixed iteration count keeps the result monotone in lambda_tau.
    double lo = b.lower, hi = b.upper;
    for (int it = 0; it < 80 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (dg(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return {hi, g(hi)};
}

double min_edge_energy(const RoadSegment& segment) {
    return minimize_affine_tradeoff(segment, 0.0, 1.0).value;
}

bool energy_is_convex(const RoadSegment& segment, int points) {
    TimeBounds b = travel_time_bounds(segment);
    if (b.upper <= b.lower) return true;
    points = std::max(points, 3);
    std::vector<double> c(static_cast<std::size_t>(points));
    double scale = 0.0;
    for (int k = 0; k < points; ++k) {
        double t = b.lower + (b.upper - b.lower) * k / (points - 1);
        c[static_cast<std::size_t>(k)] = energy_unchecked(segment, t);
        scale = std::max(scale, std::abs(c[static_cast<std::size_t>(k)]));
    }
    for (std::size_t k = 1; k + 1 < c.size(); ++k)
        if (c[k - 1] - 2.0 * c[k] + c[k + 1] < -1e-9 * scale) return false;
    return true;
}

} // namespace cfo
