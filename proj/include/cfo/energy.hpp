#pragma once

#include "cfo/network.hpp"

namespace cfo {

/// f_e(r) in kW for r in [R_lb, R_ub]; throws DomainError outside.
[[nodiscard]] double power_rate(const RoadSegment& segment, double speed_kmh);

/// c_e(t) = t * f_e(D / t) in kWh for t in [t_lb, t_ub]; negative on
/// regenerative segments. Throws DomainError outside the bounds.
[[nodiscard]] double edge_energy(const RoadSegment& segment, double hours);

/// dc_e/dt = a0 - a2 r^2 - 2 a3 r^3 with r = D / t (no bound checks).
[[nodiscard]] double edge_energy_slope(const RoadSegment& segment, double hours);

struct TradeoffMinimum {
    double t = 0.0;
    double value = 0.0;
};

/// argmin/min of lambda_tau * t + lambda_beta * c_e(t) over [t_lb, t_ub].
/// Ties resolve to the smallest minimizer, and t* is non-increasing in
/// lambda_tau.
[[nodiscard]] TradeoffMinimum minimize_affine_tradeoff(const RoadSegment& segment,
                                                       double lambda_tau, double lambda_beta);

/// min over the feasible travel times of c_e.
[[nodiscard]] double min_edge_energy(const RoadSegment& segment);

/// Grid check of convexity of c_e on [t_lb, t_ub] (second differences on
/// `points` samples, tolerance 1e-9 * max|c_e|).
[[nodiscard]] bool energy_is_convex(const RoadSegment& segment, int points = 1000);

} // namespace cfo
