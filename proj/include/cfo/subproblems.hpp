#pragma once

#include "cfo/energy.hpp"
#include "cfo/network.hpp"

#include <cstddef>

namespace cfo {

/// w for one segment at stage k: min over t of (lambda_tau_k + time weight) t
/// + lambda_beta_k c_e(t); the time weight is 1 in TIME mode, else 0.
[[nodiscard]] TradeoffMinimum solve_speed_subproblem(const RoadSegment& segment, ObjectiveMode mode,
                                                     double lambda_tau, double lambda_beta);

/// Multipliers seen by the stop between stage k and stage k + 1.
struct StopPrices {
    double tau_in = 0.0;   ///< lambda_tau[k]
    double tau_out = 0.0;  ///< lambda_tau[k+1]
    double beta_in = 0.0;  ///< lambda_beta[k]
    double beta_out = 0.0; ///< lambda_beta[k+1]
};

[[nodiscard]] StopPrices stop_prices(const DualVector& lambda, std::size_t stop);

struct BnbOptions {
    double epsilon = 1e-3;
    std::size_t max_nodes = 200000;
};

struct ChargingSolution {
    double charge = 0.0;  ///< t_c
    double wait = 0.0;    ///< t_w
    double soc = 0.0;     ///< beta
    double arrival = 0.0; ///< tau
    double value = 0.0;   ///< h at the returned point (upper bound on sigma)
    double lower = 0.0;   ///< certified lower bound on sigma
    std::size_t nodes = 0;
    bool certified = false; ///< value - lower <= epsilon
};

/// The charging trade-off h(t_c, t_w, beta, tau) of a station stop.
[[nodiscard]] double charging_tradeoff(const Instance& instance, const ChargingStation& station,
                                       ObjectiveMode mode, const StopPrices& prices, double charge,
                                       double wait, double soc, double arrival);

/// sigma = min of h over [0, t_c^ub] x [t_w^lb, t_w^ub] x [alpha B, B] x [0, T]
/// by branch and bound. Throws ConfigError for an empty box.
[[nodiscard]] ChargingSolution solve_charging_subproblem(const Instance& instance,
                                                         const ChargingStation& station,
                                                         ObjectiveMode mode,
                                                         const StopPrices& prices,
                                                         const BnbOptions& options = {});

/// Pass-through stop at the destination: min over [0, T] x [alpha B, B] of
/// (lambda_tau[k+1] - lambda_tau[k]) tau + (lambda_beta[k] - lambda_beta[k+1]) beta.
struct PassThrough {
    double arrival = 0.0;
    double soc = 0.0;
    double value = 0.0;
    bool tau_free = false;  ///< coefficient zero: any tau in the box is optimal
    bool soc_free = false;
};
[[nodiscard]] PassThrough solve_passthrough(const Instance& instance, const StopPrices& prices);

} // namespace cfo
