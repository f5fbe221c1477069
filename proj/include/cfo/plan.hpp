#pragma once

#include "cfo/network.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfo {

/// One stage's subpath with a travel time per segment.
struct StagePath {
    std::vector<EdgeId> edges;
    std::vector<double> travel_times;
};

enum class StopKind { Station, Destination };

/// Stop k ends stage k. A destination stop is a pass-through at d: the
/// remaining stages are empty and its wait and charge are zero.
struct Stop {
    NodeId node = 0;
    StopKind kind = StopKind::Station;
    double arrival = 0.0; ///< scheduled tau (hours)
    double soc = 0.0;     ///< scheduled beta at entry (kWh)
    double wait = 0.0;
    double charge = 0.0;
};

/// stages.size() == stops.size() + 1. The last stage ends at d, where the
/// plan schedules (destination_arrival, destination_soc).
struct Plan {
    std::vector<StagePath> stages;
    std::vector<Stop> stops;
    double destination_arrival = 0.0;
    double destination_soc = 0.0;

    [[nodiscard]] std::size_t stage_count() const { return stages.size(); }
    /// Scheduled tau / beta at the end of stage k (stop k, or d for the last stage).
    [[nodiscard]] double tau_end(std::size_t k) const;
    [[nodiscard]] double beta_end(std::size_t k) const;
};

struct Residuals {
    std::vector<double> tau;  ///< hours
    std::vector<double> beta; ///< kWh
    [[nodiscard]] double max_value() const;
    [[nodiscard]] double max_abs() const;
};

/// Empty when the plan is structurally valid for the instance, else the reason.
[[nodiscard]] std::optional<std::string> structure_error(const Plan& plan, const Instance& instance);

/// Appends destination pass-through stops until the plan has `stops` stops.
[[nodiscard]] Plan pad_plan(Plan plan, const Instance& instance, std::size_t stops);

/// Travel time of stage k plus the stop time spent before it, minus the
/// scheduled window tau_k - tau_{k-1} (tau_{-1} = 0).
[[nodiscard]] double residual_tau(const Plan& plan, const Instance& instance, std::size_t stage);
/// Energy of stage k plus beta_k minus beta_{k-1} and the energy charged at
/// stop k-1 (beta_{-1} = beta_0).
[[nodiscard]] double residual_beta(const Plan& plan, const Instance& instance, std::size_t stage);
[[nodiscard]] Residuals residuals(const Plan& plan, const Instance& instance);

struct SocTrace {
    std::vector<double> values; ///< SoC after each traversed segment
    double min = 0.0;
};

/// Replays the route from beta_0: subtracts every segment's energy and
/// applies each stop's charging to the running SoC (saturating at B).
[[nodiscard]] SocTrace soc_trace(const Plan& plan, const Instance& instance);

/// Sufficient condition for a subpath started at SoC <= B and ended at
/// >= alpha B never to dip below zero.
[[nodiscard]] bool lemma1_holds(const std::vector<double>& energies, double alpha);

struct EvaluateOptions {
    double tolerance = 1e-6;
    bool strict_soc = false;
};

struct PlanSummary {
    double objective = 0.0;   ///< in the instance's objective mode
    double carbon_kg = 0.0;
    double energy_kwh = 0.0;  ///< traction energy, sum of c_e
    double charged_kwh = 0.0;
    double distance_km = 0.0;
    double time_h = 0.0;      ///< travel plus stop time
    double min_soc = 0.0;
    double max_residual = 0.0;
    bool feasible = false;
    std::string violation;    ///< first failed check when infeasible
};

/// Objective contribution of one stop in the given mode, with the intensity
/// held constant past the trace ends.
[[nodiscard]] double stop_objective(ObjectiveMode mode, const ChargingStation& station,
                                    const Stop& stop, double efficiency);

/// Throws ConfigError for structurally invalid plans.
[[nodiscard]] PlanSummary evaluate(const Plan& plan, const Instance& instance,
                                   const EvaluateOptions& options = {});
[[nodiscard]] PlanSummary evaluate(const Plan& plan, const Instance& instance, ObjectiveMode mode,
                                   const EvaluateOptions& options = {});

/// -sum(lambda * delta): the weak-duality gap bound for a feasible plan.
[[nodiscard]] double lagrangian_gap(const DualVector& lambda, const Residuals& delta);

} // namespace cfo
