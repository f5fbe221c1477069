#pragma once

#include "cfo/plan.hpp"
#include "cfo/subproblems.hpp"

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

namespace cfo {

inline constexpr EdgeId kNoEdge = static_cast<EdgeId>(-1);

/// Shortest paths of one stage from one source.
struct PathTree {
    NodeId source = 0;
    std::vector<double> dist; ///< +inf when unreachable
    std::vector<EdgeId> pred; ///< tree edge into each node, kNoEdge at the source
    std::vector<NodeId> pred_node;
    [[nodiscard]] std::vector<EdgeId> path_to(NodeId target) const;
};

/// Bellman-Ford from every source with per-edge weights (possibly negative).
/// Throws SolverError("non-physical regeneration cycle") on a negative cycle.
[[nodiscard]] std::vector<PathTree> all_pairs_stage_paths(const TransportGraph& graph,
                                                          std::span<const double> weights,
                                                          std::span<const NodeId> sources);

/// Speed-subproblem minimizers and values w of every segment at one stage.
struct StageSpeeds {
    std::vector<double> time;
    std::vector<double> weight;
};
[[nodiscard]] StageSpeeds stage_speeds(const Instance& instance, const DualVector& lambda,
                                       std::size_t stage, ObjectiveMode mode);

/// Inputs of the stop-selection problem. Sources are indexed 0 = origin and
/// 1 + j = station j; targets j = station j and `stations` = destination.
struct OuterInput {
    std::size_t stops = 0;
    std::size_t stations = 0;
    std::vector<std::vector<std::vector<double>>> sp; ///< [stage][source][target]
    std::vector<std::vector<double>> sigma;           ///< [stop][station]
    std::vector<double> pass;                         ///< [stop] pass-through value at d
    double constant = 0.0;
};

struct ExtendedNode {
    enum class Kind { Origin, Station, Destination, Sink };
    Kind kind = Kind::Origin;
    std::size_t layer = 0;   ///< 0 for the origin, i for copies at stop i - 1, N + 1 for the sink
    std::size_t station = 0; ///< station index for Kind::Station
};

struct ExtendedEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double weight = 0.0;
};

/// Layered graph: origin, station copies v^i and destination copies d^i for
/// i = 1..N, and the sink. Node ids follow the layer order. Unreachable
/// connections get no edge.
struct ExtendedGraph {
    std::vector<ExtendedNode> nodes;
    std::vector<ExtendedEdge> edges;
    std::size_t source = 0;
    std::size_t sink = 0;
};
[[nodiscard]] ExtendedGraph build_extended_graph(const OuterInput& input);

struct OuterSolution {
    /// One entry per stop: station index, or nullopt for a pass-through at d.
    std::vector<std::optional<std::size_t>> stops;
    double cost = 0.0;  ///< shortest-path cost in the extended graph
    double value = 0.0; ///< constant + cost
};
/// Layered shortest path; ties prefer pass-through and lower station index.
/// Throws InfeasibleStructure when the sink is unreachable.
[[nodiscard]] OuterSolution solve_outer(const OuterInput& input);

/// Memo of charging-subproblem solutions keyed by station, mode and prices.
class ChargingCache {
public:
    const ChargingSolution& get(const Instance& instance, std::size_t station, ObjectiveMode mode,
                                const StopPrices& prices, const BnbOptions& options);
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

private:
    using Key = std::tuple<std::size_t, int, double, double, double, double>;
    std::map<Key, ChargingSolution> entries_;
};

struct DualEvaluation {
    double value = 0.0;    ///< D(lambda), certified (uses the BnB lower bounds)
    double constant = 0.0; ///< boundary terms at s and d
    OuterSolution outer;
    Plan plan;             ///< the minimizer, padded to N stops
    Residuals residuals;
    double objective = 0.0;
    double slack = 0.0;    ///< sum over selected stops of sigma value - lower
    std::size_t bnb_nodes = 0;
};

[[nodiscard]] DualEvaluation evaluate_dual(const Instance& instance, const DualVector& lambda,
                                           ObjectiveMode mode, const BnbOptions& options = {},
                                           ChargingCache* cache = nullptr);

/// (lambda + theta * delta)_+ componentwise.
[[nodiscard]] DualVector dual_update(const DualVector& lambda, const Residuals& delta, double theta);
/// Separate step sizes for the time and battery components.
[[nodiscard]] DualVector dual_update(const DualVector& lambda, const Residuals& delta,
                                     double theta_tau, double theta_beta);

enum class Termination { Optimal, IterationLimit, Recovered, Infeasible };
[[nodiscard]] const char* to_string(Termination t);

struct IterationRecord {
    std::size_t k = 0;
    double dual = 0.0;
    double max_residual = 0.0;
    std::optional<double> best_feasible;
    double gap_bound = 0.0; ///< best feasible - best dual, +inf without a feasible plan
    DualVector lambda;
    Residuals residuals;
};

struct SolverOptions {
    std::size_t iterations = 200;
    /// theta_k = step / sqrt(K)
    double step = 1.0;
    /// Divide residuals by their natural scale (T, B) and multiply the step by
    /// the objective scale so one step setting fits all three modes.
    bool scale_residuals = true;
    bool polyak = false;
    double tolerance = 1e-6;
    bool strict_soc = false;
    BnbOptions bnb;
    std::optional<ObjectiveMode> objective;
    /// Recover from at most this many distinct routes when no iterate is feasible.
    std::size_t recovery_routes = 16;
    /// When none of those recovers, try up to this many station sequences
    /// joined by least-energy paths.
    std::size_t fallback_routes = 256;
    std::function<void(const IterationRecord&)> on_iteration;
    bool keep_log = true;
};

struct SolverReport {
    std::optional<Plan> plan;
    std::optional<PlanSummary> summary;
    double best_dual = 0.0;
    std::vector<IterationRecord> log;
    Termination termination = Termination::Infeasible;
    std::size_t iterations = 0;
    /// Iteration whose minimizer is the returned plan (unset when recovered).
    std::optional<std::size_t> plan_iteration;
    DualVector plan_lambda;
    Residuals plan_residuals;
    double plan_slack = 0.0;
    double gap = 0.0; ///< posterior_gap(*this), cached
};

[[nodiscard]] SolverReport run(const Instance& instance, const SolverOptions& options = {});

/// For a plan produced by an iterate: -sum(lambda * delta) plus the BnB slack
/// of its stops. For a recovered plan: objective - best dual. +inf without a plan.
[[nodiscard]] double posterior_gap(const SolverReport& report);

/// A path plus its station stops; stages.size() == stops.size() + 1.
struct Route {
    std::vector<std::vector<EdgeId>> stages;
    std::vector<NodeId> stops;
};
/// Drops destination pass-through stops and their empty stages.
[[nodiscard]] Route route_of(const Plan& plan);

struct RecoveryOptions {
    bool optimize_speed = true;
    bool optimize_wait = true;
    /// When false every stop charges the minimum the next stage needs.
    bool optimize_charge = true;
    double tolerance = 1e-6;
    bool strict_soc = false;
    std::size_t max_evaluations = 20000;
};

/// Fastest speeds with minimum charging, then coordinate descent over
/// per-stage speed, per-stop wait and departure SoC. nullopt when the route
/// cannot meet the deadline or the energy balance.
[[nodiscard]] std::optional<Plan> recover_feasible(const Instance& instance, const Route& route,
                                                   ObjectiveMode mode,
                                                   const RecoveryOptions& options = {});

/// Station sequences of length 0..N joined by least-energy stage paths,
/// shorter sequences first, at most `limit` of them.
[[nodiscard]] std::vector<Route> least_energy_routes(const Instance& instance, std::size_t limit);

/// Objective scale used to normalise steps: B pi_max / eta, B / eta or T.
[[nodiscard]] double objective_scale(const Instance& instance, ObjectiveMode mode);

} // namespace cfo
