#pragma once

#include "cfo/plan.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace cfo {

/// The instance is beyond the size the brute-force search accepts.
class OracleRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleConfig {
    std::size_t time_points = 9;   ///< G_t, stage travel time grid
    std::size_t charge_points = 9; ///< G_c, charge time grid on [0, t_c^ub]
    std::size_t wait_points = 5;   ///< G_w, wait grid on [t_w^lb, t_w^ub]
    std::size_t max_path_length = 8;
    std::optional<ObjectiveMode> mode; ///< defaults to the instance's objective
    bool strict_soc = true;
    /// Reservation ratios whose "charge exactly what the next stage needs"
    /// times join the charge grid; the instance's own ratio is always used.
    /// Sweeps over alpha pass the whole sweep here so their grids coincide.
    std::vector<double> reserve_levels;
};

struct OracleLimits {
    std::size_t max_nodes = 15;
    std::size_t max_stations = 4;
    std::size_t max_stops = 2;
    std::size_t max_path_length = 8;
};

struct OracleResult {
    bool feasible = false;
    Plan plan;                 ///< padded to N stops
    PlanSummary summary;
    double objective = 0.0;    ///< +inf when infeasible
    double error_bound = 0.0;  ///< largest objective change from one grid step at the optimum
    std::size_t evaluated = 0; ///< complete candidate plans scored
};

/// Throws OracleRefusal when the instance exceeds the limits and ConfigError
/// for a grid with fewer than two points.
[[nodiscard]] OracleResult enumerate_optimal(const Instance& instance, const OracleConfig& config = {},
                                             const OracleLimits& limits = {});

/// Same grid with every resolution r replaced by 2r - 1, so the points nest.
[[nodiscard]] OracleConfig refined(const OracleConfig& config);

/// Segment times of the least-energy way to drive `path` in `hours`
/// (clamped to the feasible range of the path).
struct StageAllocation {
    std::vector<double> times;
    double hours = 0.0;
    double energy = 0.0;
    double peak = 0.0; ///< largest prefix energy, at least 0
};
[[nodiscard]] StageAllocation least_energy_allocation(const TransportGraph& graph,
                                                      const std::vector<EdgeId>& path, double hours);

/// Simple paths from `from` to `to` with at most `max_edges` edges.
[[nodiscard]] std::vector<std::vector<EdgeId>> simple_paths(const TransportGraph& graph, NodeId from,
                                                            NodeId to, std::size_t max_edges);

} // namespace cfo
