#pragma once

#include "cfo/charging.hpp"

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cfo {

/// Directed road segment with homogeneous grade. Power draw (kW) is the
/// cubic a0 + a1 r + a2 r^2 + a3 r^3 in the speed r (km/h).
struct RoadSegment {
    EdgeId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    double length_km = 0.0;
    double speed_min_kmh = 0.0;
    double speed_max_kmh = 0.0;
    std::array<double, 4> power_coeffs{};
};

struct TimeBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// (D / R_ub, D / R_lb) in hours; throws DomainError for non-positive speed
/// bounds, inverted bounds or non-positive length.
[[nodiscard]] TimeBounds travel_time_bounds(const RoadSegment& segment);

class TransportGraph {
public:
    TransportGraph() = default;
    TransportGraph(std::size_t node_count, std::vector<RoadSegment> edges);

    [[nodiscard]] std::size_t node_count() const { return node_count_; }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
    [[nodiscard]] const std::vector<RoadSegment>& edges() const { return edges_; }
    [[nodiscard]] const RoadSegment& edge(EdgeId e) const { return edges_.at(e); }
    [[nodiscard]] const std::vector<EdgeId>& out_edges(NodeId v) const { return out_.at(v); }
    [[nodiscard]] const TimeBounds& bounds(EdgeId e) const { return bounds_.at(e); }

    /// Node names are optional labels kept for round-tripping documents.
    std::vector<std::string> node_names;

private:
    std::size_t node_count_ = 0;
    std::vector<RoadSegment> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<TimeBounds> bounds_;
};

struct InstanceParams {
    NodeId origin = 0;
    NodeId destination = 0;
    double deadline_h = 0.0;
    double battery_kwh = 1000.0;
    double initial_soc_kwh = 1000.0;
    std::size_t max_stops = 0;
    double reservation_ratio = 0.0;
    double wait_min_h = 0.0;
    double wait_max_h = 0.0;
    double charge_max_h = 0.0;
    double efficiency = 1.0;
    ObjectiveMode objective = ObjectiveMode::Carbon;
};

struct Instance {
    TransportGraph graph;
    std::vector<ChargingStation> stations;
    InstanceParams params;

    /// Index into `stations` for a station node, nullopt otherwise.
    [[nodiscard]] std::optional<std::size_t> station_at(NodeId v) const;
    [[nodiscard]] double reserve_kwh() const {
        return params.reservation_ratio * params.battery_kwh;
    }
};

/// Lagrange multipliers for the per-stage time (hours) and battery (kWh)
/// constraints, one entry per stage 0..N.
struct DualVector {
    std::vector<double> beta;
    std::vector<double> tau;

    DualVector() = default;
    explicit DualVector(std::size_t stages) : beta(stages, 0.0), tau(stages, 0.0) {}
    [[nodiscard]] std::size_t stages() const { return beta.size(); }
    [[nodiscard]] bool nonnegative() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Report-style check of the model assumptions: segment bounds and energy
/// convexity, charge-curve shape, trace coverage, SoC/box parameters,
/// negative-energy cycles and destination reachability.
[[nodiscard]] ValidationReport validate_instance(const Instance& instance);

/// Bellman-Ford over the per-edge minimum energy; true when some cycle has
/// negative total minimum energy.
[[nodiscard]] bool has_negative_energy_cycle(const TransportGraph& graph);

} // namespace cfo
