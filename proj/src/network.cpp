#include "cfo/network.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace cfo {

TimeBounds travel_time_bounds(const RoadSegment& segment) {
    if (!(segment.length_km > 0.0))
        throw DomainError("segment " + std::to_string(segment.id) + ": length must be positive");
    if (!(segment.speed_min_kmh > 0.0) || !(segment.speed_max_kmh > 0.0))
        throw DomainError("segment " + std::to_string(segment.id) +
                          ": speed bounds must be positive");
    if (segment.speed_min_kmh > segment.speed_max_kmh)
        throw DomainError("segment " + std::to_string(segment.id) + ": speed bounds inverted");
    return {segment.length_km / segment.speed_max_kmh, segment.length_km / segment.speed_min_kmh};
}

TransportGraph::TransportGraph(std::size_t node_count, std::vector<RoadSegment> edges)
    : node_count_(node_count), edges_(std::move(edges)), out_(node_count) {
    bounds_.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        RoadSegment& seg = edges_[e];
        seg.id = e;
        if (seg.from >= node_count_ || seg.to >= node_count_)
            throw ConfigError("segment " + std::to_string(e) + " references an unknown node");
        out_[seg.from].push_back(e);
        bounds_.push_back(travel_time_bounds(seg));
    }
}

std::optional<std::size_t> Instance::station_at(NodeId v) const {
    for (std::size_t k = 0; k < stations.size(); ++k)
        if (stations[k].node == v) return k;
    return std::nullopt;
}

bool DualVector::nonnegative() const {
    auto ok = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0; });
    };
    return beta.size() == tau.size() && ok(beta) && ok(tau);
}

bool has_negative_energy_cycle(const TransportGraph& graph) {
    const std::size_t n = graph.node_count();
    std::vector<double> weight(graph.edge_count());
    for (std::size_t e = 0; e < graph.edge_count(); ++e) weight[e] = min_edge_energy(graph.edge(e));
    // virtual source connected to every node with weight 0
    std::vector<double> dist(n, 0.0);
    for (std::size_t round = 0; round < n; ++round) {
        bool changed = false;
        for (const RoadSegment& seg : graph.edges()) {
            double cand = dist[seg.from] + weight[seg.id];
            if (cand < dist[seg.to] - 1e-12 * std::max(1.0, std::abs(cand))) {
                dist[seg.to] = cand;
                changed = true;
            }
        }
        if (!changed) return false;
    }
    return true;
}

namespace {

bool reachable(const TransportGraph& graph, NodeId from, NodeId to) {
    std::vector<char> seen(graph.node_count(), 0);
    std::queue<NodeId> open;
    open.push(from);
    seen[from] = 1;
    while (!open.empty()) {
        NodeId v = open.front();
        open.pop();
        if (v == to) return true;
        for (EdgeId e : graph.out_edges(v)) {
            NodeId w = graph.edge(e).to;
            if (!seen[w]) {
                seen[w] = 1;
                open.push(w);
            }
        }
    }
    return false;
}

} // namespace

ValidationReport validate_instance(const Instance& instance) {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };
    const InstanceParams& p = instance.params;
    const TransportGraph& g = instance.graph;

    if (!(p.deadline_h > 0.0)) fail("deadline must be positive");
    if (!(p.battery_kwh > 0.0)) fail("battery capacity must be positive");
    if (!(p.reservation_ratio >= 0.0 && p.reservation_ratio < 1.0))
        fail("reservation ratio must lie in [0, 1)");
    if (p.initial_soc_kwh < instance.reserve_kwh() || p.initial_soc_kwh > p.battery_kwh)
        fail("initial SoC outside [alpha B, B]");
    if (!(p.efficiency > 0.0 && p.efficiency <= 1.0)) fail("efficiency must lie in (0, 1]");
    if (p.wait_min_h < 0.0 || p.wait_min_h > p.wait_max_h) fail("wait bounds empty or negative");
    if (p.charge_max_h < 0.0) fail("charge bound must be non-negative");

    bool nodes_ok = p.origin < g.node_count() && p.destination < g.node_count();
    if (!nodes_ok) fail("origin or destination is not a graph node");
    else if (p.origin == p.destination) fail("origin equals destination");

    for (const RoadSegment& seg : g.edges()) {
        try {
            (void)travel_time_bounds(seg);
        } catch (const DomainError& e) {
            fail(e.what());
            continue;
        }
        if (!energy_is_convex(seg))
            fail("energy function not convex on segment " + std::to_string(seg.id));
    }

    std::vector<char> seen_station(g.node_count(), 0);
    for (const ChargingStation& st : instance.stations) {
        std::string tag = "station at node " + std::to_string(st.node);
        if (st.node >= g.node_count()) {
            fail(tag + ": unknown node");
            continue;
        }
        if (seen_station[st.node]) fail(tag + ": duplicate station");
        seen_station[st.node] = 1;
        if (st.curve.knots().empty()) {
            fail(tag + ": missing charge curve");
            continue;
        }
        if (!st.curve.is_concave()) fail(tag + ": charge curve not concave");
        if (std::abs(st.curve.full_level() - p.battery_kwh) > 1e-9 * p.battery_kwh)
            fail(tag + ": charge curve does not end at the battery capacity");
        if (st.intensity.curve().empty()) {
            fail(tag + ": missing intensity signal");
            continue;
        }
        if (!st.intensity.covers(0.0, p.deadline_h))
            fail(tag + ": intensity undefined on [0, T]");
        auto ys = st.intensity.curve().ys();
        if (std::any_of(ys.begin(), ys.end(), [](double y) { return y < 0.0; }))
            fail(tag + ": negative carbon intensity");
    }

    if (nodes_ok && p.origin != p.destination && !reachable(g, p.origin, p.destination))
        fail("destination unreachable from origin");
    if (report.ok() && has_negative_energy_cycle(g))
        fail("negative minimum-energy cycle (non-physical regeneration)");
    return report;
}

} // namespace cfo
