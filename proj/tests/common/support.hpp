#pragma once

#include "cfo/network.hpp"

#include <array>
#include <random>
#include <vector>

namespace cfo::test {

inline RoadSegment segment(NodeId from, NodeId to, double km, double rlb, double rub,
                           std::array<double, 4> coeffs) {
    RoadSegment s;
    s.from = from;
    s.to = to;
    s.length_km = km;
    s.speed_min_kmh = rlb;
    s.speed_max_kmh = rub;
    s.power_coeffs = coeffs;
    return s;
}

// aux + grade/rolling term + cubic drag, roughly the generator's truck
inline std::array<double, 4> truck_power(double linear) { return {5.0, linear, 0.0, 1.0 / 12960.0}; }

inline ChargingStation station(NodeId node, double intensity, double horizon, double battery = 1000.0) {
    ChargingStation st;
    st.node = node;
    st.curve = ChargeCurve::standard(battery);
    st.intensity = IntensitySignal::constant(intensity, horizon);
    return st;
}

/// s=0 -> 1 -> 2=d, station at node 1, both edges `km` long.
inline Instance line3(double km = 400.0, double intensity = 0.39, double deadline = 12.0,
                      std::size_t stops = 1) {
    std::vector<RoadSegment> edges{segment(0, 1, km, 50, 100, truck_power(0.6)),
                                   segment(1, 2, km, 50, 100, truck_power(0.6))};
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].id = i;
    Instance inst;
    inst.graph = TransportGraph(3, edges);
    inst.stations.push_back(station(1, intensity, deadline + 24.0));
    inst.params.origin = 0;
    inst.params.destination = 2;
    inst.params.deadline_h = deadline;
    inst.params.max_stops = stops;
    inst.params.reservation_ratio = 0.05;
    inst.params.wait_min_h = 0.1;
    inst.params.wait_max_h = 2.0;
    inst.params.charge_max_h = 1.25;
    inst.params.efficiency = 0.95;
    return inst;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace cfo::test
