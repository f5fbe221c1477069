#include "cfo/solver.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfo {

Route route_of(const Plan& plan) {
    Route r;
    std::vector<EdgeId> current;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const auto& e = plan.stages[k].edges;
        current.insert(current.end(), e.begin(), e.end());
        if (k < plan.stops.size() && plan.stops[k].kind == StopKind::Station) {
            r.stages.push_back(std::move(current));
            current.clear();
            r.stops.push_back(plan.stops[k].node);
        }
    }
    r.stages.push_back(std::move(current));
    return r;
}

std::vector<Route> least_energy_routes(const Instance& instance, std::size_t limit) {
    const InstanceParams& p = instance.params;
    const TransportGraph& g = instance.graph;
    std::vector<double> weights;
    for (const RoadSegment& e : g.edges()) weights.push_back(min_edge_energy(e));
    std::vector<NodeId> sources{p.origin};
    for (const ChargingStation& st : instance.stations) sources.push_back(st.node);
    std::vector<PathTree> trees = all_pairs_stage_paths(g, weights, sources);

    std::vector<Route> out;
    // breadth-first over sequences so shorter ones come first
    std::vector<std::vector<std::size_t>> level{{}};
    for (std::size_t len = 0; len <= p.max_stops && out.size() < limit; ++len) {
        std::vector<std::vector<std::size_t>> next;
        for (const auto& seq : level) {
            if (out.size() >= limit) break;
            Route r;
            bool ok = true;
            std::size_t src = 0;
            NodeId at = p.origin;
            for (std::size_t j : seq) {
                NodeId v = instance.stations[j].node;
                if (v == at || trees[src].dist[v] == std::numeric_limits<double>::infinity()) {
                    ok = false;
                    break;
                }
                r.stages.push_back(trees[src].path_to(v));
                r.stops.push_back(v);
                src = 1 + j;
                at = v;
            }
            if (ok && at != p.destination &&
                trees[src].dist[p.destination] < std::numeric_limits<double>::infinity()) {
                r.stages.push_back(trees[src].path_to(p.destination));
                out.push_back(std::move(r));
            }
            if (len < p.max_stops)
                for (std::size_t j = 0; j < instance.stations.size(); ++j) {
                    if (!seq.empty() && seq.back() == j) continue;
                    auto longer = seq;
                    longer.push_back(j);
                    next.push_back(std::move(longer));
                }
        }
        level = std::move(next);
    }
    return out;
}

namespace {

// Decision vector of the recovery search. A stop departs with the minimum
// SoC the following stage needs plus `extra`.
struct Decision {
    std::vector<double> rho;   // per stage, 0 = fastest, 1 = slowest
    std::vector<double> wait;  // per stop
    std::vector<double> extra; // per stop, kWh
};

class RouteModel {
public:
    RouteModel(const Instance& inst, const Route& route, bool strict)
        : inst_(inst), route_(route), strict_(strict) {
        if (route.stages.size() != route.stops.size() + 1)
            throw ConfigError("route: need exactly one more stage than stops");
        for (NodeId v : route.stops) {
            auto idx = inst.station_at(v);
            if (!idx) throw ConfigError("route: stop at a node without a station");
            stations_.push_back(*idx);
        }
    }

    std::size_t stops() const { return route_.stops.size(); }

    // Energy and the worst prefix energy of stage k at speed setting rho.
    std::pair<double, double> stage_energy(std::size_t k, double rho) const {
        double e = 0.0, peak = 0.0;
        for (EdgeId id : route_.stages[k]) {
            e += edge_energy(inst_.graph.edge(id), time_of(id, rho));
            peak = std::max(peak, e);
        }
        return {e, peak};
    }

    double time_of(EdgeId id, double rho) const {
        const TimeBounds& b = inst_.graph.bounds(id);
        return std::clamp(b.lower + rho * (b.upper - b.lower), b.lower, b.upper);
    }

    // Builds the plan; nullopt when a bound or box cannot hold.
    std::optional<Plan> build(const Decision& d) const {
        const InstanceParams& p = inst_.params;
        const double lo_b = inst_.reserve_kwh();
        const double slack = 1e-9 * p.battery_kwh;
        Plan plan;
        double tau = 0.0, beta = p.initial_soc_kwh;
        for (std::size_t k = 0; k < route_.stages.size(); ++k) {
            StagePath sp;
            double travel = 0.0;
            for (EdgeId id : route_.stages[k]) {
                double t = time_of(id, d.rho[k]);
                sp.edges.push_back(id);
                sp.travel_times.push_back(t);
                travel += t;
            }
            auto [energy, peak] = stage_energy(k, d.rho[k]);
            if (strict_ && beta - peak < -slack) return std::nullopt;
            plan.stages.push_back(std::move(sp));
            double arrival = tau + travel;
            double soc = std::min(beta - energy, p.battery_kwh);
            if (soc < lo_b - slack) return std::nullopt;
            soc = std::max(soc, lo_b);
            if (k == stops()) {
                if (arrival > p.deadline_h + 1e-9) return std::nullopt;
                plan.destination_arrival = arrival;
                plan.destination_soc = soc;
                break;
            }
            const ChargeCurve& curve = inst_.stations[stations_[k]].curve;
            auto [next_e, next_peak] = stage_energy(k + 1, d.rho[k + 1]);
            double need = std::max(lo_b + next_e, strict_ ? next_peak : 0.0);
            double goal = need + d.extra[k];
            if (goal > curve.full_level() + slack) return std::nullopt;
            goal = std::min(goal, curve.full_level());
            Stop s;
            s.node = route_.stops[k];
            s.kind = StopKind::Station;
            s.arrival = arrival;
            s.soc = soc;
            s.wait = d.wait[k];
            s.charge = goal > soc ? curve.time_at(goal) - curve.time_at(soc) : 0.0;
            if (s.charge > p.charge_max_h + 1e-12) return std::nullopt;
            s.charge = std::min(s.charge, p.charge_max_h);
            if (arrival > p.deadline_h + 1e-9) return std::nullopt;
            plan.stops.push_back(s);
            tau = arrival + s.wait + s.charge;
            beta = soc + curve.increment(s.charge, soc);
        }
        return plan;
    }

private:
    const Instance& inst_;
    const Route& route_;
    bool strict_;
    std::vector<std::size_t> stations_;
};

} // namespace

std::optional<Plan> recover_feasible(const Instance& instance, const Route& route,
                                     ObjectiveMode mode, const RecoveryOptions& options) {
    const InstanceParams& p = instance.params;
    RouteModel model(instance, route, options.strict_soc);
    const std::size_t n = model.stops();
    if (n > p.max_stops) return std::nullopt;
    EvaluateOptions eopt{options.tolerance, options.strict_soc};

    Decision d;
    d.rho.assign(n + 1, 0.0);
    d.wait.assign(n, p.wait_min_h);
    d.extra.assign(n, 0.0);

    std::size_t evaluations = 0;
    auto score = [&](const Decision& x) -> std::optional<double> {
        ++evaluations;
        auto plan = model.build(x);
        if (!plan) return std::nullopt;
        PlanSummary s = evaluate(*plan, instance, mode, eopt);
        if (!s.feasible) return std::nullopt;
        return s.objective;
    };

    // phase 1: per stage the fastest speed setting whose energy fits into the
    // most the previous stop can charge, minimum charging, shortest waits
    {
        const double lo_b = instance.reserve_kwh();
        double arrival_soc = p.initial_soc_kwh;
        for (std::size_t k = 0; k <= n; ++k) {
            double most = arrival_soc;
            if (k > 0) {
                const ChargeCurve& c = instance.stations[*instance.station_at(route.stops[k - 1])].curve;
                most = c.soc_at(c.time_at(std::clamp(arrival_soc, 0.0, c.full_level())) + p.charge_max_h);
            }
            bool found = false;
            for (int j = 0; j <= 256 && !found; ++j) {
                double rho = j / 256.0;
                auto [e, peak] = model.stage_energy(k, rho);
                double need = std::max(lo_b + e, options.strict_soc ? peak : 0.0);
                if (need <= most + 1e-9 * p.battery_kwh) {
                    d.rho[k] = rho;
                    double depart = k == 0 ? most : std::max(arrival_soc, need);
                    arrival_soc = std::min(depart - e, p.battery_kwh);
                    found = true;
                }
            }
            if (!found) return std::nullopt;
        }
    }
    std::optional<double> current = score(d);
    if (!current) return std::nullopt;

    // phase 2: coordinate descent, accepting strictly improving feasible moves
    struct Coord {
        double* value;
        double lo, hi, step, min_step;
    };
    std::vector<Coord> coords;
    if (options.optimize_speed)
        for (double& r : d.rho) coords.push_back({&r, 0.0, 1.0, 0.25, 1e-4});
    if (options.optimize_wait) {
        double hi = std::min(p.wait_max_h, p.deadline_h);
        if (hi > p.wait_min_h)
            for (double& w : d.wait)
                coords.push_back({&w, p.wait_min_h, hi, 0.25 * (hi - p.wait_min_h), 1e-4});
    }
    if (options.optimize_charge) {
        double hi = p.battery_kwh - instance.reserve_kwh();
        for (double& x : d.extra) coords.push_back({&x, 0.0, hi, 0.25 * hi, 1e-5 * p.battery_kwh});
    }

    // relative, so objectives that differ by a constant factor take the same moves
    const double min_gain = 1e-9;
    bool any_active = !coords.empty();
    while (any_active && evaluations < options.max_evaluations) {
        bool improved = false;
        for (Coord& c : coords) {
            if (c.step < c.min_step) continue;
            for (double dir : {1.0, -1.0}) {
                double old = *c.value;
                double next = std::clamp(old + dir * c.step, c.lo, c.hi);
                if (next == old) continue;
                *c.value = next;
                auto v = score(d);
                if (v && *v < *current - min_gain * std::abs(*current)) {
                    current = v;
                    improved = true;
                    break;
                }
                *c.value = old;
            }
        }
        if (!improved) {
            any_active = false;
            for (Coord& c : coords) {
                c.step *= 0.5;
                if (c.step >= c.min_step) any_active = true;
            }
        }
    }
    return model.build(d);
}

} // namespace cfo
