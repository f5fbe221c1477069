#include "cfo/oracle.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-9;

// smallest t in the bounds with c'(t) >= s
double time_for_slope(const RoadSegment& seg, const TimeBounds& b, double s) {
    if (!(b.upper > b.lower) || edge_energy_slope(seg, b.lower) >= s) return b.lower;
    if (edge_energy_slope(seg, b.upper) < s) return b.upper;
    double lo = b.lower, hi = b.upper;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if (edge_energy_slope(seg, mid) >= s) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::vector<double> grid(double lo, double hi, std::size_t points) {
    std::vector<double> out;
    if (!(hi > lo)) return {lo};
    for (std::size_t i = 0; i < points; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    out.back() = hi;
    return out;
}

void sort_unique(std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end(),
                         [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
             xs.end());
}

struct Option {
    std::size_t path = 0;
    StageAllocation alloc;
};

// Options of one (from, to) pair: per grid time the Pareto set over
// (energy, peak) of the simple paths that can be driven in that time.
struct PairTable {
    std::vector<std::vector<EdgeId>> paths;
    std::vector<double> times;
    std::vector<std::vector<Option>> options;
    double step = 0.0;
};

struct StageChoice {
    std::vector<EdgeId> edges;
    std::vector<double> times;
    double hours = 0.0;
};

struct StopChoice {
    NodeId node = 0;
    double wait = 0.0;
    double charge = 0.0;
};

struct Choice {
    std::vector<StageChoice> stages;
    std::vector<StopChoice> stops;
};

// Replays a choice on the timeline: tau and beta follow from the times.
Plan build_plan(const Instance& inst, const Choice& c) {
    const InstanceParams& p = inst.params;
    Plan plan;
    double tau = 0.0, beta = p.initial_soc_kwh;
    for (std::size_t k = 0; k < c.stages.size(); ++k) {
        const StageChoice& sc = c.stages[k];
        double energy = 0.0, travel = 0.0;
        for (std::size_t i = 0; i < sc.edges.size(); ++i) {
            energy += edge_energy(inst.graph.edge(sc.edges[i]), sc.times[i]);
            travel += sc.times[i];
        }
        plan.stages.push_back({sc.edges, sc.times});
        tau += travel;
        beta = std::min(beta - energy, p.battery_kwh);
        if (k == c.stops.size()) {
            plan.destination_arrival = tau;
            plan.destination_soc = beta;
            break;
        }
        const StopChoice& st = c.stops[k];
        Stop s;
        s.node = st.node;
        s.kind = StopKind::Station;
        s.arrival = tau;
        s.soc = beta;
        s.wait = st.wait;
        s.charge = st.charge;
        plan.stops.push_back(s);
        const ChargeCurve& curve = inst.stations[*inst.station_at(st.node)].curve;
        beta = std::min(beta + curve.increment(st.charge, std::clamp(beta, 0.0, curve.full_level())),
                        p.battery_kwh);
        tau += st.wait + st.charge;
    }
    return pad_plan(std::move(plan), inst, p.max_stops);
}

class Search {
public:
    Search(const Instance& inst, const OracleConfig& cfg, ObjectiveMode mode)
        : inst_(inst), p_(inst.params), cfg_(cfg), mode_(mode) {
        const std::size_t S = inst.stations.size();
        // sources: 0 = origin, 1 + j = station j; targets: j = station j, S = destination
        tables_.assign(S + 1, std::vector<PairTable>(S + 1));
        for (std::size_t a = 0; a <= S; ++a) {
            NodeId from = a == 0 ? p_.origin : inst.stations[a - 1].node;
            for (std::size_t b = 0; b <= S; ++b) {
                NodeId to = b == S ? p_.destination : inst.stations[b].node;
                if (from == to) continue;
                if (a == 0 && p_.max_stops == 0 && b != S) continue;
                tables_[a][b] = make_table(from, to);
            }
        }

        double wait_hi = std::min(p_.wait_max_h, p_.deadline_h);
        bool timing = false;
        if (mode == ObjectiveMode::Carbon)
            for (const ChargingStation& st : inst.stations) {
                auto ys = st.intensity.curve().ys();
                if (std::any_of(ys.begin(), ys.end(), [&](double y) { return y != ys.front(); }))
                    timing = true;
            }
        // waiting longer only helps when the intensity changes over time
        waits_ = timing ? grid(p_.wait_min_h, std::max(p_.wait_min_h, wait_hi), cfg.wait_points)
                        : std::vector<double>{p_.wait_min_h};
        wait_step_ = waits_.size() > 1 ? waits_[1] - waits_[0] : 0.0;
        charges_ = grid(0.0, p_.charge_max_h, cfg.charge_points);
        charge_step_ = charges_.size() > 1 ? charges_[1] - charges_[0] : 0.0;
        reserves_ = cfg.reserve_levels;
        reserves_.push_back(p_.reservation_ratio);
        sort_unique(reserves_);
    }

    void run() {
        Choice c;
        from_node(0, 0, 0.0, p_.initial_soc_kwh, 0.0, c);
    }

    bool found() const { return best_ < kInf; }
    const Choice& best() const { return best_choice_; }
    std::size_t evaluated() const { return evaluated_; }

    double charge_step() const { return charge_step_; }
    double wait_step() const { return wait_step_; }
    double time_step(const Choice& c, std::size_t stage) const {
        std::size_t a = 0;
        if (stage > 0) a = 1 + *inst_.station_at(c.stops[stage - 1].node);
        std::size_t b = stage < c.stops.size() ? *inst_.station_at(c.stops[stage].node)
                                               : inst_.stations.size();
        return tables_[a][b].step;
    }

private:
    PairTable make_table(NodeId from, NodeId to) const {
        PairTable t;
        t.paths = simple_paths(inst_.graph, from, to, cfg_.max_path_length);
        if (t.paths.empty()) return t;
        double t_min = kInf, t_max = -kInf, best_energy = kInf, best_energy_time = 0.0;
        std::vector<double> lows, highs;
        for (const auto& path : t.paths) {
            double lo = 0.0, hi = 0.0, emin_time = 0.0, emin = 0.0;
            for (EdgeId id : path) {
                const TimeBounds& b = inst_.graph.bounds(id);
                lo += b.lower;
                hi += b.upper;
                TradeoffMinimum m = minimize_affine_tradeoff(inst_.graph.edge(id), 0.0, 1.0);
                emin_time += m.t;
                emin += m.value;
            }
            lows.push_back(lo);
            highs.push_back(hi);
            t_min = std::min(t_min, lo);
            t_max = std::max(t_max, emin_time);
            if (emin < best_energy) {
                best_energy = emin;
                best_energy_time = emin_time;
            }
        }
        t_max = std::min(t_max, p_.deadline_h);
        if (t_min > p_.deadline_h) return t;
        t.times = grid(t_min, std::max(t_min, t_max), cfg_.time_points);
        t.step = t.times.size() > 1 ? t.times[1] - t.times[0] : 0.0;
        if (best_energy_time <= p_.deadline_h) t.times.push_back(best_energy_time);
        sort_unique(t.times);

        for (double hours : t.times) {
            std::vector<Option> opts;
            for (std::size_t i = 0; i < t.paths.size(); ++i) {
                if (hours < lows[i] - 1e-12 || hours > highs[i] + 1e-12) continue;
                StageAllocation a = least_energy_allocation(inst_.graph, t.paths[i], hours);
                bool dominated = false;
                for (const Option& o : opts)
                    if (o.alloc.energy <= a.energy && o.alloc.peak <= a.peak) dominated = true;
                if (dominated) continue;
                std::erase_if(opts, [&](const Option& o) {
                    return a.energy <= o.alloc.energy && a.peak <= o.alloc.peak;
                });
                opts.push_back({i, std::move(a)});
            }
            t.options.push_back(std::move(opts));
        }
        return t;
    }

    double stage_cost(const StageAllocation& a) const {
        return mode_ == ObjectiveMode::Time ? a.hours : 0.0;
    }

    bool better(double cost) const {
        if (best_ == kInf) return true;
        return cost < best_ - 1e-12 * std::max(1.0, std::abs(best_));
    }

    // Leaves source `a` (0 = origin, 1 + j = station j) after arriving at
    // tau/beta; at a station the stop's charge and wait are chosen together
    // with the next stage.
    void from_node(std::size_t a, std::size_t stops_used, double tau, double beta, double cost,
                   Choice& c) {
        if (!better(cost)) return;
        const std::size_t S = inst_.stations.size();
        for (std::size_t b = 0; b <= S; ++b) {
            // the stop at station a itself counts once it is made
            if (b < S && stops_used + (a == 0 ? 0 : 1) >= p_.max_stops) continue;
            const PairTable& table = tables_[a][b];
            for (std::size_t ti = 0; ti < table.times.size(); ++ti) {
                for (const Option& opt : table.options[ti]) {
                    if (a == 0) {
                        follow(b, stops_used, 0.0, p_.initial_soc_kwh, cost, table, opt, c);
                        continue;
                    }
                    stop_then_follow(a - 1, b, stops_used, tau, beta, cost, table, opt, c);
                }
            }
        }
    }

    void stop_then_follow(std::size_t station, std::size_t b, std::size_t stops_used, double tau,
                          double beta, double cost, const PairTable& table, const Option& opt,
                          Choice& c) {
        const ChargingStation& st = inst_.stations[station];
        const ChargeCurve& curve = st.curve;
        const double s0 = curve.time_at(std::clamp(beta, 0.0, curve.full_level()));
        std::vector<double> charges = charges_;
        charges.push_back(std::clamp(curve.full_time() - s0, 0.0, p_.charge_max_h));
        for (double alpha : reserves_) {
            double need = std::max(alpha * p_.battery_kwh + opt.alloc.energy,
                                   cfg_.strict_soc ? opt.alloc.peak : 0.0);
            if (need > beta && need <= curve.full_level()) {
                double tc = curve.time_at(need) - s0;
                if (tc <= p_.charge_max_h) charges.push_back(tc);
            }
        }
        sort_unique(charges);

        c.stops.push_back({st.node, 0.0, 0.0});
        for (double tc : charges) {
            double after = std::min(beta + curve.increment(tc, std::clamp(beta, 0.0, curve.full_level())),
                                    p_.battery_kwh);
            if (cfg_.strict_soc && opt.alloc.peak > after + kSlack * p_.battery_kwh) continue;
            if (after - opt.alloc.energy < inst_.reserve_kwh() - kSlack * p_.battery_kwh) continue;
            for (double tw : waits_) {
                double depart = tau + tw + tc;
                if (depart + opt.alloc.hours > p_.deadline_h + kSlack) break;
                Stop s;
                s.kind = StopKind::Station;
                s.node = st.node;
                s.arrival = tau;
                s.soc = beta;
                s.wait = tw;
                s.charge = tc;
                double stop_cost = stop_objective(mode_, st, s, p_.efficiency);
                c.stops.back().wait = tw;
                c.stops.back().charge = tc;
                follow(b, stops_used + 1, depart, after, cost + stop_cost, table, opt, c);
            }
        }
        c.stops.pop_back();
    }

    // drives the option from a departure at tau/beta towards target b
    void follow(std::size_t b, std::size_t stops_used, double tau, double beta, double cost,
                const PairTable& table, const Option& opt, Choice& c) {
        if (cfg_.strict_soc && opt.alloc.peak > beta + kSlack * p_.battery_kwh) return;
        double arrival = tau + opt.alloc.hours;
        if (arrival > p_.deadline_h + kSlack) return;
        double soc = std::min(beta - opt.alloc.energy, p_.battery_kwh);
        if (soc < inst_.reserve_kwh() - kSlack * p_.battery_kwh) return;
        cost += stage_cost(opt.alloc);
        const bool last = b == inst_.stations.size();
        if (last) ++evaluated_;
        if (!better(cost)) return;
        c.stages.push_back({table.paths[opt.path], opt.alloc.times, opt.alloc.hours});
        if (last) {
            best_ = cost;
            best_choice_ = c;
        } else {
            from_node(1 + b, stops_used, arrival, soc, cost, c);
        }
        c.stages.pop_back();
    }

    const Instance& inst_;
    const InstanceParams& p_;
    const OracleConfig& cfg_;
    ObjectiveMode mode_;
    std::vector<std::vector<PairTable>> tables_;
    std::vector<double> waits_, charges_, reserves_;
    double wait_step_ = 0.0, charge_step_ = 0.0;
    double best_ = kInf;
    Choice best_choice_;
    std::size_t evaluated_ = 0;
};

} // namespace

std::vector<std::vector<EdgeId>> simple_paths(const TransportGraph& graph, NodeId from, NodeId to,
                                              std::size_t max_edges) {
    std::vector<std::vector<EdgeId>> out;
    std::vector<EdgeId> path;
    std::vector<char> on_path(graph.node_count(), 0);
    auto dfs = [&](auto&& self, NodeId v) -> void {
        if (v == to) {
            out.push_back(path);
            return;
        }
        if (path.size() >= max_edges) return;
        for (EdgeId id : graph.out_edges(v)) {
            NodeId w = graph.edge(id).to;
            if (on_path[w]) continue;
            on_path[w] = 1;
            path.push_back(id);
            self(self, w);
            path.pop_back();
            on_path[w] = 0;
        }
    };
    on_path[from] = 1;
    dfs(dfs, from);
    return out;
}

StageAllocation least_energy_allocation(const TransportGraph& graph, const std::vector<EdgeId>& path,
                                        double hours) {
    StageAllocation out;
    double lo = 0.0, hi = 0.0, s_lo = kInf, s_hi = -kInf;
    for (EdgeId id : path) {
        const TimeBounds& b = graph.bounds(id);
        lo += b.lower;
        hi += b.upper;
        s_lo = std::min(s_lo, edge_energy_slope(graph.edge(id), b.lower));
        s_hi = std::max(s_hi, edge_energy_slope(graph.edge(id), b.upper));
    }
    auto times_at = [&](double s) {
        std::vector<double> ts;
        for (EdgeId id : path) ts.push_back(time_for_slope(graph.edge(id), graph.bounds(id), s));
        return ts;
    };
    if (hours <= lo) {
        for (EdgeId id : path) out.times.push_back(graph.bounds(id).lower);
    } else if (hours >= hi) {
        for (EdgeId id : path) out.times.push_back(graph.bounds(id).upper);
    } else {
        // each segment sits where c_e' equals a common slope; the total time
        // grows with the slope
        double a = s_lo, b = s_hi;
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;
            auto ts = times_at(mid);
            double total = 0.0;
            for (double t : ts) total += t;
            if (total >= hours) b = mid;
            else a = mid;
        }
        out.times = times_at(b);
        // hand the leftover to the segments that still have room
        double total = 0.0;
        for (double t : out.times) total += t;
        double excess = total - hours;
        for (std::size_t i = 0; i < path.size() && excess > 0.0; ++i) {
            double room = out.times[i] - graph.bounds(path[i]).lower;
            double cut = std::min(room, excess);
            out.times[i] -= cut;
            excess -= cut;
        }
    }
    double e = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        out.hours += out.times[i];
        e += edge_energy(graph.edge(path[i]), out.times[i]);
        out.peak = std::max(out.peak, e);
    }
    out.energy = e;
    return out;
}

OracleConfig refined(const OracleConfig& config) {
    OracleConfig c = config;
    c.time_points = 2 * c.time_points - 1;
    c.charge_points = 2 * c.charge_points - 1;
    c.wait_points = 2 * c.wait_points - 1;
    return c;
}

OracleResult enumerate_optimal(const Instance& instance, const OracleConfig& config,
                               const OracleLimits& limits) {
    const InstanceParams& p = instance.params;
    if (config.time_points < 2 || config.charge_points < 2 || config.wait_points < 2)
        throw ConfigError("oracle: every grid needs at least two points");
    if (instance.graph.node_count() > limits.max_nodes)
        throw OracleRefusal("oracle: more than " + std::to_string(limits.max_nodes) + " nodes");
    if (instance.stations.size() > limits.max_stations)
        throw OracleRefusal("oracle: more than " + std::to_string(limits.max_stations) + " stations");
    if (p.max_stops > limits.max_stops)
        throw OracleRefusal("oracle: more than " + std::to_string(limits.max_stops) + " stops");
    if (config.max_path_length > limits.max_path_length)
        throw OracleRefusal("oracle: path length limit above " +
                            std::to_string(limits.max_path_length));

    const ObjectiveMode mode = config.mode.value_or(p.objective);
    Search search(instance, config, mode);
    search.run();

    OracleResult out;
    out.evaluated = search.evaluated();
    out.objective = kInf;
    if (!search.found()) return out;

    const EvaluateOptions eopt{1e-6, config.strict_soc};
    const Choice& best = search.best();
    out.plan = build_plan(instance, best);
    out.summary = evaluate(out.plan, instance, mode, eopt);
    if (!out.summary.feasible)
        throw SolverError("oracle: optimum failed evaluation: " + out.summary.violation);
    out.feasible = true;
    out.objective = out.summary.objective;

    // finite-difference sensitivity of the optimum to one grid step in each
    // coordinate, over the perturbations that stay feasible
    auto try_choice = [&](const Choice& c) {
        for (std::size_t k = 0; k < c.stages.size(); ++k)
            for (std::size_t i = 0; i < c.stages[k].edges.size(); ++i) {
                const TimeBounds& b = instance.graph.bounds(c.stages[k].edges[i]);
                if (c.stages[k].times[i] < b.lower - 1e-12 || c.stages[k].times[i] > b.upper + 1e-12)
                    return;
            }
        Plan plan = build_plan(instance, c);
        if (structure_error(plan, instance)) return;
        PlanSummary s = evaluate(plan, instance, mode, eopt);
        if (s.feasible) out.error_bound = std::max(out.error_bound, std::abs(s.objective - out.objective));
    };
    for (std::size_t k = 0; k < best.stages.size(); ++k) {
        double h = search.time_step(best, k);
        if (!(h > 0.0)) continue;
        for (double dir : {-1.0, 1.0}) {
            Choice c = best;
            StageAllocation a =
                least_energy_allocation(instance.graph, c.stages[k].edges, c.stages[k].hours + dir * h);
            c.stages[k].times = a.times;
            c.stages[k].hours = a.hours;
            try_choice(c);
        }
    }
    for (std::size_t k = 0; k < best.stops.size(); ++k) {
        for (double dir : {-1.0, 1.0}) {
            if (search.charge_step() > 0.0) {
                Choice c = best;
                c.stops[k].charge = std::clamp(c.stops[k].charge + dir * search.charge_step(), 0.0,
                                               p.charge_max_h);
                try_choice(c);
            }
            if (search.wait_step() > 0.0) {
                Choice c = best;
                c.stops[k].wait = std::clamp(c.stops[k].wait + dir * search.wait_step(), p.wait_min_h,
                                             p.wait_max_h);
                try_choice(c);
            }
        }
    }
    return out;
}

} // namespace cfo
