#include "cfo/solver.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool improves(double cand, double current) {
    if (!std::isfinite(current)) return std::isfinite(cand) || cand < current;
    return cand < current - 1e-12 * (1.0 + std::abs(current));
}

} // namespace

// ------------------------------------------------------------- stage paths

std::vector<EdgeId> PathTree::path_to(NodeId target) const {
    std::vector<EdgeId> path;
    if (target >= dist.size() || !std::isfinite(dist[target])) return path;
    NodeId v = target;
    while (pred[v] != kNoEdge && path.size() < dist.size()) {
        path.push_back(pred[v]);
        v = pred_node[v];
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<PathTree> all_pairs_stage_paths(const TransportGraph& graph,
                                            std::span<const double> weights,
                                            std::span<const NodeId> sources) {
    if (weights.size() != graph.edge_count())
        throw ConfigError("stage paths: one weight per segment required");
    const std::size_t n = graph.node_count();
    std::vector<PathTree> out;
    out.reserve(sources.size());
    for (NodeId s : sources) {
        if (s >= n) throw ConfigError("stage paths: unknown source node");
        PathTree tree;
        tree.source = s;
        tree.dist.assign(n, kInf);
        tree.pred.assign(n, kNoEdge);
        tree.pred_node.assign(n, s);
        tree.dist[s] = 0.0;
        bool changed = true;
        for (std::size_t round = 0; round <= n && changed; ++round) {
            changed = false;
            for (const RoadSegment& seg : graph.edges()) {
                double du = tree.dist[seg.from];
                if (!std::isfinite(du)) continue;
                double cand = du + weights[seg.id];
                if (improves(cand, tree.dist[seg.to])) {
                    if (round == n) throw SolverError("non-physical regeneration cycle");
                    tree.dist[seg.to] = cand;
                    tree.pred[seg.to] = seg.id;
                    tree.pred_node[seg.to] = seg.from;
                    changed = true;
                }
            }
        }
        // a negative cycle through the source shows up as a negative distance to it
        if (tree.dist[s] < 0.0) throw SolverError("non-physical regeneration cycle");
        out.push_back(std::move(tree));
    }
    return out;
}

StageSpeeds stage_speeds(const Instance& instance, const DualVector& lambda, std::size_t stage,
                         ObjectiveMode mode) {
    if (stage >= lambda.stages()) throw ConfigError("stage_speeds: stage beyond the multipliers");
    const auto& g = instance.graph;
    StageSpeeds out;
    out.time.resize(g.edge_count());
    out.weight.resize(g.edge_count());
    for (const RoadSegment& seg : g.edges()) {
        TradeoffMinimum m =
            solve_speed_subproblem(seg, mode, lambda.tau[stage], lambda.beta[stage]);
        out.time[seg.id] = m.t;
        out.weight[seg.id] = m.value;
    }
    return out;
}

// ----------------------------------------------------------- extended graph

ExtendedGraph build_extended_graph(const OuterInput& in) {
    const std::size_t N = in.stops;
    const std::size_t S = in.stations;
    if (in.sp.size() != N + 1) throw ConfigError("extended graph: need N + 1 stage path tables");
    if (in.sigma.size() != N || in.pass.size() != N)
        throw ConfigError("extended graph: need one sigma row and pass value per stop");
    for (const auto& table : in.sp) {
        if (table.size() != S + 1) throw ConfigError("extended graph: bad source count");
        for (const auto& row : table)
            if (row.size() != S + 1) throw ConfigError("extended graph: bad target count");
    }
    for (const auto& row : in.sigma)
        if (row.size() != S) throw ConfigError("extended graph: bad sigma row");

    ExtendedGraph G;
    G.nodes.push_back({ExtendedNode::Kind::Origin, 0, 0});
    G.source = 0;
    // layer i (1..N): d^i first, then the station copies
    auto dest_id = [&](std::size_t layer) { return 1 + (layer - 1) * (S + 1); };
    auto station_id = [&](std::size_t layer, std::size_t j) { return dest_id(layer) + 1 + j; };
    for (std::size_t i = 1; i <= N; ++i) {
        G.nodes.push_back({ExtendedNode::Kind::Destination, i, 0});
        for (std::size_t j = 0; j < S; ++j) G.nodes.push_back({ExtendedNode::Kind::Station, i, j});
    }
    G.sink = G.nodes.size();
    G.nodes.push_back({ExtendedNode::Kind::Sink, N + 1, 0});

    auto add = [&](std::size_t from, std::size_t to, double w) {
        if (std::isfinite(w)) G.edges.push_back({from, to, w});
    };
    if (N == 0) {
        add(G.source, G.sink, in.sp[0][0][S]);
        return G;
    }
    // the pass-through cost of stop i - 1 rides on the edge into d^i
    add(G.source, dest_id(1), in.sp[0][0][S] + in.pass[0]);
    for (std::size_t j = 0; j < S; ++j) add(G.source, station_id(1, j), in.sp[0][0][j]);
    for (std::size_t i = 1; i <= N; ++i) {
        const bool last = i == N;
        const auto& next = in.sp[i];
        if (last)
            add(dest_id(i), G.sink, 0.0);
        else
            add(dest_id(i), dest_id(i + 1), in.pass[i]);
        for (std::size_t u = 0; u < S; ++u) {
            double sig = in.sigma[i - 1][u];
            if (last) {
                add(station_id(i, u), G.sink, sig + next[1 + u][S]);
                continue;
            }
            add(station_id(i, u), dest_id(i + 1), sig + next[1 + u][S] + in.pass[i]);
            for (std::size_t v = 0; v < S; ++v)
                add(station_id(i, u), station_id(i + 1, v), sig + next[1 + u][v]);
        }
    }
    return G;
}

OuterSolution solve_outer(const OuterInput& in) {
    ExtendedGraph G = build_extended_graph(in);
    const std::size_t n = G.nodes.size();
    std::vector<double> dist(n, kInf);
    std::vector<std::size_t> pred(n, n);
    dist[G.source] = 0.0;
    // edges are emitted in layer order, so one sweep is a topological pass
    for (const ExtendedEdge& e : G.edges) {
        if (!std::isfinite(dist[e.from])) continue;
        double cand = dist[e.from] + e.weight;
        if (cand < dist[e.to]) {
            dist[e.to] = cand;
            pred[e.to] = e.from;
        }
    }
    if (!std::isfinite(dist[G.sink]))
        throw InfeasibleStructure("destination unreachable in the extended graph");

    OuterSolution out;
    out.cost = dist[G.sink];
    out.value = in.constant + out.cost;
    out.stops.assign(in.stops, std::nullopt);
    for (std::size_t v = pred[G.sink]; v != G.source && v < n; v = pred[v]) {
        const ExtendedNode& node = G.nodes[v];
        if (node.kind == ExtendedNode::Kind::Station) out.stops[node.layer - 1] = node.station;
    }
    return out;
}

// -------------------------------------------------------- dual evaluation

const ChargingSolution& ChargingCache::get(const Instance& instance, std::size_t station,
                                           ObjectiveMode mode, const StopPrices& prices,
                                           const BnbOptions& options) {
    Key key{station, static_cast<int>(mode), prices.tau_in, prices.tau_out, prices.beta_in,
            prices.beta_out};
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
    ChargingSolution sol =
        solve_charging_subproblem(instance, instance.stations[station], mode, prices, options);
    return entries_.emplace(key, sol).first->second;
}

namespace {

struct StopChoice {
    bool station = false;
    std::size_t index = 0;
    ChargingSolution charging;
    PassThrough pass;
    StopPrices prices;
};

double time_weight(ObjectiveMode mode) { return mode == ObjectiveMode::Time ? 1.0 : 0.0; }

// Schedules the values the Lagrangian leaves free so the residuals come out
// as small as the boxes allow: walk the stages forward and pin each free
// (tau, beta) to the simulated arrival.
void fill_free_values(Plan& plan, const Instance& instance, const std::vector<StopChoice>& choices,
                      bool dest_tau_free, bool dest_soc_free, ObjectiveMode mode) {
    const InstanceParams& p = instance.params;
    const double lo_b = instance.reserve_kwh();
    double tau = 0.0, beta = p.initial_soc_kwh;
    double stop_time = 0.0, charged = 0.0;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const StagePath& sp = plan.stages[k];
        double travel = 0.0, energy = 0.0;
        for (std::size_t j = 0; j < sp.edges.size(); ++j) {
            travel += sp.travel_times[j];
            energy += edge_energy(instance.graph.edge(sp.edges[j]), sp.travel_times[j]);
        }
        double tau_hat = tau + stop_time + travel;
        double beta_hat = beta + charged - energy;
        if (k == plan.stops.size()) {
            if (dest_tau_free) plan.destination_arrival = std::clamp(tau_hat, 0.0, p.deadline_h);
            if (dest_soc_free) plan.destination_soc = std::clamp(beta_hat, lo_b, p.battery_kwh);
            break;
        }
        Stop& s = plan.stops[k];
        const StopChoice& c = choices[k];
        if (!c.station) {
            if (c.pass.tau_free) s.arrival = std::clamp(tau_hat, 0.0, p.deadline_h);
            if (c.pass.soc_free) s.soc = std::clamp(beta_hat, lo_b, p.battery_kwh);
        } else {
            const double ctau = c.prices.tau_out - c.prices.tau_in;
            const double cw = time_weight(mode) + c.prices.tau_out;
            const double cbeta = c.prices.beta_in - c.prices.beta_out;
            if (s.charge <= 0.0) {
                if (ctau == 0.0) s.arrival = std::clamp(tau_hat, 0.0, p.deadline_h);
                if (cbeta == 0.0) s.soc = std::clamp(beta_hat, lo_b, p.battery_kwh);
            } else if (cw == ctau) {
                // only tau + t_w matters; move the split
                double a = s.arrival + s.wait;
                double lo = std::max(0.0, a - p.wait_max_h);
                double hi = std::min(p.deadline_h, a - p.wait_min_h);
                if (lo <= hi) {
                    s.arrival = std::clamp(tau_hat, lo, hi);
                    s.wait = a - s.arrival;
                }
            }
        }
        tau = s.arrival;
        beta = s.soc;
        stop_time = s.kind == StopKind::Station ? s.wait + s.charge : 0.0;
        charged = 0.0;
        if (s.kind == StopKind::Station && s.charge > 0.0) {
            const ChargeCurve& curve = instance.stations[*instance.station_at(s.node)].curve;
            charged = curve.increment(s.charge, std::clamp(s.soc, 0.0, curve.full_level()));
        }
    }
}

} // namespace

DualEvaluation evaluate_dual(const Instance& instance, const DualVector& lambda, ObjectiveMode mode,
                             const BnbOptions& options, ChargingCache* cache) {
    const InstanceParams& p = instance.params;
    const std::size_t N = p.max_stops;
    const std::size_t S = instance.stations.size();
    if (lambda.stages() != N + 1 || lambda.tau.size() != N + 1)
        throw ConfigError("evaluate_dual: need N + 1 multipliers of each kind");
    if (!lambda.nonnegative()) throw ConfigError("evaluate_dual: multipliers must be non-negative");

    ChargingCache local;
    ChargingCache& memo = cache ? *cache : local;

    OuterInput in;
    in.stops = N;
    in.stations = S;
    in.constant = -lambda.tau[N] * p.deadline_h - lambda.beta[0] * p.initial_soc_kwh +
                  lambda.beta[N] * instance.reserve_kwh();

    std::vector<NodeId> station_nodes;
    for (const auto& st : instance.stations) station_nodes.push_back(st.node);
    std::vector<NodeId> targets = station_nodes;
    targets.push_back(p.destination);

    std::vector<StageSpeeds> speeds;
    std::vector<std::vector<PathTree>> trees; // [stage][source index]
    for (std::size_t k = 0; k <= N; ++k) {
        speeds.push_back(stage_speeds(instance, lambda, k, mode));
        std::vector<NodeId> sources;
        if (k == 0) sources.push_back(p.origin);
        else sources = station_nodes;
        auto t = all_pairs_stage_paths(instance.graph, speeds.back().weight, sources);
        std::vector<std::vector<double>> table(S + 1, std::vector<double>(S + 1, kInf));
        for (std::size_t si = 0; si < t.size(); ++si) {
            std::size_t row = k == 0 ? 0 : 1 + si;
            for (std::size_t ti = 0; ti < targets.size(); ++ti) table[row][ti] = t[si].dist[targets[ti]];
        }
        in.sp.push_back(std::move(table));
        trees.push_back(std::move(t));
    }

    std::vector<std::vector<const ChargingSolution*>> sols(N);
    std::vector<PassThrough> passes(N);
    DualEvaluation out;
    for (std::size_t k = 0; k < N; ++k) {
        StopPrices pr = stop_prices(lambda, k);
        passes[k] = solve_passthrough(instance, pr);
        in.pass.push_back(passes[k].value);
        std::vector<double> row;
        for (std::size_t j = 0; j < S; ++j) {
            const ChargingSolution& sol = memo.get(instance, j, mode, pr, options);
            sols[k].push_back(&sol);
            row.push_back(sol.lower);
        }
        in.sigma.push_back(std::move(row));
    }

    out.outer = solve_outer(in);
    out.constant = in.constant;
    out.value = out.outer.value;

    // assemble the minimizer
    Plan& plan = out.plan;
    std::vector<StopChoice> choices(N);

    std::size_t source_index = 0;
    bool done = false;
    for (std::size_t k = 0; k <= N; ++k) {
        StagePath sp;
        NodeId target = p.destination;
        if (k < N && out.outer.stops[k]) target = station_nodes[*out.outer.stops[k]];
        if (!done) {
            sp.edges = trees[k][source_index].path_to(target);
            for (EdgeId e : sp.edges) sp.travel_times.push_back(speeds[k].time[e]);
        }
        plan.stages.push_back(std::move(sp));
        if (k == N) break;
        Stop s;
        s.node = target;
        StopChoice& c = choices[k];
        c.prices = stop_prices(lambda, k);
        if (out.outer.stops[k]) {
            c.station = true;
            c.index = *out.outer.stops[k];
            c.charging = *sols[k][c.index];
            s.kind = StopKind::Station;
            s.arrival = c.charging.arrival;
            s.soc = c.charging.soc;
            s.wait = c.charging.wait;
            s.charge = c.charging.charge;
            out.slack += c.charging.value - c.charging.lower;
            out.bnb_nodes += c.charging.nodes;
            source_index = c.index;
        } else {
            c.pass = passes[k];
            s.kind = StopKind::Destination;
            s.arrival = c.pass.arrival;
            s.soc = c.pass.soc;
            done = true;
        }

        plan.stops.push_back(s);
    }
    plan.destination_arrival = lambda.tau[N] > 0.0 ? p.deadline_h : 0.0;
    plan.destination_soc = lambda.beta[N] > 0.0 ? instance.reserve_kwh() : p.battery_kwh;
    fill_free_values(plan, instance, choices, lambda.tau[N] == 0.0, lambda.beta[N] == 0.0, mode);

    out.residuals = residuals(plan, instance);
    PlanSummary sum = evaluate(plan, instance, mode);
    out.objective = sum.objective;
    return out;
}

DualVector dual_update(const DualVector& lambda, const Residuals& delta, double theta) {
    return dual_update(lambda, delta, theta, theta);
}

DualVector dual_update(const DualVector& lambda, const Residuals& delta, double theta_tau,
                       double theta_beta) {
    if (!(theta_tau > 0.0) || !(theta_beta > 0.0))
        throw ConfigError("dual_update: step size must be positive");
    if (delta.tau.size() != lambda.stages() || delta.beta.size() != lambda.stages())
        throw ConfigError("dual_update: residual and multiplier sizes differ");
    DualVector next = lambda;
    for (std::size_t k = 0; k < lambda.stages(); ++k) {
        next.tau[k] = std::max(0.0, lambda.tau[k] + theta_tau * delta.tau[k]);
        next.beta[k] = std::max(0.0, lambda.beta[k] + theta_beta * delta.beta[k]);
    }
    return next;
}

const char* to_string(Termination t) {
    switch (t) {
    case Termination::Optimal: return "optimal";
    case Termination::IterationLimit: return "iteration-limit";
    case Termination::Recovered: return "recovered";
    case Termination::Infeasible: return "infeasible";
    }
    return "infeasible";
}

double objective_scale(const Instance& instance, ObjectiveMode mode) {
    const InstanceParams& p = instance.params;
    switch (mode) {
    case ObjectiveMode::Time: return p.deadline_h;
    case ObjectiveMode::Energy: return p.battery_kwh / p.efficiency;
    case ObjectiveMode::Carbon: {
        double pi_max = 0.0;
        for (const auto& st : instance.stations)
            for (double y : st.intensity.curve().ys()) pi_max = std::max(pi_max, y);
        return p.battery_kwh * pi_max / p.efficiency;
    }
    }
    return 1.0;
}

// ------------------------------------------------------------------- run

namespace {

bool same_route(const Route& a, const Route& b) {
    return a.stages == b.stages && a.stops == b.stops;
}

} // namespace

SolverReport run(const Instance& instance, const SolverOptions& options) {
    if (options.iterations == 0) throw ConfigError("solver: iteration budget must be positive");
    if (!(options.step > 0.0)) throw ConfigError("solver: step size must be positive");
    const ObjectiveMode mode = options.objective.value_or(instance.params.objective);
    const InstanceParams& p = instance.params;
    const std::size_t N = p.max_stops;

    double theta = options.step / std::sqrt(static_cast<double>(options.iterations));
    double w_tau = 1.0, w_beta = 1.0;
    if (options.scale_residuals) {
        double F = objective_scale(instance, mode);
        if (!(F > 0.0)) F = 1.0;
        w_tau = F / (p.deadline_h * p.deadline_h);
        w_beta = F / (p.battery_kwh * p.battery_kwh);
    }

    SolverReport rep;
    rep.best_dual = -kInf;
    DualVector lambda(N + 1);
    ChargingCache cache;
    std::vector<Route> routes;
    std::optional<double> best_obj;
    EvaluateOptions eopt{options.tolerance, options.strict_soc};

    for (std::size_t k = 0; k < options.iterations; ++k) {
        DualEvaluation ev = evaluate_dual(instance, lambda, mode, options.bnb, &cache);
        rep.best_dual = std::max(rep.best_dual, ev.value);
        rep.iterations = k + 1;

        PlanSummary sum = evaluate(ev.plan, instance, mode, eopt);
        if (sum.feasible && (!best_obj || sum.objective < *best_obj)) {
            best_obj = sum.objective;
            rep.plan = ev.plan;
            rep.summary = sum;
            rep.plan_iteration = k;
            rep.plan_lambda = lambda;
            rep.plan_residuals = ev.residuals;
            rep.plan_slack = ev.slack;
        }
        Route r = route_of(ev.plan);
        auto seen = std::find_if(routes.begin(), routes.end(),
                                 [&](const Route& x) { return same_route(x, r); });
        if (seen != routes.end()) routes.erase(seen);
        routes.push_back(std::move(r));
        if (routes.size() > std::max<std::size_t>(1, options.recovery_routes))
            routes.erase(routes.begin());

        IterationRecord rec;
        rec.k = k;
        rec.dual = ev.value;
        rec.max_residual = ev.residuals.max_value();
        rec.best_feasible = best_obj;
        rec.gap_bound = best_obj ? *best_obj - rep.best_dual : kInf;
        rec.lambda = lambda;
        rec.residuals = ev.residuals;
        if (options.on_iteration) options.on_iteration(rec);
        if (options.keep_log) rep.log.push_back(std::move(rec));

        if (sum.feasible && ev.residuals.max_abs() <= options.tolerance) {
            rep.termination = Termination::Optimal;
            rep.gap = posterior_gap(rep);
            return rep;
        }

        double step = theta;
        if (options.polyak) {
            double target = best_obj ? *best_obj : rep.best_dual + 0.1 * objective_scale(instance, mode);
            double norm = 0.0;
            for (std::size_t i = 0; i <= N; ++i)
                norm += w_tau * ev.residuals.tau[i] * ev.residuals.tau[i] +
                        w_beta * ev.residuals.beta[i] * ev.residuals.beta[i];
            if (norm > 0.0 && target > ev.value) step = std::min(theta, (target - ev.value) / norm);
        }
        lambda = dual_update(lambda, ev.residuals, step * w_tau, step * w_beta);
    }

    if (rep.plan) {
        rep.termination = Termination::IterationLimit;
    } else {
        RecoveryOptions ro;
        ro.tolerance = options.tolerance;
        ro.strict_soc = options.strict_soc;
        // near-ties (relative 1e-7) go to the route with fewer station stops, so
        // objectives that differ by a constant factor pick the same plan
        std::size_t best_stops = 0;
        auto attempt = [&](const Route& route) {
            std::optional<Plan> cand = recover_feasible(instance, route, mode, ro);
            if (!cand) return;
            Plan plan = pad_plan(std::move(*cand), instance, N);
            PlanSummary sum = evaluate(plan, instance, mode, eopt);
            if (!sum.feasible) return;
            bool take = !best_obj;
            if (best_obj) {
                double tie = 1e-7 * std::max(std::abs(*best_obj), 1e-12);
                take = sum.objective < *best_obj - tie ||
                       (sum.objective <= *best_obj + tie && route.stops.size() < best_stops);
            }
            if (take) {
                best_obj = sum.objective;
                best_stops = route.stops.size();
                rep.plan = std::move(plan);
                rep.summary = sum;
            }
        };
        // most recent routes first
        for (auto it = routes.rbegin(); it != routes.rend(); ++it) attempt(*it);
        if (!rep.plan)
            for (const Route& r : least_energy_routes(instance, options.fallback_routes)) attempt(r);
        rep.termination = rep.plan ? Termination::Recovered : Termination::Infeasible;
    }
    rep.gap = posterior_gap(rep);
    return rep;
}

double posterior_gap(const SolverReport& report) {
    if (!report.plan || !report.summary) return kInf;
    if (report.plan_iteration)
        return lagrangian_gap(report.plan_lambda, report.plan_residuals) + report.plan_slack;
    return report.summary->objective - report.best_dual;
}

} // namespace cfo
