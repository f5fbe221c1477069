#include "cfo/plan.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfo {

double Plan::tau_end(std::size_t k) const {
    return k < stops.size() ? stops[k].arrival : destination_arrival;
}

double Plan::beta_end(std::size_t k) const {
    return k < stops.size() ? stops[k].soc : destination_soc;
}

double Residuals::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : tau) m = std::max(m, v);
    for (double v : beta) m = std::max(m, v);
    return m;
}

double Residuals::max_abs() const {
    double m = 0.0;
    for (double v : tau) m = std::max(m, std::abs(v));
    for (double v : beta) m = std::max(m, std::abs(v));
    return m;
}

std::optional<std::string> structure_error(const Plan& plan, const Instance& instance) {
    const auto& g = instance.graph;
    const auto& p = instance.params;
    if (plan.stages.size() != plan.stops.size() + 1)
        return "plan needs exactly one more stage than stops";
    if (plan.stops.size() > p.max_stops) return "plan uses more stops than allowed";
    NodeId at = p.origin;
    bool finished = false;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const StagePath& sp = plan.stages[k];
        if (sp.edges.size() != sp.travel_times.size())
            return "stage " + std::to_string(k) + ": one travel time per segment required";
        if (finished && !sp.edges.empty())
            return "stage " + std::to_string(k) + ": continues past the destination";
        for (EdgeId e : sp.edges) {
            if (e >= g.edge_count()) return "stage " + std::to_string(k) + ": unknown segment";
            if (g.edge(e).from != at)
                return "stage " + std::to_string(k) + ": segments are not contiguous";
            at = g.edge(e).to;
        }
        if (k < plan.stops.size()) {
            const Stop& s = plan.stops[k];
            if (s.node != at) return "stop " + std::to_string(k) + " is not where stage ends";
            if (s.kind == StopKind::Destination) {
                if (s.node != p.destination)
                    return "stop " + std::to_string(k) + ": pass-through away from destination";
                if (s.wait != 0.0 || s.charge != 0.0)
                    return "stop " + std::to_string(k) + ": pass-through with stop time";
                finished = true;
            } else {
                if (finished) return "stop " + std::to_string(k) + ": station after destination";
                if (!instance.station_at(s.node))
                    return "stop " + std::to_string(k) + ": node is not a charging station";
            }
        }
    }
    if (at != p.destination) return "route does not end at the destination";
    return std::nullopt;
}

Plan pad_plan(Plan plan, const Instance& instance, std::size_t stops) {
    while (plan.stops.size() < stops) {
        Stop s;
        s.node = instance.params.destination;
        s.kind = StopKind::Destination;
        s.arrival = plan.destination_arrival;
        s.soc = plan.destination_soc;
        plan.stops.push_back(s);
        plan.stages.emplace_back();
    }
    return plan;
}

namespace {

double stop_time(const Plan& plan, std::size_t stage) {
    if (stage == 0) return 0.0;
    const Stop& s = plan.stops[stage - 1];
    return s.wait + s.charge;
}

double charged(const Plan& plan, const Instance& instance, std::size_t stage) {
    if (stage == 0) return 0.0;
    const Stop& s = plan.stops[stage - 1];
    if (s.kind != StopKind::Station || s.charge <= 0.0) return 0.0;
    auto idx = instance.station_at(s.node);
    if (!idx) return 0.0;
    const ChargeCurve& c = instance.stations[*idx].curve;
    return c.increment(s.charge, std::clamp(s.soc, 0.0, c.full_level()));
}

double stage_travel(const StagePath& sp) {
    double t = 0.0;
    for (double x : sp.travel_times) t += x;
    return t;
}

double stage_energy(const StagePath& sp, const Instance& instance) {
    double e = 0.0;
    for (std::size_t j = 0; j < sp.edges.size(); ++j)
        e += edge_energy(instance.graph.edge(sp.edges[j]), sp.travel_times[j]);
    return e;
}

} // namespace

double residual_tau(const Plan& plan, const Instance& instance, std::size_t stage) {
    (void)instance;
    double prev = stage == 0 ? 0.0 : plan.tau_end(stage - 1);
    return stage_travel(plan.stages.at(stage)) + stop_time(plan, stage) -
           (plan.tau_end(stage) - prev);
}

double residual_beta(const Plan& plan, const Instance& instance, std::size_t stage) {
    double prev = stage == 0 ? instance.params.initial_soc_kwh : plan.beta_end(stage - 1);
    return stage_energy(plan.stages.at(stage), instance) + plan.beta_end(stage) - prev -
           charged(plan, instance, stage);
}

Residuals residuals(const Plan& plan, const Instance& instance) {
    Residuals r;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        r.tau.push_back(residual_tau(plan, instance, k));
        r.beta.push_back(residual_beta(plan, instance, k));
    }
    return r;
}

SocTrace soc_trace(const Plan& plan, const Instance& instance) {
    SocTrace trace;
    double soc = instance.params.initial_soc_kwh;
    trace.min = soc;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const StagePath& sp = plan.stages[k];
        for (std::size_t j = 0; j < sp.edges.size(); ++j) {
            soc -= edge_energy(instance.graph.edge(sp.edges[j]), sp.travel_times[j]);
            trace.values.push_back(soc);
            trace.min = std::min(trace.min, soc);
        }
        if (k < plan.stops.size() && plan.stops[k].kind == StopKind::Station &&
            plan.stops[k].charge > 0.0) {
            if (auto idx = instance.station_at(plan.stops[k].node)) {
                const ChargeCurve& c = instance.stations[*idx].curve;
                double from = std::clamp(soc, 0.0, c.full_level());
                soc = c.soc_at(c.time_at(from) + plan.stops[k].charge);
            }
        }
    }
    return trace;
}

bool lemma1_holds(const std::vector<double>& energies, double alpha) {
    if (energies.empty()) throw DomainError("lemma1_holds: empty energy vector");
    double harvested = 0.0, net = 0.0;
    for (double c : energies) {
        harvested += 0.5 * (std::abs(c) - c);
        net += c;
    }
    return harvested <= alpha / (2.0 * (1.0 - alpha)) * net;
}

double stop_objective(ObjectiveMode mode, const ChargingStation& station, const Stop& stop,
                      double efficiency) {
    if (stop.kind != StopKind::Station) return 0.0;
    const ChargeCurve& c = station.curve;
    double soc = std::clamp(stop.soc, 0.0, c.full_level());
    switch (mode) {
    case ObjectiveMode::Time:
        return stop.wait + stop.charge;
    case ObjectiveMode::Energy:
        return c.increment(stop.charge, soc) / efficiency;
    case ObjectiveMode::Carbon: {
        if (stop.charge <= 0.0) return 0.0;
        double s0 = c.time_at(soc);
        double start = stop.arrival + stop.wait;
        return integrate_intensity_rate(station.intensity.curve(), start - s0, c, s0,
                                        s0 + stop.charge) /
               efficiency;
    }
    }
    return 0.0;
}

PlanSummary evaluate(const Plan& plan, const Instance& instance, const EvaluateOptions& options) {
    return evaluate(plan, instance, instance.params.objective, options);
}

PlanSummary evaluate(const Plan& plan, const Instance& instance, ObjectiveMode mode,
                     const EvaluateOptions& options) {
    if (auto err = structure_error(plan, instance)) throw ConfigError("plan: " + *err);
    const InstanceParams& p = instance.params;
    const double tol = options.tolerance;
    PlanSummary out;
    auto fail = [&](const std::string& why) {
        if (out.violation.empty()) out.violation = why;
    };

    double travel = 0.0;
    for (std::size_t k = 0; k < plan.stages.size(); ++k) {
        const StagePath& sp = plan.stages[k];
        for (std::size_t j = 0; j < sp.edges.size(); ++j) {
            const RoadSegment& seg = instance.graph.edge(sp.edges[j]);
            const TimeBounds& b = instance.graph.bounds(seg.id);
            double t = sp.travel_times[j];
            if (t < b.lower - tol || t > b.upper + tol) {
                // outside the speed bounds the energy is undefined
                throw ConfigError("plan: travel time outside the bounds of segment " +
                                  std::to_string(seg.id));
            }
            t = std::clamp(t, b.lower, b.upper);
            out.distance_km += seg.length_km;
            out.energy_kwh += edge_energy(seg, t);
            travel += t;
        }
    }
    double stop_total = 0.0;
    for (const Stop& s : plan.stops) {
        if (s.kind != StopKind::Station) continue;
        const ChargingStation& st = instance.stations[*instance.station_at(s.node)];
        stop_total += s.wait + s.charge;
        out.carbon_kg += stop_objective(ObjectiveMode::Carbon, st, s, p.efficiency);
        out.charged_kwh += st.curve.increment(s.charge, std::clamp(s.soc, 0.0, p.battery_kwh));
        if (mode != ObjectiveMode::Time) out.objective += stop_objective(mode, st, s, p.efficiency);
        if (s.wait < p.wait_min_h - tol || s.wait > p.wait_max_h + tol) fail("wait outside bounds");
        if (s.charge < -tol || s.charge > p.charge_max_h + tol) fail("charge time outside bounds");
    }
    out.time_h = travel + stop_total;
    if (mode == ObjectiveMode::Time) out.objective = out.time_h;

    Residuals r = residuals(plan, instance);
    out.max_residual = r.max_value();
    if (out.max_residual > tol) fail("residual positive");

    auto check_box = [&](double tau, double beta) {
        if (tau < -tol || tau > p.deadline_h + tol) fail("scheduled time outside [0, T]");
        if (beta < instance.reserve_kwh() - tol || beta > p.battery_kwh + tol)
            fail("scheduled SoC outside [alpha B, B]");
    };
    for (const Stop& s : plan.stops) check_box(s.arrival, s.soc);
    check_box(plan.destination_arrival, plan.destination_soc);
    if (out.time_h > p.deadline_h + tol) fail("deadline missed");

    SocTrace trace = soc_trace(plan, instance);
    out.min_soc = trace.min;
    if (options.strict_soc && trace.min < -tol) fail("SoC negative along the route");

    out.feasible = out.violation.empty();
    return out;
}

double lagrangian_gap(const DualVector& lambda, const Residuals& delta) {
    double s = 0.0;
    for (std::size_t k = 0; k < delta.tau.size() && k < lambda.stages(); ++k)
        s += lambda.tau[k] * delta.tau[k] + lambda.beta[k] * delta.beta[k];
    return -s;
}

} // namespace cfo
