#include "cfo/experiments.hpp"

#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace cfo {

std::vector<Instance> generate_corpus(const ScenarioSpec& base, std::size_t count) {
    std::vector<Instance> out;
    ScenarioSpec spec = base;
    for (std::size_t tries = 0; out.size() < count && tries < 10 * count; ++tries) {
        spec.seed = base.seed + tries;
        try {
            out.push_back(generate(spec));
        } catch (const ConfigError&) {
        }
    }
    return out;
}

Outcome solve_with(const Instance& instance, ObjectiveMode mode, const SweepOptions& options) {
    Outcome out;
    if (options.engine == Engine::Oracle) {
        OracleConfig cfg = options.oracle;
        cfg.mode = mode;
        OracleResult r = enumerate_optimal(instance, cfg);
        out.feasible = r.feasible;
        out.plan = r.plan;
        out.summary = r.summary;
        out.gap = r.error_bound;
        return out;
    }
    SolverOptions so = options.solver;
    so.objective = mode;
    so.keep_log = false;
    so.on_iteration = nullptr;
    SolverReport r = run(instance, so);
    if (r.plan && r.summary && r.summary->feasible) {
        out.feasible = true;
        out.plan = *r.plan;
        out.summary = *r.summary;
        out.gap = r.gap;
    }
    return out;
}

namespace {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

Instance with_reserve(Instance inst, double alpha) {
    inst.params.reservation_ratio = alpha;
    return inst;
}

} // namespace

std::vector<AlphaRow> sweep_alpha(const std::vector<Instance>& instances, const std::vector<double>& alphas,
                                  const SweepOptions& options) {
    SweepOptions opt = options;
    opt.solver.strict_soc = false;
    opt.oracle.strict_soc = false;
    opt.oracle.reserve_levels = alphas;
    opt.oracle.reserve_levels.push_back(0.0);

    const std::size_t n = instances.size();
    auto solve_all = [&](double alpha) {
        std::vector<Outcome> res;
        for (const Instance& inst : instances)
            res.push_back(solve_with(with_reserve(inst, alpha), inst.params.objective, opt));
        return res;
    };

    std::vector<std::vector<Outcome>> runs;
    for (double a : alphas) runs.push_back(solve_all(a));
    std::vector<Outcome> reference;
    if (auto it = std::find(alphas.begin(), alphas.end(), 0.0); it != alphas.end())
        reference = runs[static_cast<std::size_t>(it - alphas.begin())];
    else
        reference = solve_all(0.0);

    std::vector<AlphaRow> rows;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        AlphaRow row;
        row.alpha = alphas[i];
        row.instances = n;
        std::vector<double> objs, losses, gaps;
        std::size_t violations = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const Outcome& o = runs[i][j];
            if (!o.feasible) continue;
            objs.push_back(o.summary.objective);
            gaps.push_back(o.gap);
            Instance strict = with_reserve(instances[j], alphas[i]);
            if (soc_trace(o.plan, strict).min < -1e-6) ++violations;
            const Outcome& ref = reference[j];
            if (ref.feasible && ref.summary.objective > 0.0)
                losses.push_back((o.summary.objective - ref.summary.objective) / ref.summary.objective);
        }
        row.feasible_fraction = n ? static_cast<double>(objs.size()) / static_cast<double>(n) : 0.0;
        row.mean_objective = mean(objs);
        row.mean_performance_loss = mean(losses);
        row.mean_gap_bound = mean(gaps);
        row.violation_fraction =
            objs.empty() ? 0.0 : static_cast<double>(violations) / static_cast<double>(objs.size());
        rows.push_back(row);
    }
    return rows;
}

std::vector<DeadlineRow> sweep_deadline(const std::vector<Instance>& instances,
                                        const std::vector<double>& factors, const SweepOptions& options) {
    const std::vector<std::string> modes{"time", "energy", "carbon", "fast-s", "fast-sc"};
    const std::size_t n = instances.size();

    std::vector<double> fastest(n, -1.0);
    for (std::size_t j = 0; j < n; ++j) {
        Outcome t = solve_with(instances[j], ObjectiveMode::Time, options);
        if (t.feasible) fastest[j] = t.summary.time_h;
    }

    std::vector<DeadlineRow> rows;
    for (double rho : factors) {
        if (rho < 1.0) throw DomainError("sweep_deadline: delay factor below 1");
        // outcomes[mode][instance]
        std::vector<std::vector<Outcome>> outcomes(modes.size(), std::vector<Outcome>(n));
        for (std::size_t j = 0; j < n; ++j) {
            if (fastest[j] < 0.0) continue;
            Instance inst = with_deadline(instances[j], deadline_from_factor(fastest[j], rho));
            outcomes[0][j] = solve_with(inst, ObjectiveMode::Time, options);
            outcomes[1][j] = solve_with(inst, ObjectiveMode::Energy, options);
            outcomes[2][j] = solve_with(inst, ObjectiveMode::Carbon, options);
            if (!outcomes[0][j].feasible) continue;
            Route route = route_of(outcomes[0][j].plan);
            for (std::size_t m : {3u, 4u}) {
                RecoveryOptions ro;
                ro.optimize_speed = true;
                ro.optimize_wait = m == 4;
                ro.optimize_charge = m == 4;
                ro.strict_soc = options.engine == Engine::Oracle ? options.oracle.strict_soc
                                                                 : options.solver.strict_soc;
                auto plan = recover_feasible(inst, route, ObjectiveMode::Carbon, ro);
                if (!plan) continue;
                Outcome& o = outcomes[m][j];
                o.plan = pad_plan(*plan, inst, inst.params.max_stops);
                o.summary = evaluate(o.plan, inst, ObjectiveMode::Carbon, {1e-6, ro.strict_soc});
                o.feasible = o.summary.feasible;
            }
        }

        std::vector<std::size_t> common;
        for (std::size_t j = 0; j < n; ++j) {
            bool all = true;
            for (std::size_t m = 0; m < modes.size(); ++m) all = all && outcomes[m][j].feasible;
            if (all) common.push_back(j);
        }
        auto mean_of = [&](std::size_t m, auto field) {
            std::vector<double> xs;
            for (std::size_t j : common) xs.push_back(field(outcomes[m][j]));
            return mean(xs);
        };
        auto carbon = [](const Outcome& o) { return o.summary.carbon_kg; };
        auto energy = [](const Outcome& o) { return o.summary.energy_kwh; };
        const double time_carbon = mean_of(0, carbon);
        const double time_energy = mean_of(0, energy);

        for (std::size_t m = 0; m < modes.size(); ++m) {
            DeadlineRow row;
            row.factor = rho;
            row.mode = modes[m];
            row.instances = n;
            std::size_t feasible = 0;
            for (std::size_t j = 0; j < n; ++j) feasible += outcomes[m][j].feasible ? 1 : 0;
            row.feasible_fraction = n ? static_cast<double>(feasible) / static_cast<double>(n) : 0.0;
            row.mean_objective = mean_of(m, [](const Outcome& o) { return o.summary.objective; });
            row.mean_carbon_kg = mean_of(m, carbon);
            row.mean_energy_kwh = mean_of(m, energy);
            row.carbon_reduction = time_carbon > 0.0 ? 1.0 - row.mean_carbon_kg / time_carbon : 0.0;
            row.energy_reduction = time_energy > 0.0 ? 1.0 - row.mean_energy_kwh / time_energy : 0.0;
            row.mean_gap_bound = mean_of(m, [](const Outcome& o) { return o.gap; });
            rows.push_back(row);
        }
    }
    return rows;
}

void write_alpha_csv(std::ostream& out, const std::vector<AlphaRow>& rows) {
    out << "alpha,instances,feasible_fraction,mean_objective,mean_performance_loss,mean_gap_bound,"
           "violation_fraction\n";
    out.precision(10);
    for (const AlphaRow& r : rows)
        out << r.alpha << ',' << r.instances << ',' << r.feasible_fraction << ',' << r.mean_objective << ','
            << r.mean_performance_loss << ',' << r.mean_gap_bound << ',' << r.violation_fraction << '\n';
}

void write_deadline_csv(std::ostream& out, const std::vector<DeadlineRow>& rows) {
    out << "factor,mode,instances,feasible_fraction,mean_objective,mean_carbon_kg,mean_energy_kwh,"
           "carbon_reduction,energy_reduction,mean_gap_bound\n";
    out.precision(10);
    for (const DeadlineRow& r : rows)
        out << r.factor << ',' << r.mode << ',' << r.instances << ',' << r.feasible_fraction << ','
            << r.mean_objective << ',' << r.mean_carbon_kg << ',' << r.mean_energy_kwh << ','
            << r.carbon_reduction << ',' << r.energy_reduction << ',' << r.mean_gap_bound << '\n';
}

} // namespace cfo
