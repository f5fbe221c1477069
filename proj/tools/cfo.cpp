#include "cfo/errors.hpp"
#include "cfo/experiments.hpp"
#include "cfo/io.hpp"
#include "cfo/oracle.hpp"
#include "cfo/scenario.hpp"
#include "cfo/solver.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace cfo;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

struct GenFlags {
    ScenarioSpec spec;
    std::string topology = "line";
    std::string intensity = "diurnal";
    std::string objective = "carbon";
    std::optional<std::size_t> stations;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--seed", spec.seed, "Generator seed");
        cmd->add_option("--topology", topology, "line | grid | random-planar");
        cmd->add_option("--nodes", spec.nodes, "Node count");
        cmd->add_option("--stations", stations, "Exact station count");
        cmd->add_option("--station-density", spec.station_density,
                        "Fraction of intermediate nodes with a station");
        cmd->add_option("--intensity", intensity, "constant | diurnal | two-region");
        cmd->add_option("--intensity-value", spec.intensity_value, "Level of the constant family (kg/kWh)");
        cmd->add_option("--elevation-sd", spec.elevation_sd_m, "Standard deviation of node elevation (m)");
        cmd->add_option("--edge-km-min", spec.edge_km_min);
        cmd->add_option("--edge-km-max", spec.edge_km_max);
        cmd->add_option("--max-stops", spec.max_stops, "N");
        cmd->add_option("--gen-alpha", spec.reservation_ratio, "Reservation ratio of generated instances");
        cmd->add_option("--delay-factor", spec.delay_factor,
                        "Deadline as a multiple of the fastest completion (0 skips that solve)");
        cmd->add_option("--gen-objective", objective, "Objective stored in generated instances");
    }

    ScenarioSpec resolve() const {
        ScenarioSpec s = spec;
        s.topology = topology_from_string(topology);
        s.intensity = intensity_family_from_string(intensity);
        s.objective = objective_from_string(objective);
        s.stations = stations;
        return s;
    }
};

Instance prepare(const std::string& path, std::optional<double> alpha, std::optional<double> factor) {
    Instance inst = load_instance(path);
    if (alpha) inst.params.reservation_ratio = *alpha;
    if (factor) inst = with_deadline(inst, deadline_from_factor(inst, *factor));
    return inst;
}

std::string fmt(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

void print_summary(std::ostream& out, const PlanSummary& s) {
    out << "objective " << fmt(s.objective) << "\ncarbon_kg " << fmt(s.carbon_kg) << "\nenergy_kwh "
        << fmt(s.energy_kwh) << "\ntime_h " << fmt(s.time_h) << "\nfeasible " << (s.feasible ? "yes" : "no")
        << '\n';
}

std::vector<Instance> corpus_from(const std::vector<std::string>& paths, std::size_t generate_count,
                                  const GenFlags& gen) {
    std::vector<Instance> out;
    for (const auto& p : paths) out.push_back(load_instance(p));
    if (generate_count > 0) {
        auto more = generate_corpus(gen.resolve(), generate_count);
        out.insert(out.end(), more.begin(), more.end());
    }
    if (out.empty()) throw ConfigError("no instances: pass --instance or --generate");
    return out;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text_file(path, text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Carbon-aware planning for battery-electric trucks"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "Dual subgradient solve of one instance");
    std::string instance_path, out_path, log_path, objective;
    std::size_t iters = 200;
    double eps = 1e-3, step = 1.0;
    std::optional<double> alpha, factor;
    bool strict = false, polyak = false;
    solve->add_option("--instance", instance_path, "Instance JSON")->required();
    solve->add_option("--objective", objective, "carbon | energy | time (default: the instance's)");
    solve->add_option("--iters", iters, "Iteration budget K");
    solve->add_option("--eps", eps, "Branch-and-bound tolerance of the charging subproblem");
    solve->add_option("--alpha", alpha, "Reservation ratio override");
    solve->add_option("--deadline-factor", factor, "Deadline = factor x fastest completion");
    solve->add_option("--out", out_path, "Plan JSON output (default: stdout)");
    solve->add_option("--log", log_path, "Per-iteration CSV log");
    solve->add_flag("--strict-soc", strict, "Require SoC >= 0 after every segment");
    solve->add_option("--step", step, "Step scale; theta = step / sqrt(K)");
    solve->add_flag("--polyak", polyak, "Cap steps with the Polyak rule");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "Grid brute force on a small instance");
    OracleConfig ocfg;
    bool non_strict = false;
    std::string oracle_instance, oracle_out, oracle_objective;
    std::optional<double> oracle_alpha, oracle_factor;
    oracle->add_option("--instance", oracle_instance, "Instance JSON")->required();
    oracle->add_option("--objective", oracle_objective, "carbon | energy | time");
    oracle->add_option("--grid-time", ocfg.time_points, "G_t");
    oracle->add_option("--grid-charge", ocfg.charge_points, "G_c");
    oracle->add_option("--grid-wait", ocfg.wait_points, "G_w");
    oracle->add_option("--max-path-length", ocfg.max_path_length);
    oracle->add_option("--alpha", oracle_alpha, "Reservation ratio override");
    oracle->add_option("--deadline-factor", oracle_factor, "Deadline = factor x fastest completion");
    oracle->add_flag("--no-strict-soc", non_strict, "Check the SoC only at the stops");
    oracle->add_option("--out", oracle_out, "Plan JSON output (default: stdout)");

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
    GenFlags gen_flags;
    std::string gen_out;
    gen_flags.add_to(gen);
    gen->add_option("--out", gen_out, "Instance JSON output (default: stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "Re-check a plan file against an instance");
    std::string verify_instance, verify_plan, verify_objective;
    bool verify_strict = false;
    verify->add_option("--instance", verify_instance)->required();
    verify->add_option("--plan", verify_plan)->required();
    verify->add_option("--objective", verify_objective, "carbon | energy | time");
    verify->add_flag("--strict-soc", verify_strict);

    // sweeps
    struct SweepFlags {
        std::vector<std::string> instances;
        std::size_t generate = 0;
        GenFlags gen;
        std::vector<double> values;
        std::size_t iters = 200;
        bool use_oracle = false;
        std::string out;
    };
    SweepFlags sa, sd;
    sa.values = {0.0, 0.02, 0.06, 0.12};
    sd.values = {1.1, 1.2, 1.5};
    auto add_sweep = [](CLI::App* cmd, SweepFlags& f, const char* list_name, const char* list_help) {
        cmd->add_option("--instance", f.instances, "Instance JSON (repeatable)");
        cmd->add_option("--generate", f.generate, "Also generate this many instances from the gen flags");
        f.gen.add_to(cmd);
        cmd->add_option(list_name, f.values, list_help)->delimiter(',');
        cmd->add_option("--iters", f.iters, "Solver iteration budget");
        cmd->add_flag("--oracle", f.use_oracle, "Solve with the grid oracle instead");
        cmd->add_option("--out", f.out, "CSV output (default: stdout)");
    };
    auto* sweep_a = app.add_subcommand("sweep-alpha", "Reservation ratio sweep");
    add_sweep(sweep_a, sa, "--alphas", "Comma separated reservation ratios");
    auto* sweep_d = app.add_subcommand("sweep-deadline", "Delay factor sweep");
    add_sweep(sweep_d, sd, "--factors", "Comma separated delay factors");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kError;
    }

    try {
        if (*solve) {
            Instance inst = prepare(instance_path, alpha, factor);
            SolverOptions so;
            so.iterations = iters;
            so.step = step;
            so.polyak = polyak;
            so.strict_soc = strict;
            so.bnb.epsilon = eps;
            so.keep_log = false;
            if (!objective.empty()) so.objective = objective_from_string(objective);
            std::ofstream log;
            if (!log_path.empty()) {
                log.open(log_path);
                if (!log) throw ConfigError("cannot open log file " + log_path);
                log << "k,D,max_residual,best_feasible_objective,gap_bound\n";
                so.on_iteration = [&](const IterationRecord& r) {
                    log << r.k << ',' << fmt(r.dual) << ',' << fmt(r.max_residual) << ','
                        << (r.best_feasible ? fmt(*r.best_feasible) : "") << ',' << fmt(r.gap_bound) << '\n';
                };
            }
            SolverReport rep = run(inst, so);
            std::cerr << "termination " << to_string(rep.termination) << "\niterations " << rep.iterations
                      << "\nbest_dual " << fmt(rep.best_dual) << "\ngap " << fmt(rep.gap) << '\n';
            if (!rep.plan) {
                std::cerr << "no feasible plan found\n";
                return kInfeasible;
            }
            print_summary(std::cerr, *rep.summary);
            write_output(out_path, plan_to_json(*rep.plan, &*rep.summary) + "\n");
            return kOk;
        }
        if (*oracle) {
            Instance inst = prepare(oracle_instance, oracle_alpha, oracle_factor);
            ocfg.strict_soc = !non_strict;
            if (!oracle_objective.empty()) ocfg.mode = objective_from_string(oracle_objective);
            OracleResult r;
            try {
                r = enumerate_optimal(inst, ocfg);
            } catch (const OracleRefusal& e) {
                std::cerr << "refused: " << e.what() << '\n';
                return kInfeasible;
            }
            std::cerr << "candidates " << r.evaluated << '\n';
            if (!r.feasible) {
                std::cerr << "no feasible grid point\n";
                return kInfeasible;
            }
            std::cerr << "error_bound " << fmt(r.error_bound) << '\n';
            print_summary(std::cerr, r.summary);
            write_output(oracle_out, plan_to_json(r.plan, &r.summary) + "\n");
            return kOk;
        }
        if (*gen) {
            Instance inst = generate(gen_flags.resolve());
            write_output(gen_out, instance_to_json(inst) + "\n");
            return kOk;
        }
        if (*verify) {
            Instance inst = load_instance(verify_instance);
            Plan plan = load_plan(verify_plan);
            ObjectiveMode mode =
                verify_objective.empty() ? inst.params.objective : objective_from_string(verify_objective);
            PlanSummary s = evaluate(plan, inst, mode, {1e-6, verify_strict});
            print_summary(std::cout, s);
            if (!s.feasible) {
                std::cout << "violation " << s.violation << '\n';
                return kInfeasible;
            }
            return kOk;
        }
        auto options_of = [](const SweepFlags& f) {
            SweepOptions o;
            o.engine = f.use_oracle ? Engine::Oracle : Engine::Solver;
            o.solver.iterations = f.iters;
            return o;
        };
        if (*sweep_a) {
            auto corpus = corpus_from(sa.instances, sa.generate, sa.gen);
            std::ostringstream csv;
            write_alpha_csv(csv, sweep_alpha(corpus, sa.values, options_of(sa)));
            write_output(sa.out, csv.str());
            return kOk;
        }
        if (*sweep_d) {
            auto corpus = corpus_from(sd.instances, sd.generate, sd.gen);
            std::ostringstream csv;
            write_deadline_csv(csv, sweep_deadline(corpus, sd.values, options_of(sd)));
            write_output(sd.out, csv.str());
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
