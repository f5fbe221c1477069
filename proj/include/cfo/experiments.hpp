#pragma once

#include "cfo/oracle.hpp"
#include "cfo/scenario.hpp"
#include "cfo/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cfo {

/// `count` instances from consecutive seeds starting at base.seed; seeds the
/// generator rejects are skipped (at most 10 * count attempts).
[[nodiscard]] std::vector<Instance> generate_corpus(const ScenarioSpec& base, std::size_t count);

enum class Engine { Solver, Oracle };

struct SweepOptions {
    Engine engine = Engine::Solver;
    SolverOptions solver;
    OracleConfig oracle;
};

/// One solve of an instance in a mode with either engine.
struct Outcome {
    bool feasible = false;
    Plan plan;
    PlanSummary summary;
    double gap = 0.0; ///< posterior gap (solver) or grid error bound (oracle)
};
[[nodiscard]] Outcome solve_with(const Instance& instance, ObjectiveMode mode, const SweepOptions& options);

struct AlphaRow {
    double alpha = 0.0;
    std::size_t instances = 0;
    double feasible_fraction = 0.0;
    double mean_objective = 0.0;        ///< over feasible solutions
    double mean_performance_loss = 0.0; ///< (ALG_alpha - ALG_0) / ALG_0
    double mean_gap_bound = 0.0;
    double violation_fraction = 0.0;    ///< feasible plans whose SoC dips below 0 en route
};

/// Solves every instance with reservation ratio alpha (SoC checked only at
/// the stops) for each alpha. Plans are then replayed to count strict-SoC
/// violations. The reference ALG_0 is the alpha = 0 solve; instances with
/// ALG_0 = 0 are left out of the loss mean.
[[nodiscard]] std::vector<AlphaRow> sweep_alpha(const std::vector<Instance>& instances,
                                                const std::vector<double>& alphas,
                                                const SweepOptions& options);

struct DeadlineRow {
    double factor = 0.0;
    std::string mode; ///< carbon, energy, time, fast-s or fast-sc
    std::size_t instances = 0;
    double feasible_fraction = 0.0;
    double mean_objective = 0.0; ///< in the row's own objective (carbon for the FAST baselines)
    double mean_carbon_kg = 0.0;
    double mean_energy_kwh = 0.0;
    double carbon_reduction = 0.0; ///< 1 - mean carbon / mean TIME carbon
    double energy_reduction = 0.0;
    double mean_gap_bound = 0.0;
};

/// For every factor rho the deadline becomes rho * T_f, T_f the completion
/// time of the TIME solution, and each mode is solved. Means and reductions
/// use the instances solved in every mode at that factor.
[[nodiscard]] std::vector<DeadlineRow> sweep_deadline(const std::vector<Instance>& instances,
                                                      const std::vector<double>& factors,
                                                      const SweepOptions& options);

void write_alpha_csv(std::ostream& out, const std::vector<AlphaRow>& rows);
void write_deadline_csv(std::ostream& out, const std::vector<DeadlineRow>& rows);

} // namespace cfo
