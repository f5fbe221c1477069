// Acceptance harness: one PASS/FAIL line per criterion.
//   cfo_acceptance            run all ten
//   cfo_acceptance 3 7        run a subset
// Exit status is non-zero when any selected criterion fails.

#include "enumerate.hpp"
#include "support.hpp"

#include "cfo/errors.hpp"
#include "cfo/experiments.hpp"
#include "cfo/oracle.hpp"
#include "cfo/scenario.hpp"
#include "cfo/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace cfo;
using namespace cfo::test;

namespace {

// Tolerances and sizes, pinned.
constexpr int kSpeedDraws = 1000;
constexpr int kSpeedGrid = 1000000;
constexpr double kSpeedRelTol = 1e-8;
constexpr double kSpeedSeconds = 10.0;

constexpr int kSigmaDraws = 100;
constexpr int kSigmaGrid = 40;
constexpr double kSigmaEps = 1e-3;
constexpr double kSigmaSeconds = 120.0;

constexpr int kOuterInstances = 50;
constexpr double kOuterTol = 1e-9;
constexpr double kOuterSeconds = 30.0;

constexpr int kDualityInstances = 50;
constexpr std::size_t kDualityIters = 200;
constexpr double kDualitySlack = 1e-6;
constexpr double kDualitySeconds = 600.0;

constexpr int kCorollaryInstances = 5;
constexpr double kResidualTol = 1e-6;

constexpr int kLemmaVectors = 10000;
constexpr double kLemmaSeconds = 5.0;

constexpr int kConvergenceInstances = 10;
constexpr double kConvergenceRelTol = 1e-9;

constexpr int kCorpusSize = 20;

constexpr int kFootprintDraws = 1000;
constexpr long kQuadratureSteps = 1000000;
constexpr double kFootprintRelTol = 1e-7;
constexpr double kDatumRelTol = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------- 1: speed

Verdict speed_exactness() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(1001);
    double worst = 0.0;
    int failures = 0;
    for (int d = 0; d < kSpeedDraws; ++d) {
        const double grade = uniform(rng, -0.06, 0.06);
        TruckPreset truck;
        RoadSegment s = segment(0, 1, uniform(rng, 5, 300), uniform(rng, 30, 60), uniform(rng, 80, 120),
                                power_coefficients(truck, grade));
        const ObjectiveMode mode = d % 5 == 0 ? ObjectiveMode::Time : ObjectiveMode::Carbon;
        const double lt = d % 7 == 0 ? 0.0 : uniform(rng, 0, 300);
        const double lb = d % 11 == 0 ? 0.0 : uniform(rng, 0, 2);
        TradeoffMinimum m = solve_speed_subproblem(s, mode, lt, lb);

        const double wt = lt + (mode == ObjectiveMode::Time ? 1.0 : 0.0);
        const auto& a = s.power_coeffs;
        const double lo = s.length_km / s.speed_max_kmh, hi = s.length_km / s.speed_min_kmh;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kSpeedGrid; ++i) {
            double t = lo + (hi - lo) * i / kSpeedGrid;
            double r = s.length_km / t;
            double g = wt * t + lb * t * (a[0] + r * (a[1] + r * (a[2] + r * a[3])));
            best = std::min(best, g);
        }
        double err = std::abs(m.value - best) / std::max(std::abs(best), 1e-300);
        if (best == 0.0) err = std::abs(m.value);
        worst = std::max(worst, err);
        if (err > kSpeedRelTol) ++failures;
    }
    double secs = seconds_since(t0);
    return {failures == 0 && secs < kSpeedSeconds,
            fmt("%d draws, worst rel err %.2e (tol %.0e), %d failures, %.1fs (limit %.0fs)", kSpeedDraws,
                worst, kSpeedRelTol, failures, secs, kSpeedSeconds)};
}

// ---------------------------------------------------------------- 2: sigma

IntensitySignal random_trace(std::mt19937_64& rng, double horizon) {
    std::vector<double> xs, ys;
    const double period = uniform(rng, 6, 24), phase = uniform(rng, 0, 6.3);
    const double mean = uniform(rng, 0.2, 0.7), amp = uniform(rng, 0.0, 0.3);
    for (double h = 0.0; h <= horizon + 1e-9; h += 1.0) {
        xs.push_back(h);
        ys.push_back(std::max(0.0, mean + amp * std::sin(6.283185307 * h / period + phase) +
                                       uniform(rng, -0.05, 0.05)));
    }
    return IntensitySignal(xs, ys);
}

// Lipschitz bound of h along each axis; the grid minimum overshoots the
// true minimum by at most sum L_i h_i / 2.
double sigma_grid_error(const Instance& inst, const ChargingStation& st, const StopPrices& pr,
                        const std::array<double, 4>& step) {
    const InstanceParams& p = inst.params;
    const ChargeCurve& c = st.curve;
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (double r : c.slopes()) {
        rmax = std::max(rmax, r);
        rmin = std::min(rmin, r);
    }
    auto xs = st.intensity.curve().xs();
    auto ys = st.intensity.curve().ys();
    double pmax = *std::max_element(ys.begin(), ys.end()), dpmax = 0.0;
    for (std::size_t k = 0; k + 1 < xs.size(); ++k)
        dpmax = std::max(dpmax, std::abs(ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]));
    const double eta = p.efficiency, B = p.battery_kwh, tcu = p.charge_max_h;
    const double ratio = rmax / rmin;
    const double Lc = rmax * (pmax / eta + pr.beta_out) + pr.tau_out;
    const double Lw = pr.tau_out + dpmax * B / eta;
    const double Lb = (pmax * (1.0 + ratio) + dpmax * tcu * rmax) / eta + std::abs(pr.beta_in - pr.beta_out) +
                      pr.beta_out * (1.0 + ratio);
    const double Lt = std::abs(pr.tau_out - pr.tau_in) + dpmax * tcu * rmax / eta;
    return 0.5 * (Lc * step[0] + Lw * step[1] + Lb * step[2] + Lt * step[3]);
}

Verdict sigma_exactness() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(2002);
    int above = 0, below = 0, uncertified = 0;
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int d = 0; d < kSigmaDraws; ++d) {
        Instance inst = line3(400.0, 0.39, uniform(rng, 10, 30), 1);
        InstanceParams& p = inst.params;
        p.reservation_ratio = uniform(rng, 0.0, 0.15);
        p.wait_min_h = uniform(rng, 0.0, 0.3);
        p.wait_max_h = p.wait_min_h + uniform(rng, 0.2, 6.0);
        p.charge_max_h = uniform(rng, 0.3, 1.5);
        p.efficiency = uniform(rng, 0.85, 1.0);
        ChargingStation& st = inst.stations[0];
        st.intensity = random_trace(rng, p.deadline_h + p.wait_max_h + 2.0);
        StopPrices pr{uniform(rng, 0, 3), uniform(rng, 0, 3), uniform(rng, 0, 0.8), uniform(rng, 0, 0.8)};
        if (d % 4 == 1) pr.tau_out = pr.tau_in; // flat in the arrival time
        const ObjectiveMode mode = d % 10 == 9 ? ObjectiveMode::Energy : ObjectiveMode::Carbon;

        ChargingSolution sol = solve_charging_subproblem(inst, st, mode, pr, {kSigmaEps, 200000});
        if (!sol.certified) ++uncertified;

        const std::array<double, 4> lo{0.0, p.wait_min_h, inst.reserve_kwh(), 0.0};
        const std::array<double, 4> hi{p.charge_max_h, p.wait_max_h, p.battery_kwh, p.deadline_h};
        std::array<double, 4> h;
        for (int i = 0; i < 4; ++i) h[i] = (hi[i] - lo[i]) / (kSigmaGrid - 1);
        double grid = std::numeric_limits<double>::infinity();
        for (int a = 0; a < kSigmaGrid; ++a)
            for (int b = 0; b < kSigmaGrid; ++b)
                for (int c = 0; c < kSigmaGrid; ++c)
                    for (int e = 0; e < kSigmaGrid; ++e)
                        grid = std::min(grid, charging_tradeoff(inst, st, mode, pr, lo[0] + a * h[0],
                                                                lo[1] + b * h[1], lo[2] + c * h[2],
                                                                lo[3] + e * h[3]));
        const double err = sigma_grid_error(inst, st, pr, h);
        if (sol.value > grid + kSigmaEps) ++above;
        if (sol.value < grid - err) ++below;
        worst_excess = std::max(worst_excess, sol.value - grid);
    }
    double secs = seconds_since(t0);
    return {above == 0 && below == 0 && secs < kSigmaSeconds,
            fmt("%d draws, max(value - grid) %.2e (eps %.0e), %d above, %d below grid-err, %d uncertified, "
                "%.1fs (limit %.0fs)",
                kSigmaDraws, worst_excess, kSigmaEps, above, below, uncertified, secs, kSigmaSeconds)};
}

// ---------------------------------------------------------------- 3: outer

DualVector random_lambda(std::mt19937_64& rng, std::size_t stages, double tau_scale, double beta_scale) {
    DualVector l(stages);
    for (std::size_t i = 0; i < stages; ++i) {
        l.tau[i] = uniform(rng, 0, 1) < 0.3 ? 0.0 : uniform(rng, 0, tau_scale);
        l.beta[i] = uniform(rng, 0, 1) < 0.3 ? 0.0 : uniform(rng, 0, beta_scale);
    }
    return l;
}

// The stop-selection tables of an instance at a given lambda.
OuterInput outer_tables(const Instance& inst, const DualVector& l, ObjectiveMode mode) {
    const InstanceParams& p = inst.params;
    const std::size_t N = p.max_stops, S = inst.stations.size();
    OuterInput in;
    in.stops = N;
    in.stations = S;
    std::vector<NodeId> nodes;
    for (const auto& st : inst.stations) nodes.push_back(st.node);
    std::vector<NodeId> targets = nodes;
    targets.push_back(p.destination);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= N; ++k) {
        StageSpeeds sp = stage_speeds(inst, l, k, mode);
        std::vector<NodeId> sources = k == 0 ? std::vector<NodeId>{p.origin} : nodes;
        auto trees = all_pairs_stage_paths(inst.graph, sp.weight, sources);
        std::vector<std::vector<double>> table(S + 1, std::vector<double>(S + 1, inf));
        for (std::size_t si = 0; si < trees.size(); ++si)
            for (std::size_t ti = 0; ti < targets.size(); ++ti)
                table[k == 0 ? 0 : 1 + si][ti] = trees[si].dist[targets[ti]];
        in.sp.push_back(table);
    }
    for (std::size_t k = 0; k < N; ++k) {
        StopPrices pr = stop_prices(l, k);
        in.pass.push_back(solve_passthrough(inst, pr).value);
        std::vector<double> row;
        for (const auto& st : inst.stations) row.push_back(solve_charging_subproblem(inst, st, mode, pr).lower);
        in.sigma.push_back(row);
    }
    return in;
}

Verdict outer_correctness() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(3003);
    int done = 0, mismatches = 0;
    double worst = 0.0;
    std::uint64_t seed = 300;
    while (done < kOuterInstances && seed < 300 + 20 * kOuterInstances) {
        ScenarioSpec spec;
        spec.seed = seed++;
        spec.topology = done % 3 == 2 ? Topology::Grid : Topology::Line;
        spec.nodes = spec.topology == Topology::Grid ? 9 : 6 + done % 4;
        spec.stations = 1 + done % 5;
        spec.max_stops = done % 4;
        spec.delay_factor = 0.0;
        spec.intensity = done % 2 ? IntensityFamily::Diurnal : IntensityFamily::TwoRegion;
        Instance inst;
        try {
            inst = generate(spec);
        } catch (const ConfigError&) {
            continue;
        }
        if (inst.stations.size() > 5) continue;
        DualVector l = random_lambda(rng, inst.params.max_stops + 1, 20.0, 0.5);
        OuterInput in = outer_tables(inst, l, ObjectiveMode::Carbon);
        Enumerated brute = enumerate_outer(in);
        OuterSolution sol = solve_outer(in);
        double err = std::abs(sol.value - brute.value);
        worst = std::max(worst, err / std::max(1.0, std::abs(brute.value)));
        if (err > kOuterTol * std::max(1.0, std::abs(brute.value))) ++mismatches;
        // the full dual evaluation must select the same cost
        DualEvaluation ev = evaluate_dual(inst, l, ObjectiveMode::Carbon);
        if (std::abs(ev.outer.cost - sol.cost) > kOuterTol * std::max(1.0, std::abs(sol.cost))) ++mismatches;
        ++done;
    }
    double secs = seconds_since(t0);
    return {done == kOuterInstances && mismatches == 0 && secs < kOuterSeconds,
            fmt("%d instances (<= 5 stations, N <= 3), worst rel diff %.2e (tol %.0e), %d mismatches, %.1fs "
                "(limit %.0fs)",
                done, worst, kOuterTol, mismatches, secs, kOuterSeconds)};
}

// ----------------------------------------------------- 4: weak duality

struct OracleCase {
    Instance instance;
    OracleResult opt;
};

// Small generated instances the oracle can solve; mixes topology, station
// count, N and intensity family.
std::vector<OracleCase> oracle_corpus(int count, std::uint64_t seed0) {
    std::vector<OracleCase> out;
    OracleConfig cfg;
    cfg.strict_soc = false;
    for (std::uint64_t seed = seed0; static_cast<int>(out.size()) < count && seed < seed0 + 40 * count; ++seed) {
        const int i = static_cast<int>(seed - seed0);
        ScenarioSpec spec;
        spec.seed = seed;
        spec.topology = i % 4 == 3 ? Topology::Grid : Topology::Line;
        spec.nodes = spec.topology == Topology::Grid ? 9 : 5 + i % 4;
        spec.stations = 1 + i % 3;
        spec.max_stops = 1 + i % 2;
        spec.edge_km_min = 200;
        spec.edge_km_max = 330;
        spec.delay_factor = std::array<double, 3>{1.2, 1.5, 2.0}[i % 3];
        spec.intensity = std::array<IntensityFamily, 3>{IntensityFamily::Diurnal, IntensityFamily::TwoRegion,
                                                         IntensityFamily::Constant}[i % 3];
        Instance inst;
        try {
            inst = generate(spec);
        } catch (const ConfigError&) {
            continue;
        }
        OracleResult opt = enumerate_optimal(inst, cfg);
        if (!opt.feasible) continue;
        out.push_back({std::move(inst), std::move(opt)});
    }
    return out;
}

Verdict weak_duality() {
    auto t0 = Clock::now();
    std::vector<OracleCase> corpus = oracle_corpus(kDualityInstances, 400);
    int dual_violations = 0, gap_violations = 0, with_plan = 0;
    double worst_dual = -std::numeric_limits<double>::infinity();
    double worst_gap = -std::numeric_limits<double>::infinity();
    for (const OracleCase& c : corpus) {
        SolverOptions o;
        o.iterations = kDualityIters;
        SolverReport r = run(c.instance, o);
        const double opt = c.opt.objective, err = c.opt.error_bound;
        for (const IterationRecord& rec : r.log) {
            worst_dual = std::max(worst_dual, rec.dual - opt - err);
            if (rec.dual > opt + err + kDualitySlack) ++dual_violations;
        }
        if (r.summary && r.summary->feasible) {
            ++with_plan;
            worst_gap = std::max(worst_gap, r.summary->objective - opt - r.gap - err);
            if (r.summary->objective - opt > r.gap + err + kDualitySlack) ++gap_violations;
        }
    }
    double secs = seconds_since(t0);
    return {static_cast<int>(corpus.size()) == kDualityInstances && dual_violations == 0 &&
                gap_violations == 0 && secs < kDualitySeconds,
            fmt("%zu instances, %d with plans; max D - OPT - err %.3g (%d violations); max ALG - OPT - gap - err "
                "%.3g (%d violations); %.1fs (limit %.0fs)",
                corpus.size(), with_plan, worst_dual, dual_violations, worst_gap, gap_violations, secs,
                kDualitySeconds)};
}

// ------------------------------------------------------- 5: corollary

// Instances that need no charging: the first minimizer can already have
// zero residuals. CARBON and TIME objectives, varied N.
Verdict corollary() {
    int found = 0, mismatches = 0, tried = 0;
    std::string modes;
    double worst = 0.0;
    for (std::uint64_t seed = 500; seed < 560 && found < 2 * kCorollaryInstances; ++seed) {
        ScenarioSpec spec;
        spec.seed = seed;
        spec.nodes = 4 + seed % 4;
        spec.stations = 1 + seed % 2;
        spec.max_stops = seed % 3;
        spec.edge_km_min = 60;
        spec.edge_km_max = 120;
        spec.delay_factor = 1.3;
        spec.objective = seed % 2 ? ObjectiveMode::Time : ObjectiveMode::Carbon;
        Instance inst;
        try {
            inst = generate(spec);
        } catch (const ConfigError&) {
            continue;
        }
        ++tried;
        SolverReport r = run(inst, {});
        if (r.termination != Termination::Optimal) continue;
        if (!r.plan_iteration || r.plan_residuals.max_abs() > kResidualTol) continue;
        OracleConfig cfg;
        cfg.strict_soc = false;
        OracleResult opt = enumerate_optimal(inst, cfg);
        ++found;
        double diff = opt.feasible ? std::abs(r.summary->objective - opt.objective) : INFINITY;
        worst = std::max(worst, diff - opt.error_bound);
        if (!(diff <= opt.error_bound + kResidualTol)) ++mismatches;
        modes += to_string(spec.objective)[0];
    }
    return {found >= kCorollaryInstances && mismatches == 0,
            fmt("%d of %d instances terminated with |delta| <= %.0e (modes %s); max |ALG - OPT| - err %.3g, %d "
                "mismatches",
                found, tried, kResidualTol, modes.c_str(), worst, mismatches)};
}

// ------------------------------------------------------------ 6: lemma

Verdict lemma() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(6006);
    const double B = 1000.0;
    long premises = 0, counterexamples = 0;
    for (double alpha : {0.02, 0.05, 0.12})
        for (int v = 0; v < kLemmaVectors; ++v) {
            std::size_t n = 1 + rng() % 12;
            std::vector<double> c(n);
            const double neg = uniform(rng, 0, 0.4);
            for (double& x : c) x = uniform(rng, 0, 1) < neg ? -uniform(rng, 0, 60) : uniform(rng, 0, 250);
            double soc = uniform(rng, 0, B), low = soc;
            for (double x : c) {
                soc = std::min(B, soc - x);
                low = std::min(low, soc);
            }
            if (!lemma1_holds(c, alpha) || soc < alpha * B) continue;
            ++premises;
            if (low < 0.0) ++counterexamples;
        }
    double secs = seconds_since(t0);
    return {counterexamples == 0 && premises > 0 && secs < kLemmaSeconds,
            fmt("%d vectors x 3 alphas, %ld satisfy the premises, %ld counterexamples, %.2fs (limit %.0fs)",
                kLemmaVectors, premises, counterexamples, secs, kLemmaSeconds)};
}

// ------------------------------------------------------ 7: convergence

Verdict convergence() {
    auto t0 = Clock::now();
    const std::vector<std::size_t> budgets{100, 400, 1600};
    int done = 0, regressions = 0, skipped = 0;
    std::ostringstream trace;
    for (std::uint64_t seed = 700; done < kConvergenceInstances && seed < 760; ++seed) {
        ScenarioSpec spec;
        spec.seed = seed;
        spec.nodes = 5 + seed % 3;
        spec.stations = 2;
        spec.max_stops = 2;
        spec.edge_km_min = 200;
        spec.edge_km_max = 330;
        Instance inst;
        try {
            inst = generate(spec);
        } catch (const ConfigError&) {
            continue;
        }
        std::vector<double> best;
        bool trivial = false;
        for (std::size_t K : budgets) {
            SolverOptions o;
            o.iterations = K;
            o.keep_log = false;
            SolverReport r = run(inst, o);
            // a zero-carbon plan pins every bound at 0; such instances say nothing
            if (K == budgets.front() && r.summary && r.summary->objective <= 1e-9) {
                trivial = true;
                break;
            }
            best.push_back(r.best_dual);
        }
        if (trivial) {
            ++skipped;
            continue;
        }
        for (std::size_t i = 1; i < best.size(); ++i)
            if (best[i] < best[i - 1] - kConvergenceRelTol * std::max(1.0, std::abs(best[i - 1]))) ++regressions;
        trace << (done ? "; " : "") << fmt("%.2f/%.2f/%.2f", best[0], best[1], best[2]);
        ++done;
    }
    double secs = seconds_since(t0);
    return {done == kConvergenceInstances && regressions == 0,
            fmt("%d instances (%d zero-objective ones skipped), best dual at K=100/400/1600: %s; %d regressions; "
                "%.1fs",
                done, skipped, trace.str().c_str(), regressions, secs)};
}

// ------------------------------------------------- 8: deadline trend

Verdict deadline_trend() {
    auto t0 = Clock::now();
    ScenarioSpec spec;
    spec.seed = 100;
    spec.topology = Topology::Line;
    spec.nodes = 7;
    spec.stations = 3;
    spec.max_stops = 2;
    spec.edge_km_min = 250;
    spec.edge_km_max = 350;
    spec.intensity = IntensityFamily::TwoRegion;
    spec.delay_factor = 1.6;
    std::vector<Instance> corpus = generate_corpus(spec, kCorpusSize);
    SweepOptions opt;
    opt.engine = Engine::Oracle;
    opt.oracle.strict_soc = false;
    const std::vector<double> factors{1.1, 1.2, 1.5};
    auto rows = sweep_deadline(corpus, factors, opt);
    auto carbon_of = [&](double f, const std::string& mode) {
        for (const auto& r : rows)
            if (r.factor == f && r.mode == mode) return r.mean_carbon_kg;
        return std::numeric_limits<double>::quiet_NaN();
    };
    bool ordered = true, increasing = true;
    std::ostringstream s;
    double prev_adv = -std::numeric_limits<double>::infinity();
    for (double f : factors) {
        double c = carbon_of(f, "carbon"), e = carbon_of(f, "energy"), t = carbon_of(f, "time");
        ordered = ordered && c <= e + 1e-9 && e <= t + 1e-9;
        double adv = e - c;
        increasing = increasing && adv > prev_adv;
        prev_adv = adv;
        s << fmt(" rho=%.1f C/E/T=%.1f/%.1f/%.1f adv=%.1f;", f, c, e, t, adv);
    }
    return {static_cast<int>(corpus.size()) == kCorpusSize && ordered && increasing,
            fmt("%zu instances, mean carbon kg:%s ordering %s, advantage %s, %.1fs", corpus.size(), s.str().c_str(),
                ordered ? "holds" : "broken", increasing ? "strictly increasing" : "not increasing",
                seconds_since(t0))};
}

// ---------------------------------------------------- 9: alpha trend

Verdict alpha_trend() {
    auto t0 = Clock::now();
    ScenarioSpec spec;
    spec.seed = 200;
    spec.topology = Topology::Line;
    spec.nodes = 8;
    spec.stations = 3;
    spec.max_stops = 2;
    spec.elevation_sd_m = 3000;
    spec.edge_km_min = 150;
    spec.edge_km_max = 250;
    spec.delay_factor = 1.5;
    std::vector<Instance> corpus = generate_corpus(spec, kCorpusSize);
    std::size_t regenerative = 0;
    for (const Instance& inst : corpus)
        for (const RoadSegment& seg : inst.graph.edges())
            if (min_edge_energy(seg) < 0.0) ++regenerative;
    SweepOptions opt;
    opt.engine = Engine::Oracle;
    const std::vector<double> alphas{0.0, 0.02, 0.06, 0.12};
    auto rows = sweep_alpha(corpus, alphas, opt);
    bool violations_ok = true, loss_ok = true;
    std::ostringstream s;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) {
            violations_ok = violations_ok && rows[i].violation_fraction <= rows[i - 1].violation_fraction + 1e-12;
            loss_ok = loss_ok && rows[i].mean_performance_loss >= rows[i - 1].mean_performance_loss - 1e-12;
        }
        s << fmt(" a=%.2f viol=%.2f loss=%.3f;", rows[i].alpha, rows[i].violation_fraction,
                 rows[i].mean_performance_loss);
    }
    return {static_cast<int>(corpus.size()) == kCorpusSize && violations_ok && loss_ok,
            fmt("%zu instances (%zu regenerative segments):%s violations %s, loss %s, %.1fs", corpus.size(),
                regenerative, s.str().c_str(), violations_ok ? "non-increasing" : "INCREASE",
                loss_ok ? "non-decreasing" : "DECREASE", seconds_since(t0))};
}

// ------------------------------------------------- 10: charging fidelity

// Midpoint rule with cells split at the curve knots and walked in order.
double footprint_quadrature(const ChargingStation& st, double soc, double t_c, double start, double eta) {
    const ChargeCurve& c = st.curve;
    const PiecewiseLinear& pi = st.intensity.curve();
    const double u0 = c.time_at(soc);
    const double u1 = std::min(u0 + t_c, c.full_time());
    if (u1 <= u0) return 0.0;
    std::vector<double> cuts{u0};
    for (double k : c.knots())
        if (k > u0 && k < u1) cuts.push_back(k);
    cuts.push_back(u1);
    auto xs = pi.xs();
    auto ys = pi.ys();
    std::size_t piece = 0;
    auto value = [&](double x) {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        while (piece + 1 < xs.size() && xs[piece + 1] < x) ++piece;
        double w = (x - xs[piece]) / (xs[piece + 1] - xs[piece]);
        return ys[piece] + w * (ys[piece + 1] - ys[piece]);
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const long n = std::max(1L, std::lround(kQuadratureSteps * (b - a) / (u1 - u0)));
        const double h = (b - a) / static_cast<double>(n);
        const double rate = c.rate(0.5 * (a + b));
        double sum = 0.0;
        for (long j = 0; j < n; ++j) sum += value(start + (a - u0) + (static_cast<double>(j) + 0.5) * h);
        total += sum * h * rate;
    }
    return total / eta;
}

Verdict charging_fidelity() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(1010);
    double worst = 0.0;
    int failures = 0;
    for (int d = 0; d < kFootprintDraws; ++d) {
        const double B = d % 3 == 0 ? 600.0 : 1000.0;
        ChargingStation st;
        st.curve = ChargeCurve::standard(B);
        st.intensity = random_trace(rng, 48.0);
        const double soc = uniform(rng, 0, B), tc = uniform(rng, 0.01, 1.5);
        const double start = uniform(rng, 0, 40), eta = uniform(rng, 0.85, 1.0);
        double exact = carbon_footprint(st, soc, tc, start, eta);
        double quad = footprint_quadrature(st, soc, tc, start, eta);
        double err = exact == quad ? 0.0 : std::abs(exact - quad) / std::max(std::abs(quad), 1e-300);
        worst = std::max(worst, err);
        if (err > kFootprintRelTol) ++failures;
    }
    const double B = 1000.0;
    ChargeCurve fig({0.0, 40.0, 60.0, 90.0}, {0.0, 0.67, 0.92, 1.0}, B);
    const double datum_a = soc_increment(fig, 20.0 / 60.0, 0.67 * B);
    const double datum_b = soc_increment(ChargeCurve::standard(B), 48.0 / 60.0, 0.0);
    const bool a_ok = std::abs(datum_a - 0.25 * B) <= kDatumRelTol * B;
    const bool b_ok = std::abs(datum_b - 0.80 * B) <= kDatumRelTol * B;
    return {failures == 0 && a_ok && b_ok,
            fmt("%d draws vs %ld-step quadrature, worst rel err %.2e (tol %.0e); phi(20 min, 0.67B) = %.12gB; "
                "phi(48 min, 0) = %.12gB; %.1fs",
                kFootprintDraws, kQuadratureSteps, worst, kFootprintRelTol, datum_a / B, datum_b / B,
                seconds_since(t0))};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"speed subproblem exactness", speed_exactness},
        {"charging subproblem exactness", sigma_exactness},
        {"stop selection vs enumeration", outer_correctness},
        {"weak duality and posterior bound", weak_duality},
        {"zero-residual optimality", corollary},
        {"reservation lemma", lemma},
        {"best dual monotone in K", convergence},
        {"deadline sweep trend", deadline_trend},
        {"reservation sweep trend", alpha_trend},
        {"charging model fidelity", charging_fidelity},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) {
        int k = std::atoi(argv[i]);
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "usage: %s [criterion 1-10 ...]\n", argv[0]);
            return 1;
        }
        pick.insert(k);
    }
    bool all_pass = true;
    for (int k = 1; k <= static_cast<int>(criteria.size()); ++k) {
        if (!pick.empty() && !pick.count(k)) continue;
        Verdict v;
        try {
            v = criteria[k - 1].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %2d %s: %s (%s)\n", k, v.pass ? "PASS" : "FAIL", criteria[k - 1].first,
                    v.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : 1;
}
