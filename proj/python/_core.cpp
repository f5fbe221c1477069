#include "cfo/errors.hpp"
#include "cfo/experiments.hpp"
#include "cfo/io.hpp"
#include "cfo/oracle.hpp"
#include "cfo/scenario.hpp"
#include "cfo/solver.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cfo;

namespace {

py::dict summary_dict(const PlanSummary& s) {
    py::dict d;
    d["objective"] = s.objective;
    d["carbon_kg"] = s.carbon_kg;
    d["energy_kwh"] = s.energy_kwh;
    d["charged_kwh"] = s.charged_kwh;
    d["distance_km"] = s.distance_km;
    d["time_h"] = s.time_h;
    d["min_soc"] = s.min_soc;
    d["max_residual"] = s.max_residual;
    d["feasible"] = s.feasible;
    d["violation"] = s.violation;
    return d;
}

std::optional<ObjectiveMode> mode_of(const std::optional<std::string>& name) {
    if (!name) return std::nullopt;
    return objective_from_string(*name);
}

py::dict solve(const Instance& inst, std::optional<std::string> objective, std::size_t iterations,
               double step, bool strict_soc, double eps, bool polyak,
               std::function<void(std::size_t, double, double)> callback) {
    SolverOptions o;
    o.iterations = iterations;
    o.step = step;
    o.strict_soc = strict_soc;
    o.bnb.epsilon = eps;
    o.polyak = polyak;
    o.objective = mode_of(objective);
    o.keep_log = true;
    if (callback)
        o.on_iteration = [&](const IterationRecord& r) { callback(r.k, r.dual, r.max_residual); };
    SolverReport rep;
    {
        py::gil_scoped_release release;
        rep = run(inst, o);
    }
    py::dict d;
    d["termination"] = to_string(rep.termination);
    d["iterations"] = rep.iterations;
    d["best_dual"] = rep.best_dual;
    d["gap"] = rep.gap;
    d["plan"] = rep.plan ? py::object(py::str(plan_to_json(*rep.plan))) : py::none();
    d["summary"] = rep.summary ? py::object(summary_dict(*rep.summary)) : py::none();
    py::list duals;
    for (const auto& r : rep.log) duals.append(r.dual);
    d["duals"] = duals;
    return d;
}

py::dict oracle(const Instance& inst, std::optional<std::string> objective, std::size_t time_points,
                std::size_t charge_points, std::size_t wait_points, bool strict_soc) {
    OracleConfig c;
    c.mode = mode_of(objective);
    c.time_points = time_points;
    c.charge_points = charge_points;
    c.wait_points = wait_points;
    c.strict_soc = strict_soc;
    OracleResult r;
    {
        py::gil_scoped_release release;
        r = enumerate_optimal(inst, c);
    }
    py::dict d;
    d["feasible"] = r.feasible;
    d["objective"] = r.objective;
    d["error_bound"] = r.error_bound;
    d["evaluated"] = r.evaluated;
    d["plan"] = r.feasible ? py::object(py::str(plan_to_json(r.plan))) : py::none();
    d["summary"] = r.feasible ? py::object(summary_dict(r.summary)) : py::none();
    return d;
}

Instance make(std::uint64_t seed, const std::string& topology, std::size_t nodes,
              std::optional<std::size_t> stations, const std::string& intensity, std::size_t max_stops,
              double alpha, double delay_factor, double edge_km_min, double edge_km_max,
              double elevation_sd_m, const std::string& objective) {
    ScenarioSpec s;
    s.seed = seed;
    s.topology = topology_from_string(topology);
    s.nodes = nodes;
    s.stations = stations;
    s.intensity = intensity_family_from_string(intensity);
    s.max_stops = max_stops;
    s.reservation_ratio = alpha;
    s.delay_factor = delay_factor;
    s.edge_km_min = edge_km_min;
    s.edge_km_max = edge_km_max;
    s.elevation_sd_m = elevation_sd_m;
    s.objective = objective_from_string(objective);
    return generate(s);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Carbon-aware route, speed and charging planner";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<OracleRefusal>(m, "OracleRefusal", PyExc_RuntimeError);

    py::class_<Instance>(m, "Instance")
        .def_property_readonly("node_count", [](const Instance& i) { return i.graph.node_count(); })
        .def_property_readonly("edge_count", [](const Instance& i) { return i.graph.edge_count(); })
        .def_property_readonly("station_nodes",
                               [](const Instance& i) {
                                   std::vector<NodeId> v;
                                   for (const auto& s : i.stations) v.push_back(s.node);
                                   return v;
                               })
        .def_property(
            "deadline_h", [](const Instance& i) { return i.params.deadline_h; },
            [](Instance& i, double t) { i = with_deadline(i, t); })
        .def_property(
            "reservation_ratio", [](const Instance& i) { return i.params.reservation_ratio; },
            [](Instance& i, double a) { i.params.reservation_ratio = a; })
        .def_property_readonly("max_stops", [](const Instance& i) { return i.params.max_stops; })
        .def("to_json", &instance_to_json)
        .def("validate", [](const Instance& i) { return validate_instance(i).violations; });

    m.def("load_instance", &load_instance, py::arg("path"));
    m.def("instance_from_json", &instance_from_json, py::arg("text"), py::arg("base_dir") = ".");
    m.def("generate", &make, py::arg("seed") = 1, py::arg("topology") = "line", py::arg("nodes") = 5,
          py::arg("stations") = py::none(), py::arg("intensity") = "diurnal", py::arg("max_stops") = 2,
          py::arg("alpha") = 0.05, py::arg("delay_factor") = 1.5, py::arg("edge_km_min") = 150.0,
          py::arg("edge_km_max") = 250.0, py::arg("elevation_sd_m") = 1000.0,
          py::arg("objective") = "carbon");
    m.def("solve", &solve, py::arg("instance"), py::arg("objective") = py::none(),
          py::arg("iterations") = 200, py::arg("step") = 1.0, py::arg("strict_soc") = false,
          py::arg("eps") = 1e-3, py::arg("polyak") = false, py::arg("callback") = nullptr);
    m.def("oracle", &oracle, py::arg("instance"), py::arg("objective") = py::none(),
          py::arg("time_points") = 9, py::arg("charge_points") = 9, py::arg("wait_points") = 5,
          py::arg("strict_soc") = true);
    m.def(
        "evaluate",
        [](const std::string& plan_json, const Instance& inst, std::optional<std::string> objective,
           bool strict_soc) {
            Plan p = plan_from_json(plan_json);
            ObjectiveMode mode = mode_of(objective).value_or(inst.params.objective);
            return summary_dict(evaluate(p, inst, mode, {1e-6, strict_soc}));
        },
        py::arg("plan"), py::arg("instance"), py::arg("objective") = py::none(),
        py::arg("strict_soc") = false);
    m.def("fastest_completion", &fastest_completion, py::arg("instance"));
}
