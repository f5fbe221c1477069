#include "cfo/io.hpp"

#include "cfo/errors.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace cfo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& need(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + ": missing key '" + key + "'");
    return *it;
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return need(obj, key, where).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    return get<T>(obj, key, where);
}

json units_block() {
    return json{{"time", "h"},
                {"distance", "km"},
                {"speed", "km/h"},
                {"power", "kW"},
                {"energy", "kWh"},
                {"intensity", "kg/kWh"},
                {"charge_curve", "minutes -> fraction of battery capacity"}};
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

Instance instance_from_json(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("instance: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("instance: top level must be an object");

    const json& params = need(doc, "params", "instance");
    Instance inst;
    InstanceParams& p = inst.params;
    const std::string pw = "params";
    p.origin = get<NodeId>(params, "origin", pw);
    p.destination = get<NodeId>(params, "destination", pw);
    p.deadline_h = get<double>(params, "deadline_h", pw);
    p.battery_kwh = get<double>(params, "battery_kwh", pw);
    p.initial_soc_kwh = get_or<double>(params, "initial_soc_kwh", p.battery_kwh, pw);
    p.max_stops = get<std::size_t>(params, "max_stops", pw);
    p.reservation_ratio = get_or<double>(params, "reservation_ratio", 0.0, pw);
    p.wait_min_h = get_or<double>(params, "wait_min_h", 0.0, pw);
    p.wait_max_h = get_or<double>(params, "wait_max_h", p.deadline_h, pw);
    p.charge_max_h = get<double>(params, "charge_max_h", pw);
    p.efficiency = get_or<double>(params, "efficiency", 1.0, pw);
    try {
        p.objective = objective_from_string(get_or<std::string>(params, "objective", "carbon", pw));
    } catch (const ConfigError& e) {
        throw ParseError(std::string("params.objective: ") + e.what());
    }

    const json& nodes = need(doc, "nodes", "instance");
    if (!nodes.is_array()) throw ParseError("instance.nodes must be an array");
    std::vector<std::string> names;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const json& n = nodes[k];
        std::string w = "nodes[" + std::to_string(k) + "]";
        if (get<std::size_t>(n, "id", w) != k) throw ParseError(w + ": ids must be 0, 1, 2, ...");
        names.push_back(get_or<std::string>(n, "name", "", w));
    }

    const json& edges = need(doc, "edges", "instance");
    if (!edges.is_array()) throw ParseError("instance.edges must be an array");
    std::vector<RoadSegment> segs;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const json& e = edges[k];
        std::string w = "edges[" + std::to_string(k) + "]";
        RoadSegment s;
        s.id = get_or<std::size_t>(e, "id", k, w);
        if (s.id != k) throw ParseError(w + ": ids must be 0, 1, 2, ...");
        s.from = get<NodeId>(e, "from", w);
        s.to = get<NodeId>(e, "to", w);
        s.length_km = get<double>(e, "length_km", w);
        s.speed_min_kmh = get<double>(e, "speed_min_kmh", w);
        s.speed_max_kmh = get<double>(e, "speed_max_kmh", w);
        auto coeffs = get<std::vector<double>>(e, "power_coeffs", w);
        if (coeffs.size() != 4) throw ParseError(w + ".power_coeffs: expected 4 numbers");
        std::copy(coeffs.begin(), coeffs.end(), s.power_coeffs.begin());
        segs.push_back(s);
    }
    try {
        inst.graph = TransportGraph(names.size(), std::move(segs));
    } catch (const std::exception& e) {
        throw ParseError(std::string("instance.edges: ") + e.what());
    }
    inst.graph.node_names = std::move(names);

    const json& stations = need(doc, "stations", "instance");
    if (!stations.is_array()) throw ParseError("instance.stations must be an array");
    for (std::size_t k = 0; k < stations.size(); ++k) {
        const json& st = stations[k];
        std::string w = "stations[" + std::to_string(k) + "]";
        ChargingStation cs;
        cs.node = get<NodeId>(st, "node", w);
        try {
            if (st.contains("charge_curve")) {
                const json& cc = st["charge_curve"];
                cs.curve = ChargeCurve(get<std::vector<double>>(cc, "minutes", w),
                                       get<std::vector<double>>(cc, "soc_fraction", w),
                                       p.battery_kwh);
            } else {
                cs.curve = ChargeCurve::standard(p.battery_kwh);
            }
            if (st.contains("intensity_file")) {
                cs.intensity_file = get<std::string>(st, "intensity_file", w);
                fs::path f(cs.intensity_file);
                if (f.is_relative()) f = fs::path(base_dir) / f;
                cs.intensity = IntensitySignal::load(f.string());
            } else {
                const json& in = need(st, "intensity", w);
                cs.intensity = IntensitySignal(get<std::vector<double>>(in, "hours", w),
                                               get<std::vector<double>>(in, "kg_per_kwh", w));
            }
        } catch (const ConfigError& e) {
            throw ParseError(w + ": " + e.what());
        }
        inst.stations.push_back(std::move(cs));
    }
    return inst;
}

std::string instance_to_json(const Instance& inst) {
    json doc;
    doc["units"] = units_block();
    json nodes = json::array();
    for (std::size_t k = 0; k < inst.graph.node_count(); ++k) {
        json n{{"id", k}};
        if (k < inst.graph.node_names.size() && !inst.graph.node_names[k].empty())
            n["name"] = inst.graph.node_names[k];
        nodes.push_back(n);
    }
    doc["nodes"] = nodes;
    json edges = json::array();
    for (const RoadSegment& s : inst.graph.edges()) {
        edges.push_back({{"id", s.id},
                         {"from", s.from},
                         {"to", s.to},
                         {"length_km", s.length_km},
                         {"speed_min_kmh", s.speed_min_kmh},
                         {"speed_max_kmh", s.speed_max_kmh},
                         {"power_coeffs", std::vector<double>(s.power_coeffs.begin(),
                                                              s.power_coeffs.end())}});
    }
    doc["edges"] = edges;
    json stations = json::array();
    for (const ChargingStation& cs : inst.stations) {
        json st{{"node", cs.node}};
        st["charge_curve"] = {
            {"minutes", std::vector<double>(cs.curve.minutes().begin(), cs.curve.minutes().end())},
            {"soc_fraction",
             std::vector<double>(cs.curve.soc_fraction().begin(), cs.curve.soc_fraction().end())}};
        if (!cs.intensity_file.empty()) {
            st["intensity_file"] = cs.intensity_file;
        } else {
            auto xs = cs.intensity.curve().xs();
            auto ys = cs.intensity.curve().ys();
            st["intensity"] = {{"hours", std::vector<double>(xs.begin(), xs.end())},
                               {"kg_per_kwh", std::vector<double>(ys.begin(), ys.end())}};
        }
        stations.push_back(st);
    }
    doc["stations"] = stations;
    const InstanceParams& p = inst.params;
    doc["params"] = {{"origin", p.origin},
                     {"destination", p.destination},
                     {"deadline_h", p.deadline_h},
                     {"battery_kwh", p.battery_kwh},
                     {"initial_soc_kwh", p.initial_soc_kwh},
                     {"max_stops", p.max_stops},
                     {"reservation_ratio", p.reservation_ratio},
                     {"wait_min_h", p.wait_min_h},
                     {"wait_max_h", p.wait_max_h},
                     {"charge_max_h", p.charge_max_h},
                     {"efficiency", p.efficiency},
                     {"objective", to_string(p.objective)}};
    return doc.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
    std::string dir = fs::path(path).parent_path().string();
    return instance_from_json(read_text_file(path), dir.empty() ? "." : dir);
}

void save_instance(const Instance& instance, const std::string& path) {
    write_text_file(path, instance_to_json(instance));
}

Plan plan_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("plan: ") + e.what());
    }
    Plan plan;
    const json& stages = need(doc, "stages", "plan");
    for (std::size_t k = 0; k < stages.size(); ++k) {
        std::string w = "stages[" + std::to_string(k) + "]";
        StagePath sp;
        sp.edges = get<std::vector<EdgeId>>(stages[k], "edges", w);
        sp.travel_times = get<std::vector<double>>(stages[k], "travel_times_h", w);
        plan.stages.push_back(std::move(sp));
    }
    const json& stops = need(doc, "stops", "plan");
    for (std::size_t k = 0; k < stops.size(); ++k) {
        std::string w = "stops[" + std::to_string(k) + "]";
        const json& s = stops[k];
        Stop st;
        st.node = get<NodeId>(s, "node", w);
        std::string kind = get<std::string>(s, "kind", w);
        if (kind == "station") st.kind = StopKind::Station;
        else if (kind == "destination") st.kind = StopKind::Destination;
        else throw ParseError(w + ".kind: expected station|destination");
        st.arrival = get<double>(s, "arrival_h", w);
        st.soc = get<double>(s, "soc_kwh", w);
        st.wait = get<double>(s, "wait_h", w);
        st.charge = get<double>(s, "charge_h", w);
        plan.stops.push_back(st);
    }
    const json& dest = need(doc, "destination", "plan");
    plan.destination_arrival = get<double>(dest, "arrival_h", "destination");
    plan.destination_soc = get<double>(dest, "soc_kwh", "destination");
    return plan;
}

std::string plan_to_json(const Plan& plan, const PlanSummary* summary) {
    json doc;
    doc["units"] = units_block();
    json stages = json::array();
    for (const StagePath& sp : plan.stages)
        stages.push_back({{"edges", sp.edges}, {"travel_times_h", sp.travel_times}});
    doc["stages"] = stages;
    json stops = json::array();
    for (const Stop& s : plan.stops) {
        stops.push_back({{"node", s.node},
                         {"kind", s.kind == StopKind::Station ? "station" : "destination"},
                         {"arrival_h", s.arrival},
                         {"soc_kwh", s.soc},
                         {"wait_h", s.wait},
                         {"charge_h", s.charge}});
    }
    doc["stops"] = stops;
    doc["destination"] = {{"arrival_h", plan.destination_arrival},
                          {"soc_kwh", plan.destination_soc}};
    if (summary) {
        doc["summary"] = {{"objective", summary->objective},
                          {"carbon_kg", summary->carbon_kg},
                          {"energy_kwh", summary->energy_kwh},
                          {"charged_kwh", summary->charged_kwh},
                          {"distance_km", summary->distance_km},
                          {"time_h", summary->time_h},
                          {"min_soc_kwh", summary->min_soc},
                          {"feasible", summary->feasible}};
    }
    return doc.dump(2) + "\n";
}

Plan load_plan(const std::string& path) { return plan_from_json(read_text_file(path)); }

void save_plan(const Plan& plan, const std::string& path, const PlanSummary* summary) {
    write_text_file(path, plan_to_json(plan, summary));
}

void write_summary_csv(std::ostream& out, const std::vector<PlanSummary>& rows) {
    out << "carbon_kg,energy_kwh,distance,time_h,feasible\n";
    std::ostringstream line;
    line.precision(17);
    for (const PlanSummary& r : rows) {
        line.str("");
        line << r.carbon_kg << ',' << r.energy_kwh << ',' << r.distance_km << ',' << r.time_h << ','
             << (r.feasible ? 1 : 0) << '\n';
        out << line.str();
    }
}

} // namespace cfo
