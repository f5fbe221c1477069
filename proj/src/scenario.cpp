#include "cfo/scenario.hpp"

#include "cfo/energy.hpp"
#include "cfo/errors.hpp"
#include "cfo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace cfo {

const char* to_string(Topology t) {
    switch (t) {
    case Topology::Line: return "line";
    case Topology::Grid: return "grid";
    case Topology::RandomPlanar: return "random-planar";
    }
    return "line";
}

const char* to_string(IntensityFamily f) {
    switch (f) {
    case IntensityFamily::Constant: return "constant";
    case IntensityFamily::Diurnal: return "diurnal";
    case IntensityFamily::TwoRegion: return "two-region";
    }
    return "constant";
}

Topology topology_from_string(const std::string& name) {
    if (name == "line") return Topology::Line;
    if (name == "grid") return Topology::Grid;
    if (name == "random-planar" || name == "planar") return Topology::RandomPlanar;
    throw ConfigError("unknown topology '" + name + "' (expected line|grid|random-planar)");
}

IntensityFamily intensity_family_from_string(const std::string& name) {
    if (name == "constant") return IntensityFamily::Constant;
    if (name == "diurnal") return IntensityFamily::Diurnal;
    if (name == "two-region") return IntensityFamily::TwoRegion;
    throw ConfigError("unknown intensity family '" + name + "' (expected constant|diurnal|two-region)");
}

std::array<double, 4> power_coefficients(const TruckPreset& truck, double grade) {
    // kW per (km/h) of climbing plus rolling force
    double force = truck.mass_t * 9.81 / 3.6 * (truck.rolling + grade);
    if (force < 0.0) force *= truck.regen_efficiency;
    return {truck.aux_kw, force, 0.0, truck.drag_kw_per_kmh3};
}

namespace {

// The distributions of <random> are implementation-defined; these are not,
// so a seed gives the same instance everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) {
        return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
    }
    double normal() {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

struct Point {
    double x = 0.0, y = 0.0;
};

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct Layout {
    std::vector<Point> pos;
    std::vector<std::pair<NodeId, NodeId>> links; // undirected
    std::vector<double> length;                   // per link, km
};

Layout line_layout(const ScenarioSpec& spec, Rng& rng) {
    Layout L;
    double x = 0.0;
    for (std::size_t i = 0; i < spec.nodes; ++i) {
        if (i > 0) {
            double d = rng.uniform(spec.edge_km_min, spec.edge_km_max);
            x += d;
            L.links.push_back({i - 1, i});
            L.length.push_back(d);
        }
        L.pos.push_back({x, 0.0});
    }
    return L;
}

Layout grid_layout(const ScenarioSpec& spec, Rng& rng) {
    Layout L;
    const std::size_t n = spec.nodes;
    std::size_t cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    double spacing = 0.5 * (spec.edge_km_min + spec.edge_km_max);
    double jitter = 0.2 * (spec.edge_km_max - spec.edge_km_min);
    for (std::size_t i = 0; i < n; ++i) {
        double r = static_cast<double>(i / cols), c = static_cast<double>(i % cols);
        L.pos.push_back({c * spacing + rng.uniform(-jitter, jitter),
                         r * spacing + rng.uniform(-jitter, jitter)});
    }
    for (std::size_t i = 0; i < n; ++i) {
        if ((i % cols) + 1 < cols && i + 1 < n) L.links.push_back({i, i + 1});
        if (i + cols < n) L.links.push_back({i, i + cols});
    }
    for (auto [a, b] : L.links) L.length.push_back(distance(L.pos[a], L.pos[b]));
    return L;
}

// Gabriel graph of uniform points: planar and connected.
Layout planar_layout(const ScenarioSpec& spec, Rng& rng) {
    Layout L;
    const std::size_t n = spec.nodes;
    double side = 0.5 * (spec.edge_km_min + spec.edge_km_max) * std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) L.pos.push_back({rng.uniform(0, side), rng.uniform(0, side)});
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            Point m{0.5 * (L.pos[a].x + L.pos[b].x), 0.5 * (L.pos[a].y + L.pos[b].y)};
            double r = 0.5 * distance(L.pos[a], L.pos[b]);
            bool empty = true;
            for (std::size_t c = 0; c < n && empty; ++c)
                if (c != a && c != b && distance(m, L.pos[c]) < r) empty = false;
            if (empty) {
                L.links.push_back({a, b});
                L.length.push_back(std::max(1.0, distance(L.pos[a], L.pos[b])));
            }
        }
    return L;
}

IntensitySignal diurnal_signal(Rng& rng, double horizon) {
    double base = rng.uniform(0.2, 0.8);
    double amp = rng.uniform(0.3, 0.6);
    double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> hours, values;
    for (double t = 0.0; t <= horizon + 1e-9; t += 1.0) {
        hours.push_back(t);
        values.push_back(base * (1.0 + amp * std::sin(2.0 * std::numbers::pi * t / 24.0 + phase)));
    }
    return IntensitySignal(std::move(hours), std::move(values));
}

double provisional_deadline(const Instance& inst) {
    // slowest traversal of the fewest-hop path, plus every stop at its longest
    double total = 0.0;
    for (const RoadSegment& seg : inst.graph.edges()) total = std::max(total, inst.graph.bounds(seg.id).upper);
    total *= static_cast<double>(inst.graph.node_count());
    const InstanceParams& p = inst.params;
    return total + static_cast<double>(p.max_stops) * (p.wait_min_h + p.charge_max_h);
}

} // namespace

Instance with_deadline(const Instance& instance, double deadline_h) {
    if (!(deadline_h > 0.0)) throw DomainError("deadline must be positive");
    Instance out = instance;
    if (instance.params.wait_max_h >= instance.params.deadline_h)
        out.params.wait_max_h = deadline_h;
    out.params.deadline_h = deadline_h;
    for (ChargingStation& st : out.stations) st.intensity = st.intensity.extended_to(deadline_h);
    return out;
}

Instance generate(const ScenarioSpec& spec) {
    if (spec.nodes < 2) throw ConfigError("scenario: need at least two nodes");
    if (!(spec.edge_km_min > 0.0) || spec.edge_km_max < spec.edge_km_min)
        throw ConfigError("scenario: bad edge length range");
    if (spec.grade_min > spec.grade_max) throw ConfigError("scenario: bad grade range");
    Rng rng(spec.seed);

    Layout L;
    switch (spec.topology) {
    case Topology::Line: L = line_layout(spec, rng); break;
    case Topology::Grid: L = grid_layout(spec, rng); break;
    case Topology::RandomPlanar: L = planar_layout(spec, rng); break;
    }
    const std::size_t n = spec.nodes;
    std::vector<double> elevation(n);
    for (double& z : elevation) z = spec.elevation_sd_m * rng.normal();

    std::vector<RoadSegment> edges;
    for (std::size_t i = 0; i < L.links.size(); ++i) {
        auto [a, b] = L.links[i];
        for (auto [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
            RoadSegment seg;
            seg.from = u;
            seg.to = v;
            seg.length_km = L.length[i];
            seg.speed_min_kmh = spec.truck.speed_min_kmh;
            seg.speed_max_kmh = spec.truck.speed_max_kmh;
            double grade = (elevation[v] - elevation[u]) / (1000.0 * seg.length_km);
            grade = std::clamp(grade, spec.grade_min, spec.grade_max);
            seg.power_coeffs = power_coefficients(spec.truck, grade);
            edges.push_back(seg);
        }
    }

    Instance inst;
    inst.graph = TransportGraph(n, std::move(edges));
    for (std::size_t i = 0; i < n; ++i) inst.graph.node_names.push_back("n" + std::to_string(i));

    NodeId origin = 0, dest = n - 1;
    if (spec.topology == Topology::RandomPlanar) {
        double best = -1.0;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (double d = distance(L.pos[a], L.pos[b]); d > best) {
                    best = d;
                    origin = a;
                    dest = b;
                }
    }

    InstanceParams& p = inst.params;
    p.origin = origin;
    p.destination = dest;
    p.battery_kwh = spec.truck.battery_kwh;
    p.initial_soc_kwh = spec.truck.battery_kwh;
    p.max_stops = spec.max_stops;
    p.reservation_ratio = spec.reservation_ratio;
    p.wait_min_h = spec.wait_min_h;
    p.charge_max_h = spec.charge_max_h;
    p.efficiency = spec.truck.efficiency;
    p.objective = spec.objective;
    p.deadline_h = provisional_deadline(inst);
    p.wait_max_h = p.deadline_h;

    std::vector<NodeId> pool;
    for (NodeId v = 0; v < n; ++v)
        if (v != origin && v != dest) pool.push_back(v);
    std::size_t count = spec.stations.value_or(static_cast<std::size_t>(
        std::lround(spec.station_density * static_cast<double>(pool.size()))));
    count = std::min(count, pool.size());
    if (count == 0 && spec.max_stops > 0 && spec.station_density > 0.0 && !pool.empty()) count = 1;
    // partial Fisher-Yates
    for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
    std::vector<NodeId> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count));
    std::sort(chosen.begin(), chosen.end());

    double horizon = std::ceil(p.deadline_h) + 24.0;
    std::vector<NodeId> by_x = chosen;
    std::sort(by_x.begin(), by_x.end(), [&](NodeId a, NodeId b) {
        return L.pos[a].x != L.pos[b].x ? L.pos[a].x < L.pos[b].x : a < b;
    });
    bool west_dirty = rng.uniform() < 0.5;
    for (NodeId v : chosen) {
        ChargingStation st;
        st.node = v;
        st.curve = ChargeCurve::standard(p.battery_kwh);
        switch (spec.intensity) {
        case IntensityFamily::Constant:
            st.intensity = IntensitySignal::constant(spec.intensity_value, horizon);
            break;
        case IntensityFamily::Diurnal:
            st.intensity = diurnal_signal(rng, horizon);
            break;
        case IntensityFamily::TwoRegion: {
            auto rank = static_cast<std::size_t>(std::find(by_x.begin(), by_x.end(), v) - by_x.begin());
            bool west = 2 * rank < by_x.size();
            bool dirty = west == west_dirty;
            st.intensity =
                IntensitySignal::constant(dirty ? spec.dirty_level : spec.clean_level, horizon);
            break;
        }
        }
        inst.stations.push_back(std::move(st));
    }

    ValidationReport rep = validate_instance(inst);
    if (!rep.ok()) throw ConfigError("scenario: generated instance invalid: " + rep.violations.front());

    if (spec.delay_factor <= 0.0) return inst;
    double fastest = 0.0;
    try {
        fastest = fastest_completion(inst);
    } catch (const SolverError& e) {
        throw ConfigError(std::string("scenario: unsatisfiable spec: ") + e.what());
    }
    return with_deadline(inst, deadline_from_factor(fastest, spec.delay_factor));
}

double fastest_completion(const Instance& instance) {
    SolverOptions opt;
    opt.objective = ObjectiveMode::Time;
    opt.iterations = 60;
    opt.keep_log = false;
    SolverReport rep = run(instance, opt);
    if (!rep.summary) throw SolverError("no feasible plan within the deadline");
    return rep.summary->time_h;
}

double deadline_from_factor(double fastest_h, double rho) {
    if (!(rho >= 1.0)) throw DomainError("delay factor must be at least 1");
    if (!(fastest_h > 0.0)) throw DomainError("fastest completion time must be positive");
    return rho * fastest_h;
}

double deadline_from_factor(const Instance& instance, double rho) {
    if (!(rho >= 1.0)) throw DomainError("delay factor must be at least 1");
    return deadline_from_factor(fastest_completion(instance), rho);
}

} // namespace cfo
