#pragma once

#include "cfo/network.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace cfo {

enum class Topology { Line, Grid, RandomPlanar };
enum class IntensityFamily { Constant, Diurnal, TwoRegion };

[[nodiscard]] const char* to_string(Topology t);
[[nodiscard]] const char* to_string(IntensityFamily f);
[[nodiscard]] Topology topology_from_string(const std::string& name);
[[nodiscard]] IntensityFamily intensity_family_from_string(const std::string& name);

/// Synthetic truck. Power draw at speed r (km/h) on grade g:
///   aux + mass g0 (rolling + g) r / 3.6 + drag r^3,
/// with the grade term scaled by regen_efficiency when it is negative.
struct TruckPreset {
    double battery_kwh = 1000.0;
    double mass_t = 36.0;
    double rolling = 0.006;
    double aux_kw = 5.0;
    double drag_kw_per_kmh3 = 1.0 / 12960.0;
    double regen_efficiency = 0.6;
    double speed_min_kmh = 50.0;
    double speed_max_kmh = 100.0;
    double efficiency = 0.95;
};

struct ScenarioSpec {
    std::uint64_t seed = 1;
    Topology topology = Topology::Line;
    std::size_t nodes = 5;
    /// Fraction of non-terminal nodes that host a station; `stations`
    /// overrides it with an exact count.
    double station_density = 0.3;
    std::optional<std::size_t> stations;
    double grade_min = -0.06;
    double grade_max = 0.06;
    /// Standard deviation of node elevations (m); larger values give more
    /// steep and regenerative segments.
    double elevation_sd_m = 1000.0;
    double edge_km_min = 150.0;
    double edge_km_max = 250.0;
    IntensityFamily intensity = IntensityFamily::Diurnal;
    double intensity_value = 0.39; ///< constant family level (kg/kWh)
    double dirty_level = 1.02;     ///< two-region levels
    double clean_level = 0.0;
    std::size_t max_stops = 2;
    double reservation_ratio = 0.05;
    double wait_min_h = 0.1;
    double charge_max_h = 1.25;
    ObjectiveMode objective = ObjectiveMode::Carbon;
    /// Deadline as a multiple of the fastest completion time; 0 keeps a
    /// generous placeholder deadline and skips the feasibility solve.
    double delay_factor = 1.5;
    TruckPreset truck;
};

/// Cubic power coefficients (a0..a3) of the synthetic family for a grade.
[[nodiscard]] std::array<double, 4> power_coefficients(const TruckPreset& truck, double grade);

/// Deterministic in the scenario settings; throws ConfigError when they cannot be satisfied
/// (no stations while charging is required, unreachable destination, ...).
[[nodiscard]] Instance generate(const ScenarioSpec& spec);

/// Completion time of the TIME-mode solution.
[[nodiscard]] double fastest_completion(const Instance& instance);

/// rho * fastest completion; rho >= 1 or DomainError.
[[nodiscard]] double deadline_from_factor(const Instance& instance, double rho);
/// Same with a known fastest completion time.
[[nodiscard]] double deadline_from_factor(double fastest_h, double rho);

/// Copy with a new deadline; intensity traces are extended to cover it.
[[nodiscard]] Instance with_deadline(const Instance& instance, double deadline_h);

} // namespace cfo
