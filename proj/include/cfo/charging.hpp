#pragma once

#include "cfo/piecewise.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cfo {

using NodeId = std::size_t;
using EdgeId = std::size_t;

enum class ObjectiveMode { Carbon, Energy, Time };

[[nodiscard]] const char* to_string(ObjectiveMode mode);
/// Accepts "carbon", "energy", "time" (case-sensitive); throws ConfigError.
[[nodiscard]] ObjectiveMode objective_from_string(const std::string& name);

/// Charging function Phi: SoC reached from empty after charging for a given
/// time. Stored as the document gives it (minutes, fraction of capacity) and
/// evaluated in hours and kWh.
class ChargeCurve {
public:
    ChargeCurve() = default;
    /// Throws ConfigError unless both coordinates start at 0 and strictly
    /// increase. Concavity is checked by validate_instance, not here.
    ChargeCurve(std::vector<double> minutes, std::vector<double> soc_fraction, double capacity_kwh);

    /// Six breakpoints at 0/80/85/90/95/100 % SoC, 0 -> 80 % in 48 minutes.
    static ChargeCurve standard(double capacity_kwh);

    [[nodiscard]] std::span<const double> minutes() const { return minutes_; }
    [[nodiscard]] std::span<const double> soc_fraction() const { return fraction_; }
    [[nodiscard]] double capacity() const { return capacity_; }

    /// Breakpoints in hours / kWh.
    [[nodiscard]] std::span<const double> knots() const { return hours_; }
    [[nodiscard]] std::span<const double> levels() const { return kwh_; }
    [[nodiscard]] std::span<const double> slopes() const { return slopes_; }

    /// Time to charge from empty to the final level (hours).
    [[nodiscard]] double full_time() const { return hours_.back(); }
    [[nodiscard]] double full_level() const { return kwh_.back(); }

    /// Phi(t); saturates at the final level for t >= full_time().
    [[nodiscard]] double soc_at(double hours) const;
    /// Phi^{-1}(soc) for soc in [0, full_level()] (clamped).
    [[nodiscard]] double time_at(double soc_kwh) const;
    /// phi(t_c, beta) = Phi(Phi^{-1}(beta) + t_c) - beta, no domain checks.
    [[nodiscard]] double increment(double t_c, double soc_kwh) const;

    /// Charge rate (kW) just after curve time u; 0 once full.
    [[nodiscard]] double rate(double u) const;
    /// Charge rate just before curve time u (the left derivative).
    [[nodiscard]] double rate_left(double u) const;

    [[nodiscard]] bool is_concave(double tol = 1e-12) const;

private:
    std::vector<double> minutes_;
    std::vector<double> fraction_;
    double capacity_ = 0.0;
    std::vector<double> hours_;
    std::vector<double> kwh_;
    std::vector<double> slopes_;
};

/// Carbon intensity pi(tau) in kg/kWh over trip time in hours.
class IntensitySignal {
public:
    IntensitySignal() = default;
    explicit IntensitySignal(PiecewiseLinear curve) : curve_(std::move(curve)) {}
    IntensitySignal(std::vector<double> hours, std::vector<double> kg_per_kwh)
        : curve_(std::move(hours), std::move(kg_per_kwh)) {}

    static IntensitySignal constant(double value, double horizon_hours);

    /// Load two whitespace-separated columns (hours, kg/kWh); '#' starts a comment.
    static IntensitySignal load(const std::string& path);

    [[nodiscard]] const PiecewiseLinear& curve() const { return curve_; }
    [[nodiscard]] double start() const { return curve_.front_x(); }
    [[nodiscard]] double end() const { return curve_.back_x(); }
    [[nodiscard]] bool covers(double lo, double hi) const;

    /// A copy whose last value is held until `horizon` (no-op if already covered).
    [[nodiscard]] IntensitySignal extended_to(double horizon) const;

private:
    PiecewiseLinear curve_;
};

/// Times within this distance of a trace end are clamped onto it rather than
/// rejected.
inline constexpr double kTraceSlackHours = 1e-7;

struct ChargingStation {
    NodeId node = 0;
    ChargeCurve curve;
    IntensitySignal intensity;
    /// Non-empty when the trace was loaded from a column file.
    std::string intensity_file;
};

/// phi(t_c, beta): energy added by charging t_c hours from beta kWh.
/// Throws DomainError for beta outside [0, B] or t_c < 0.
[[nodiscard]] double soc_increment(const ChargeCurve& curve, double t_c, double soc_kwh);

/// pi(tau) by linear interpolation; throws DomainError outside the trace.
[[nodiscard]] double intensity_at(const IntensitySignal& signal, double tau);

/// Exact integral  int_{u0}^{u1} pi(offset + u) * rate(u) du  with pi held
/// constant outside its breakpoints.
[[nodiscard]] double integrate_intensity_rate(const PiecewiseLinear& pi, double offset,
                                              const ChargeCurve& curve, double u0, double u1);

/// Carbon footprint (kg) of charging t_c hours from beta kWh starting at
/// trip time `start`, divided by the charging efficiency.
[[nodiscard]] double carbon_footprint(const ChargingStation& station, double soc_kwh, double t_c,
                                      double start, double efficiency);

/// Per-stop objective contribution. Charging starts at arrival + wait.
[[nodiscard]] double stop_cost(ObjectiveMode mode, const ChargingStation& station, double soc_kwh,
                               double t_c, double t_w, double arrival, double efficiency);

} // namespace cfo
