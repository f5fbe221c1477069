#include "cfo/charging.hpp"

#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cfo {

const char* to_string(ObjectiveMode mode) {
    switch (mode) {
    case ObjectiveMode::Carbon: return "carbon";
    case ObjectiveMode::Energy: return "energy";
    case ObjectiveMode::Time: return "time";
    }
    return "carbon";
}

ObjectiveMode objective_from_string(const std::string& name) {
    if (name == "carbon") return ObjectiveMode::Carbon;
    if (name == "energy") return ObjectiveMode::Energy;
    if (name == "time") return ObjectiveMode::Time;
    throw ConfigError("unknown objective '" + name + "' (expected carbon|energy|time)");
}

// ---------------------------------------------------------------- ChargeCurve

ChargeCurve::ChargeCurve(std::vector<double> minutes, std::vector<double> soc_fraction,
                         double capacity_kwh)
    : minutes_(std::move(minutes)), fraction_(std::move(soc_fraction)), capacity_(capacity_kwh) {
    if (minutes_.size() != fraction_.size() || minutes_.size() < 2)
        throw ConfigError("charge curve needs at least two (minutes, fraction) pairs");
    if (!(capacity_ > 0.0)) throw ConfigError("charge curve: capacity must be positive");
    if (minutes_.front() != 0.0 || fraction_.front() != 0.0)
        throw ConfigError("charge curve must start at (0 min, 0 SoC)");
    for (std::size_t k = 1; k < minutes_.size(); ++k) {
        if (!(minutes_[k] > minutes_[k - 1]) || !(fraction_[k] > fraction_[k - 1]))
            throw ConfigError("charge curve must be strictly increasing");
    }
    hours_.reserve(minutes_.size());
    kwh_.reserve(minutes_.size());
    for (std::size_t k = 0; k < minutes_.size(); ++k) {
        hours_.push_back(minutes_[k] / 60.0);
        kwh_.push_back(fraction_[k] * capacity_);
    }
    for (std::size_t k = 0; k + 1 < hours_.size(); ++k)
        slopes_.push_back((kwh_[k + 1] - kwh_[k]) / (hours_[k + 1] - hours_[k]));
}

ChargeCurve ChargeCurve::standard(double capacity_kwh) {
    return ChargeCurve({0.0, 48.0, 53.0, 58.0, 63.5, 75.0}, {0.0, 0.80, 0.85, 0.90, 0.95, 1.00},
                       capacity_kwh);
}

double ChargeCurve::soc_at(double t) const {
    if (t <= 0.0) return 0.0;
    if (t >= hours_.back()) return kwh_.back();
    auto it = std::upper_bound(hours_.begin(), hours_.end(), t);
    std::size_t k = static_cast<std::size_t>(it - hours_.begin()) - 1;
    return kwh_[k] + slopes_[k] * (t - hours_[k]);
}

double ChargeCurve::time_at(double soc) const {
    if (soc <= 0.0) return 0.0;
    if (soc >= kwh_.back()) return hours_.back();
    auto it = std::upper_bound(kwh_.begin(), kwh_.end(), soc);
    std::size_t k = static_cast<std::size_t>(it - kwh_.begin()) - 1;
    return hours_[k] + (soc - kwh_[k]) / slopes_[k];
}

double ChargeCurve::increment(double t_c, double soc) const {
    if (t_c <= 0.0) return 0.0;
    double v = soc_at(time_at(soc) + t_c) - soc;
    return std::max(0.0, v);
}

double ChargeCurve::rate(double u) const {
    if (u < 0.0) return slopes_.front();
    if (u >= hours_.back()) return 0.0;
    auto it = std::upper_bound(hours_.begin(), hours_.end(), u);
    return slopes_[static_cast<std::size_t>(it - hours_.begin()) - 1];
}

double ChargeCurve::rate_left(double u) const {
    if (u <= 0.0) return slopes_.front();
    if (u > hours_.back()) return 0.0;
    auto it = std::lower_bound(hours_.begin(), hours_.end(), u);
    return slopes_[static_cast<std::size_t>(it - hours_.begin()) - 1];
}

bool ChargeCurve::is_concave(double tol) const {
    for (std::size_t k = 1; k < slopes_.size(); ++k)
        if (slopes_[k] > slopes_[k - 1] * (1.0 + tol)) return false;
    return true;
}

// ------------------------------------------------------------ IntensitySignal

IntensitySignal IntensitySignal::constant(double value, double horizon_hours) {
    return IntensitySignal({0.0, horizon_hours}, {value, value});
}

IntensitySignal IntensitySignal::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open intensity trace '" + path + "'");
    std::vector<double> hours, values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double t, v;
        if (!(ss >> t)) continue;
        if (!(ss >> v))
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected two columns");
        hours.push_back(t);
        values.push_back(v);
    }
    if (hours.empty()) throw ParseError("intensity trace '" + path + "' is empty");
    try {
        return IntensitySignal(std::move(hours), std::move(values));
    } catch (const ConfigError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

bool IntensitySignal::covers(double lo, double hi) const {
    return lo >= curve_.front_x() - kTraceSlackHours && hi <= curve_.back_x() + kTraceSlackHours;
}

IntensitySignal IntensitySignal::extended_to(double horizon) const {
    if (horizon <= curve_.back_x()) return *this;
    std::vector<double> xs(curve_.xs().begin(), curve_.xs().end());
    std::vector<double> ys(curve_.ys().begin(), curve_.ys().end());
    xs.push_back(horizon);
    ys.push_back(ys.back());
    return IntensitySignal(std::move(xs), std::move(ys));
}

// ----------------------------------------------------------------- operations

double soc_increment(const ChargeCurve& curve, double t_c, double soc) {
    if (t_c < 0.0) throw DomainError("soc_increment: negative charging time");
    if (soc < 0.0 || soc > curve.full_level() * (1.0 + 1e-12))
        throw DomainError("soc_increment: SoC outside [0, B]");
    return curve.increment(t_c, std::min(soc, curve.full_level()));
}

double intensity_at(const IntensitySignal& signal, double tau) {
    if (!signal.covers(tau, tau))
        throw DomainError("intensity_at: time " + std::to_string(tau) + " h outside the trace");
    return signal.curve().eval_clamped(tau);
}

double integrate_intensity_rate(const PiecewiseLinear& pi, double offset, const ChargeCurve& curve,
                                double u0, double u1) {
    u1 = std::min(u1, curve.full_time());
    if (!(u1 > u0)) return 0.0;
    const auto knots = curve.knots();
    const auto slopes = curve.slopes();
    const auto px = pi.xs();
    // walk the merged partition of curve knots and shifted intensity knots
    auto ck = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), u0) - knots.begin());
    auto pk = static_cast<std::size_t>(std::upper_bound(px.begin(), px.end(), offset + u0) - px.begin());
    double total = 0.0;
    double u = u0;
    double y = pi.eval_clamped(offset + u0);
    while (u < u1) {
        double next = u1;
        if (ck < knots.size()) next = std::min(next, knots[ck]);
        if (pk < px.size()) next = std::min(next, px[pk] - offset);
        next = std::max(next, u);
        double ynext = pi.eval_clamped(offset + next);
        std::size_t seg = ck == 0 ? 0 : ck - 1;
        total += slopes[seg] * 0.5 * (y + ynext) * (next - u);
        if (ck < knots.size() && knots[ck] <= next) ++ck;
        if (pk < px.size() && px[pk] - offset <= next) ++pk;
        u = next;
        y = ynext;
    }
    return total;
}

double carbon_footprint(const ChargingStation& station, double soc, double t_c, double start,
                        double efficiency) {
    const ChargeCurve& curve = station.curve;
    if (t_c < 0.0) throw DomainError("carbon_footprint: negative charging time");
    if (soc < 0.0 || soc > curve.full_level() * (1.0 + 1e-12))
        throw DomainError("carbon_footprint: SoC outside [0, B]");
    if (!(efficiency > 0.0 && efficiency <= 1.0))
        throw DomainError("carbon_footprint: efficiency must lie in (0, 1]");
    if (t_c == 0.0) return 0.0;
    if (!station.intensity.covers(start, start + t_c))
        throw DomainError("carbon_footprint: charging window outside the intensity trace");
    double s0 = curve.time_at(std::min(soc, curve.full_level()));
    double f = integrate_intensity_rate(station.intensity.curve(), start - s0, curve, s0, s0 + t_c);
    return f / efficiency;
}

double stop_cost(ObjectiveMode mode, const ChargingStation& station, double soc, double t_c,
                 double t_w, double arrival, double efficiency) {
    switch (mode) {
    case ObjectiveMode::Carbon:
        return carbon_footprint(station, soc, t_c, arrival + t_w, efficiency);
    case ObjectiveMode::Energy:
        if (!(efficiency > 0.0 && efficiency <= 1.0))
            throw DomainError("stop_cost: efficiency must lie in (0, 1]");
        return soc_increment(station.curve, t_c, soc) / efficiency;
    case ObjectiveMode::Time:
        if (t_c < 0.0 || t_w < 0.0) throw DomainError("stop_cost: negative stop time");
        return t_w + t_c;
    }
    return 0.0;
}

} // namespace cfo
