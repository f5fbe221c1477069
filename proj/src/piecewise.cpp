#include "cfo/piecewise.hpp"

#include "cfo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cfo {

PiecewiseLinear::PiecewiseLinear(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size())
        throw ConfigError("piecewise-linear: breakpoint arrays differ in length");
    if (xs_.empty()) throw ConfigError("piecewise-linear: no breakpoints");
    for (std::size_t k = 0; k < xs_.size(); ++k) {
        if (!std::isfinite(xs_[k]) || !std::isfinite(ys_[k]))
            throw ConfigError("piecewise-linear: non-finite breakpoint");
        if (k > 0 && !(xs_[k] > xs_[k - 1]))
            throw ConfigError("piecewise-linear: breakpoints must be strictly increasing");
    }
}

bool PiecewiseLinear::contains(double x) const {
    return x >= xs_.front() && x <= xs_.back();
}

double PiecewiseLinear::operator()(double x) const {
    if (!contains(x))
        throw DomainError("piecewise-linear: x = " + std::to_string(x) + " outside [" +
                          std::to_string(xs_.front()) + ", " + std::to_string(xs_.back()) + "]");
    return eval_clamped(x);
}

std::size_t PiecewiseLinear::piece(double x) const {
    if (xs_.size() < 2) return 0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t k = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
    return std::min(k, xs_.size() - 2);
}

double PiecewiseLinear::slope(std::size_t k) const {
    if (xs_.size() < 2) return 0.0;
    return (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
}

double PiecewiseLinear::eval_clamped(double x) const {
    if (x <= xs_.front()) return ys_.front();
    if (x >= xs_.back()) return ys_.back();
    std::size_t k = piece(x);
    double w = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
    return ys_[k] + w * (ys_[k + 1] - ys_[k]);
}

std::pair<double, double> PiecewiseLinear::range(double lo, double hi) const {
    double a = eval_clamped(lo);
    double b = eval_clamped(hi);
    double mn = std::min(a, b);
    double mx = std::max(a, b);
    auto first = std::upper_bound(xs_.begin(), xs_.end(), lo);
    for (auto it = first; it != xs_.end() && *it < hi; ++it) {
        double y = ys_[static_cast<std::size_t>(it - xs_.begin())];
        mn = std::min(mn, y);
        mx = std::max(mx, y);
    }
    return {mn, mx};
}

double PiecewiseLinear::integral(double lo, double hi) const {
    if (hi <= lo) return 0.0;
    double total = 0.0;
    double x0 = lo;
    double y0 = eval_clamped(lo);
    auto it = std::upper_bound(xs_.begin(), xs_.end(), lo);
    for (; it != xs_.end() && *it < hi; ++it) {
        double x1 = *it;
        double y1 = ys_[static_cast<std::size_t>(it - xs_.begin())];
        total += 0.5 * (y0 + y1) * (x1 - x0);
        x0 = x1;
        y0 = y1;
    }
    total += 0.5 * (y0 + eval_clamped(hi)) * (hi - x0);
    return total;
}

} // namespace cfo
