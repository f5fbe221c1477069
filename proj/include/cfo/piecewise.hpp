#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace cfo {

/// Continuous piecewise-linear function given by breakpoints (x_k, y_k) with
/// strictly increasing x. A single breakpoint describes a constant.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys);

    [[nodiscard]] std::span<const double> xs() const { return xs_; }
    [[nodiscard]] std::span<const double> ys() const { return ys_; }
    [[nodiscard]] std::size_t size() const { return xs_.size(); }
    [[nodiscard]] bool empty() const { return xs_.empty(); }
    [[nodiscard]] double front_x() const { return xs_.front(); }
    [[nodiscard]] double back_x() const { return xs_.back(); }

    [[nodiscard]] bool contains(double x) const;

    /// Interpolated value; throws DomainError outside [front_x, back_x].
    [[nodiscard]] double operator()(double x) const;

    /// Interpolated value with the end values held outside the breakpoints.
    [[nodiscard]] double eval_clamped(double x) const;

    /// Index k of the piece [x_k, x_{k+1}) containing x, clamped to the
    /// first/last piece. For a single breakpoint returns 0.
    [[nodiscard]] std::size_t piece(double x) const;

    /// Slope of piece k (0 for a constant).
    [[nodiscard]] double slope(std::size_t k) const;

    /// Exact (min, max) of the clamped extension over [lo, hi].
    [[nodiscard]] std::pair<double, double> range(double lo, double hi) const;

    /// Exact integral of the clamped extension over [lo, hi].
    [[nodiscard]] double integral(double lo, double hi) const;

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

} // namespace cfo
