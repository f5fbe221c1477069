#pragma once

#include "cfo/solver.hpp"

#include <limits>
#include <optional>
#include <random>
#include <vector>

namespace cfo::test {

struct Enumerated {
    std::vector<std::optional<std::size_t>> stops;
    double value = std::numeric_limits<double>::infinity();
};

/// Brute force over every station sequence of length 0..N followed by
/// destination pass-throughs.
inline Enumerated enumerate_outer(const OuterInput& in) {
    const std::size_t N = in.stops, S = in.stations;
    Enumerated best;
    std::vector<std::size_t> seq;
    auto score = [&]() {
        const std::size_t m = seq.size();
        double cost = in.constant;
        std::size_t src = 0;
        for (std::size_t i = 0; i < m; ++i) {
            cost += in.sp[i][src][seq[i]] + in.sigma[i][seq[i]];
            src = 1 + seq[i];
        }
        cost += in.sp[m][src][S];
        for (std::size_t i = m; i < N; ++i) cost += in.pass[i];
        if (cost < best.value) {
            best.value = cost;
            best.stops.assign(N, std::nullopt);
            for (std::size_t i = 0; i < m; ++i) best.stops[i] = seq[i];
        }
    };
    auto rec = [&](auto&& self) -> void {
        score();
        if (seq.size() == N) return;
        for (std::size_t j = 0; j < S; ++j) {
            seq.push_back(j);
            self(self);
            seq.pop_back();
        }
    };
    rec(rec);
    return best;
}

/// Random finite-or-infinite tables for the stop-selection problem.
template <class Rng>
OuterInput random_outer(Rng& rng, std::size_t stations, std::size_t stops) {
    std::uniform_real_distribution<double> w(-5.0, 20.0), u(0.0, 1.0);
    OuterInput in;
    in.stops = stops;
    in.stations = stations;
    in.constant = w(rng);
    for (std::size_t k = 0; k <= stops; ++k) {
        std::vector<std::vector<double>> table(stations + 1, std::vector<double>(stations + 1));
        for (auto& row : table)
            for (double& x : row) x = u(rng) < 0.1 ? std::numeric_limits<double>::infinity() : w(rng);
        in.sp.push_back(table);
    }
    for (std::size_t k = 0; k < stops; ++k) {
        std::vector<double> row(stations);
        for (double& x : row) x = w(rng);
        in.sigma.push_back(row);
        in.pass.push_back(w(rng));
    }
    return in;
}

} // namespace cfo::test
