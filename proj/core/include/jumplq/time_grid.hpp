#pragma once

#include <cstddef>
#include <vector>

namespace jumplq {

/// Strictly increasing time knots spanning [t0, t1].
struct TimeGrid {
    std::vector<double> knots;
    double base_step = 0.0;  // uniform step the grid was built with

    static TimeGrid uniform(double t0, double t1, std::size_t n_steps);

    double t0() const { return knots.front(); }
    double t1() const { return knots.back(); }
    std::size_t n_knots() const { return knots.size(); }
    std::size_t n_steps() const { return knots.size() - 1; }

    /// Index of the interval containing t from the left: the largest i with
    /// knots[i] <= t, clamped to [0, n_steps()-1]. Throws TimeOutOfRange for
    /// t outside [t0, t1].
    std::size_t interval_of(double t) const;

    void validate() const;  // throws on non-monotone or too-short knot lists
};

}  // namespace jumplq
