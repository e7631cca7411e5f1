#include "jumplq/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jumplq/errors.hpp"

namespace jumplq {

TimeGrid TimeGrid::uniform(double t0, double t1, std::size_t n_steps) {
    if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
        throw InvalidHorizon("time grid requires finite t1 > t0");
    if (n_steps == 0) throw InvalidHorizon("time grid requires at least one step");
    TimeGrid grid;
    grid.base_step = (t1 - t0) / static_cast<double>(n_steps);
    grid.knots.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i)
        grid.knots[i] = t0 + grid.base_step * static_cast<double>(i);
    grid.knots.back() = t1;  // avoid accumulated rounding at the endpoint
    return grid;
}

std::size_t TimeGrid::interval_of(double t) const {
    if (t < knots.front() || t > knots.back())
        throw TimeOutOfRange("time " + std::to_string(t) + " outside [" +
                             std::to_string(knots.front()) + ", " +
                             std::to_string(knots.back()) + "]");
    const auto it = std::upper_bound(knots.begin(), knots.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - knots.begin());
    if (idx == 0) return 0;
    return std::min(idx - 1, knots.size() - 2);
}

void TimeGrid::validate() const {
    if (knots.size() < 2) throw InvalidHorizon("time grid needs at least two knots");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1]))
            throw InvalidHorizon("time grid knots must be strictly increasing");
        if (!std::isfinite(knots[i]))
            throw InvalidHorizon("time grid knots must be finite");
    }
}

}  // namespace jumplq
