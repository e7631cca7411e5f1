#pragma once

#include <cstdint>

namespace jumplq {

/// Parameters of the terminal functional
///   eta = brownian_amp * sin(W(T)^2) + jump_amp * 1{N(T) >= 1}
/// whose conditional expectation mu(t) = E[eta | F_t] drives the built-in
/// pathwise weight example. |eta| <= brownian_amp + jump_amp.
struct MuParams {
    double brownian_amp = 1.0 / 16.0;
    double jump_amp = 1.0 / 8.0;
    double horizon = 1.0;          // T
    double total_intensity = 1.0;  // lambda(Z)
};

/// E[sin(X^2)] for X ~ Normal(mean, variance), in closed form:
/// Im[(1 - 2 i v)^{-1/2} exp(i mean^2 / (1 - 2 i v))] with v = variance.
double gaussian_sin_square_mean(double mean, double variance);

/// mu(t) = E[eta | F_t] given the Brownian value W(t) and the number of
/// Poisson events in (0, t]. Throws TimeOutOfRange for t outside [0, T].
double malliavin_mu(double t, double w_t, std::int64_t jump_count, const MuParams& params);

/// eta evaluated from the terminal path data; equals mu(T).
double malliavin_eta(double w_T, std::int64_t jump_count_T, const MuParams& params);

}  // namespace jumplq
