#include "jumplq/malliavin.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "jumplq/errors.hpp"

namespace jumplq {

double gaussian_sin_square_mean(double mean, double variance) {
    if (variance <= 0.0) return std::sin(mean * mean);
    // E[exp(i X^2)] for X ~ N(mean, v) is (1-2iv)^{-1/2} exp(i mean^2/(1-2iv)).
    const std::complex<double> denom(1.0, -2.0 * variance);
    const std::complex<double> value =
        std::exp(std::complex<double>(0.0, mean * mean) / denom) / std::sqrt(denom);
    return value.imag();
}

double malliavin_mu(double t, double w_t, std::int64_t jump_count, const MuParams& params) {
    if (t < 0.0 || t > params.horizon)
        throw TimeOutOfRange("mu(t) evaluated at t=" + std::to_string(t) +
                             " outside [0, " + std::to_string(params.horizon) + "]");
    const double brownian_part =
        params.brownian_amp * gaussian_sin_square_mean(w_t, params.horizon - t);
    // P(N(T) >= 1 | F_t) = 1 - 1{N(t)=0} exp(-lambda(Z) (T-t)).
    const double none_so_far = (jump_count == 0) ? 1.0 : 0.0;
    const double jump_part =
        params.jump_amp *
        (1.0 - none_so_far * std::exp(-params.total_intensity * (params.horizon - t)));
    return brownian_part + jump_part;
}

double malliavin_eta(double w_T, std::int64_t jump_count_T, const MuParams& params) {
    return params.brownian_amp * std::sin(w_T * w_T) +
           params.jump_amp * (jump_count_T >= 1 ? 1.0 : 0.0);
}

}  // namespace jumplq
