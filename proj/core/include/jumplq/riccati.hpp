#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <utility>
#include <vector>

#include "jumplq/problem.hpp"
#include "jumplq/time_grid.hpp"

namespace jumplq {

/// Aggregated control weights at (t, P) with zero martingale parts:
///   S_hat = B^T P + D^T P C + sum_k lambda_k F_k^T P E_k + S
///   R_hat = R + D^T P D + sum_k lambda_k F_k^T P F_k   (symmetrized)
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> aggregate_weights(const LQProblem& problem, double t,
                                                              const Eigen::MatrixXd& P);

struct RiccatiOptions {
    double positivity_floor = 1e-10;  // solve fails if min-eig R_hat dips below
    bool lyapunov_mode = false;       // drop the quadratic S_hat^T R_hat^{-1} S_hat term
    double norm_guard = 1e12;         // ||P|| overflow guard
};

/// Backward solution of
///   -dP/ds = A^T P + P A + Q + C^T P C + sum_k lambda_k E_k^T P E_k
///            - S_hat^T R_hat^{-1} S_hat,     P(T) = G,
/// on the given grid (classical RK4, symmetrized after every stage), together
/// with the aggregated weights and the feedback gain Theta = -R_hat^{-1} S_hat
/// at every knot.
struct RiccatiSolution {
    TimeGrid grid;
    std::vector<Eigen::MatrixXd> p;       // n x n, symmetric
    std::vector<Eigen::MatrixXd> s_hat;   // m x n
    std::vector<Eigen::MatrixXd> r_hat;   // m x m, symmetric
    std::vector<Eigen::MatrixXd> theta;   // m x n
    std::vector<double> min_eig_r_hat_knots;
    std::vector<double> min_abs_det_multiplier_knots;  // min over marks, per knot

    double min_eig_r_hat = 0.0;               // over all knots
    double jump_multiplier_min_abs_det = 0.0; // over (knot, mark)
    std::size_t jump_multiplier_argmin_knot = 0;
    int jump_multiplier_argmin_mark = 0;

    /// P linearly interpolated between knots.
    Eigen::MatrixXd p_at(double t) const;
    /// Theta held left-constant on each grid interval (predictability).
    const Eigen::MatrixXd& theta_at(double t) const;
    Eigen::MatrixXd s_hat_at(double t) const;  // linear interpolation
    Eigen::MatrixXd r_hat_at(double t) const;  // linear interpolation
};

RiccatiSolution solve_riccati(const LQProblem& problem, const TimeGrid& grid,
                              const RiccatiOptions& opts = {});

/// Smallest |det(I + E_k + F_k Theta)| over all knots and marks; values near
/// zero flag a singular closed-loop state flow at jumps.
struct JumpMultiplierReport {
    double min_abs_det = 0.0;
    double time = 0.0;
    int mark_id = 0;
};

JumpMultiplierReport closed_loop_jump_multiplier(const LQProblem& problem,
                                                 const RiccatiSolution& sol);

}  // namespace jumplq
