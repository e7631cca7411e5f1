#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "jumplq/control_law.hpp"
#include "jumplq/costs.hpp"
#include "jumplq/problem.hpp"
#include "jumplq/riccati.hpp"

namespace jumplq {

/// Per-path residual of the completion-of-squares identity
///   L(t0, xi; u) - <P(t0) xi, xi> - int |R_hat^{1/2} (u - Theta X_-)|^2 ds,
/// estimated with common random numbers (the same path feeds the cost and
/// the square term). The mean is zero, up to discretization, for every
/// admissible law.
struct ResidualReport {
    MCEstimate residual;
    MCEstimate square_term;
    MCEstimate cost;
    double value_term = 0.0;  // <P(t0) xi, xi>
    double worst_abs_residual = 0.0;
    std::uint64_t worst_path_index = 0;
    std::uint64_t seed = 0;
};

ResidualReport completion_of_squares_residual(const LQProblem& problem,
                                              const RiccatiSolution& sol, const ControlLaw& law,
                                              const Eigen::VectorXd& xi, const TimeGrid& grid,
                                              const MCOptions& opts);

/// J(challenger) - J(feedback) per challenger, estimated from per-path cost
/// differences on shared paths (common random numbers).
struct GapReport {
    std::string challenger;
    MCEstimate gap;
    double challenger_mean = 0.0;
    double feedback_mean = 0.0;
};

std::vector<GapReport> optimality_gap(const LQProblem& problem, const RiccatiSolution& sol,
                                      const Eigen::VectorXd& xi,
                                      const std::vector<std::pair<std::string, ControlLaw>>& challengers,
                                      const TimeGrid& grid, const MCOptions& opts);

/// Gram matrix of the cost operator on the piecewise-constant spike basis
/// e_j 1_{(t_i, t_{i+1}]} (m * n_intervals elements), assembled by
/// polarization  [N u, v] = (J(0,0;u+v) - J(0,0;u-v)) / 4  with common random
/// numbers inside each cell. epsilon_hat = min_eig / dt approximates the
/// coercivity constant of the cost per unit time; a negative value diagnoses
/// non-convexity.
struct GramReport {
    Eigen::MatrixXd gram;
    Eigen::MatrixXd gram_stderr;
    double min_eigenvalue = 0.0;
    double epsilon_hat = 0.0;
    int n_intervals = 0;
    std::size_t n_paths_per_cell = 0;
};

GramReport convexity_gram(const LQProblem& problem, int n_intervals, const TimeGrid& grid,
                          const MCOptions& opts);

struct UnifConvexReport {
    bool pass = false;
    double margin = 0.0;      // min over the grid of (smallest eigenvalue - delta)
    double worst_time = 0.0;
    double delta = 0.0;
};

/// Fundamental-matrix criterion (requires B = C = E = S = 0): integrates
/// Phi' = A Phi forward and checks
///   [lG smin(Phi(T))^2 + int_r^T lQ(s) smin(Phi(s))^2 ds] / smax(Phi(r))^2
///     * (D^T D + sum_k lambda_k F_k^T F_k) + R(r) >= delta I.
UnifConvexReport check_unifconvex_phi(const LQProblem& problem, double delta,
                                      const TimeGrid& grid);

/// Lyapunov criterion: solves the deterministic Lyapunov equation with Q
/// replaced by Q - Q0 backward from Pi(T) = G and checks
///   R + D^T Pi D + sum_k lambda_k F_k^T Pi F_k - K Q0^{-1} K^T >= delta I,
/// with K = B^T Pi + D^T Pi C + sum_k lambda_k F_k^T Pi E_k + S.
UnifConvexReport check_unifconvex_lyapunov(const LQProblem& problem, const TimeMatrixFn& Q0,
                                           double delta, const TimeGrid& grid);

}  // namespace jumplq
