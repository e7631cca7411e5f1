#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "jumplq/control_law.hpp"
#include "jumplq/problem.hpp"
#include "jumplq/riccati.hpp"
#include "jumplq/simulate.hpp"

namespace jumplq {

/// Monte-Carlo scalar estimate. stderr is the sample standard deviation
/// divided by sqrt(n_paths).
struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    double confidence_level = 0.99;
};

MCEstimate reduce_mc(const std::vector<double>& values, double confidence_level = 0.99);

struct MCOptions {
    std::size_t n_paths = 10000;
    std::uint64_t seed = 0;
    int workers = 0;  // 0 = hardware concurrency
};

int resolve_workers(int requested);

/// Runs fn(worker, path_index, row) for path_index in [0, n_paths), filling a
/// row-major n_paths x width table. Per-path results land at fixed positions
/// and every reduction happens in index order afterwards, so results are
/// bit-identical for any worker count.
using McBody = std::function<void(int worker, std::uint64_t path_index, double* row)>;
void mc_table(std::size_t n_paths, int workers, std::size_t width, const McBody& fn,
              std::vector<double>& out);

/// Cost weights pre-evaluated at the base-grid knots.
struct WeightTable {
    std::vector<Eigen::MatrixXd> Q, S, R;
};
WeightTable tabulate_weights(const WeightSet& weights, const TimeGrid& base);

/// Pathwise quadratic cost:
///   <G X(T), X(T)> + sum_i [<Q X, X> + 2 <S X, u> + <R u, u>](t_i) * dt_i
/// (left-Riemann over the path's intervals, with the state and control in
/// effect on each interval). Pathwise weight modifiers, when present, are
/// evaluated from the path's Brownian values and jump counts.
double pathwise_cost(const SamplePath& path, const WeightSet& weights,
                     const WeightTable* table = nullptr);

/// Expected-cost estimate over independent paths with per-path streams keyed
/// by (seed, path index). Deterministic for a given (seed, n_paths, grid)
/// regardless of the worker count.
MCEstimate mc_cost(const LQProblem& problem, const ControlLaw& law, const Eigen::VectorXd& xi,
                   const TimeGrid& grid, const MCOptions& opts);

/// <P(t) xi, xi> with P linearly interpolated between knots.
double value_quadratic(const RiccatiSolution& sol, double t, const Eigen::VectorXd& xi);

}  // namespace jumplq
