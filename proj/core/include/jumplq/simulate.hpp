#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "jumplq/control_law.hpp"
#include "jumplq/philox.hpp"
#include "jumplq/problem.hpp"
#include "jumplq/time_grid.hpp"

namespace jumplq {

struct JumpEvent {
    double time = 0.0;
    int mark_id = 0;
};

/// Exact jump times of the finite-activity measure on (t0, t1]:
/// interarrivals ~ Exponential(lambda(Z)), marks categorical with
/// probability lambda_k / lambda(Z).
std::vector<JumpEvent> sample_jump_times(const JumpMeasure& jm, double t0, double t1,
                                         PathRng& rng);

/// The control-independent randomness of one path: the base grid refined by
/// the sampled jump times, plus one Brownian increment per refined interval.
/// Jumps are knots of the refined grid, never diffused across a step.
struct PathDraw {
    std::vector<double> knots;
    std::vector<std::int32_t> jump_mark;   // per knot; -1 if not a jump
    std::vector<std::int32_t> base_knot;   // index into the base grid, -1 if inserted
    std::vector<JumpEvent> events;
    std::vector<double> dw;                // per interval
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

void draw_path_into(const JumpMeasure& jm, const TimeGrid& base, std::uint64_t seed,
                    std::uint64_t path_index, PathDraw& out);
PathDraw draw_path(const JumpMeasure& jm, const TimeGrid& base, std::uint64_t seed,
                   std::uint64_t path_index);

/// One realization of the controlled state equation.
struct SamplePath {
    std::vector<double> knots;
    std::vector<std::int32_t> jump_mark;
    std::vector<std::int32_t> base_knot;
    std::vector<JumpEvent> events;
    std::vector<double> dw;
    std::vector<Eigen::VectorXd> x;      // state at knots (post-jump at jump knots)
    std::vector<Eigen::VectorXd> x_pre;  // pre-jump state (equals x off jumps)
    std::vector<Eigen::VectorXd> u;      // control applied on each interval
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

/// Coefficients pre-evaluated at the base-grid knots (shared across paths).
/// comp_E/comp_F hold the compensator aggregates sum_k lambda_k E_k and
/// sum_k lambda_k F_k.
struct CoefficientTable {
    std::vector<Eigen::MatrixXd> A, B, C, D, comp_E, comp_F;
};

CoefficientTable tabulate_coefficients(const LQProblem& problem, const TimeGrid& base);

/// Euler scheme with compensator-corrected drift between jumps and the exact
/// pure-jump update X -> X + E X- + F u at jump knots. The control at the
/// interval left endpoint drives drift/diffusion; the jump update re-evaluates
/// the law on the pre-jump state (predictability). Throws StateBlowUp when
/// any |X| component exceeds 1e12 or turns non-finite.
void propagate(const LQProblem& problem, const CoefficientTable* table, const ControlLaw& law,
               const Eigen::VectorXd& xi, const PathDraw& draw, SamplePath& out);

/// Convenience wrapper: draw + propagate with a per-path counter RNG stream
/// keyed by (seed, path_index).
SamplePath simulate_state(const LQProblem& problem, const ControlLaw& law,
                          const Eigen::VectorXd& xi, const TimeGrid& grid, std::uint64_t seed,
                          std::uint64_t path_index = 0);

/// Brownian value W(t_i) at every knot (cumulative sum of increments).
std::vector<double> brownian_values(const SamplePath& path);
/// Number of jump events with time <= t_i, per knot.
std::vector<std::int64_t> jump_counts(const SamplePath& path);

/// Default simulation resolution: base step h = T / 2000.
inline constexpr std::size_t kDefaultSimSteps = 2000;
/// Overflow guard for simulated states.
inline constexpr double kStateGuard = 1e12;

}  // namespace jumplq
