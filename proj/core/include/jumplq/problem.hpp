#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

#include "jumplq/malliavin.hpp"
#include "jumplq/providers.hpp"
#include "jumplq/time_grid.hpp"

namespace jumplq {

struct JumpMark {
    int id = 0;
    double intensity = 0.0;  // lambda_k, in 1/time units
};

/// Finite jump measure: finitely many marks, each with a positive intensity.
/// The no-jump case is modeled by zero jump coefficients, not by an empty
/// mark list.
class JumpMeasure {
public:
    explicit JumpMeasure(std::vector<JumpMark> marks);

    const std::vector<JumpMark>& marks() const { return marks_; }
    std::size_t size() const { return marks_.size(); }
    double total_intensity() const { return total_intensity_; }

private:
    std::vector<JumpMark> marks_;
    double total_intensity_ = 0.0;
};

/// State-equation coefficients
///   dX = (A X + B u) ds + (C X + D u) dW + sum_k (E_k X- + F_k u) dN~_k.
/// E and F hold one provider per jump mark, in mark order.
struct CoefficientSet {
    TimeMatrixFn A;  // n x n
    TimeMatrixFn B;  // n x m
    TimeMatrixFn C;  // n x n
    TimeMatrixFn D;  // n x m
    std::vector<TimeMatrixFn> E;  // n x n, per mark
    std::vector<TimeMatrixFn> F;  // n x m, per mark
};

/// Optional path-dependent additions to the weights:
///   Q(s, omega) = Q(s) + q_coeff * mu(s) * Q_dir
///   G(omega)    = G + eta * G_dir
/// where mu is the conditional-expectation process of MuParams' eta.
struct PathFunctionalWeights {
    Eigen::MatrixXd Q_dir;  // n x n, symmetric
    Eigen::MatrixXd G_dir;  // n x n, symmetric
    double q_coeff = 1.0;
    MuParams mu;
};

/// Cost weights: <G X(T), X(T)> + int <Q X, X> + 2 <S X, u> + <R u, u> ds.
/// No definiteness is assumed anywhere.
struct WeightSet {
    TimeMatrixFn Q;  // n x n, symmetric
    TimeMatrixFn S;  // m x n
    TimeMatrixFn R;  // m x m, symmetric
    Eigen::MatrixXd G;  // n x n, symmetric
    std::shared_ptr<const PathFunctionalWeights> pathwise;  // usually null
};

/// The full problem datum. Immutable after validation; safe to share across
/// threads.
struct LQProblem {
    int n = 0;          // state dimension
    int m = 0;          // control dimension
    double horizon = 0; // T > 0
    std::shared_ptr<const JumpMeasure> jumps;
    CoefficientSet coefficients;
    WeightSet weights;
};

/// Checks dimensions, horizon, intensities and finiteness of every provider
/// on a probe grid; symmetrizes Q, R, G (warning on stderr if the asymmetry
/// exceeds 1e-9 in relative norm). Returns the checked problem.
LQProblem validate_problem(LQProblem raw);

/// Report of the classical sufficient conditions on the weight data.
struct StandardConditionReport {
    struct Branch {
        bool applicable = true;
        bool holds = false;
        double margin = 0.0;
    };
    Branch convex1;  // Q >= 0, G >= 0, S = 0, R >= margin * I
    Branch convex2;  // Q, R >= 0, S = 0, G >= margin*I and D^T D + sum_k lambda_k F^T F >= margin*I
    double min_eig_Q = 0.0;
    double min_eig_G = 0.0;
    double max_norm_S = 0.0;
    double min_eig_R = 0.0;
};

StandardConditionReport standard_condition_check(const LQProblem& problem, const TimeGrid& grid);

}  // namespace jumplq
