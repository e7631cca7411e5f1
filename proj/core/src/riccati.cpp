#include "jumplq/riccati.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "jumplq/errors.hpp"

namespace jumplq {

namespace {

inline Eigen::MatrixXd sym(const Eigen::MatrixXd& M) {
    return 0.5 * (M + M.transpose());
}

struct Workspace {
    Eigen::MatrixXd A, B, C, D, Q, S, R, Ek, Fk;
    Eigen::MatrixXd s_hat, r_hat, drift, r_inv_s;
};

// Aggregated weights; the drift pieces reuse the evaluated coefficients.
void aggregate_into(const LQProblem& prob, double t, const Eigen::MatrixXd& P, Workspace& w) {
    const auto& c = prob.coefficients;
    c.B.eval_into(t, w.B);
    c.C.eval_into(t, w.C);
    c.D.eval_into(t, w.D);
    prob.weights.S.eval_into(t, w.S);
    prob.weights.R.eval_into(t, w.R);

    w.s_hat = w.B.transpose() * P + w.D.transpose() * P * w.C + w.S;
    w.r_hat = w.R + w.D.transpose() * P * w.D;
    const auto& marks = prob.jumps->marks();
    for (std::size_t k = 0; k < marks.size(); ++k) {
        c.E[k].eval_into(t, w.Ek);
        c.F[k].eval_into(t, w.Fk);
        w.s_hat += marks[k].intensity * w.Fk.transpose() * P * w.Ek;
        w.r_hat += marks[k].intensity * w.Fk.transpose() * P * w.Fk;
    }
    w.r_hat = sym(w.r_hat);
}

// -dP/ds at (t, P); returns the min eigenvalue of R_hat through *min_eig_out.
void riccati_drift(const LQProblem& prob, double t, const Eigen::MatrixXd& P,
                   const RiccatiOptions& opts, Workspace& w, double* min_eig_out) {
    aggregate_into(prob, t, P, w);  // fills B, C, D, S, R, s_hat, r_hat
    const auto& c = prob.coefficients;
    c.A.eval_into(t, w.A);
    prob.weights.Q.eval_into(t, w.Q);

    w.drift = w.A.transpose() * P + P * w.A + w.Q + w.C.transpose() * P * w.C;
    const auto& marks = prob.jumps->marks();
    for (std::size_t k = 0; k < marks.size(); ++k) {
        c.E[k].eval_into(t, w.Ek);
        w.drift += marks[k].intensity * w.Ek.transpose() * P * w.Ek;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.r_hat);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig_out) *min_eig_out = min_eig;

    if (!opts.lyapunov_mode) {
        if (min_eig <= opts.positivity_floor)
            throw RiccatiBlowUp("aggregated control weight R_hat lost uniform positivity at t=" +
                                    std::to_string(t) + " (min eig " + std::to_string(min_eig) +
                                    ")",
                                t, min_eig);
        w.r_inv_s = es.eigenvectors() *
                    es.eigenvalues().cwiseInverse().asDiagonal() *
                    es.eigenvectors().transpose() * w.s_hat;
        w.drift -= w.s_hat.transpose() * w.r_inv_s;
    }
    w.drift = sym(w.drift);
}

Eigen::MatrixXd solve_gain(const Eigen::MatrixXd& r_hat, const Eigen::MatrixXd& s_hat,
                           double floor) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r_hat);
    if (es.eigenvalues().minCoeff() <= floor)
        return Eigen::MatrixXd::Zero(s_hat.rows(), s_hat.cols());
    return -(es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose() * s_hat);
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> aggregate_weights(const LQProblem& problem, double t,
                                                              const Eigen::MatrixXd& P) {
    if (P.rows() != problem.n || P.cols() != problem.n)
        throw DimensionMismatch("aggregate_weights: P must be n x n");
    Workspace w;
    aggregate_into(problem, t, P, w);
    if (!w.s_hat.allFinite() || !w.r_hat.allFinite())
        throw NonFiniteCoefficient("aggregated weights non-finite at t=" + std::to_string(t));
    return {w.s_hat, w.r_hat};
}

RiccatiSolution solve_riccati(const LQProblem& problem, const TimeGrid& grid,
                              const RiccatiOptions& opts) {
    grid.validate();
    const std::size_t n_knots = grid.n_knots();

    RiccatiSolution sol;
    sol.grid = grid;
    sol.p.resize(n_knots);
    sol.s_hat.resize(n_knots);
    sol.r_hat.resize(n_knots);
    sol.theta.resize(n_knots);
    sol.min_eig_r_hat_knots.resize(n_knots);
    sol.min_abs_det_multiplier_knots.resize(n_knots);

    Workspace w;
    Eigen::MatrixXd P = problem.weights.G;  // terminal anchor, bit-exact
    Eigen::MatrixXd k1, k2, k3, k4, stage;

    sol.p[n_knots - 1] = P;

    for (std::size_t idx = n_knots - 1; idx > 0; --idx) {
        const double t_hi = grid.knots[idx];
        const double t_lo = grid.knots[idx - 1];
        const double h = t_hi - t_lo;  // stepping backward by -h
        const double t_mid = 0.5 * (t_hi + t_lo);

        // dP/ds = -drift; classical RK4 with step -h, symmetrizing each stage.
        riccati_drift(problem, t_hi, P, opts, w, nullptr);
        k1 = w.drift;
        stage = sym(P + (0.5 * h) * k1);
        riccati_drift(problem, t_mid, stage, opts, w, nullptr);
        k2 = w.drift;
        stage = sym(P + (0.5 * h) * k2);
        riccati_drift(problem, t_mid, stage, opts, w, nullptr);
        k3 = w.drift;
        stage = sym(P + h * k3);
        riccati_drift(problem, t_lo, stage, opts, w, nullptr);
        k4 = w.drift;

        P = sym(P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        if (!P.allFinite() || P.norm() > opts.norm_guard)
            throw RiccatiBlowUp("Riccati solution norm exceeded the overflow guard at t=" +
                                    std::to_string(t_lo),
                                t_lo, P.norm());
        sol.p[idx - 1] = P;
    }

    // Aggregated weights, gains and positivity diagnostics at the knots.
    sol.min_eig_r_hat = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_knots; ++i) {
        const double t = grid.knots[i];
        aggregate_into(problem, t, sol.p[i], w);
        sol.s_hat[i] = w.s_hat;
        sol.r_hat[i] = w.r_hat;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w.r_hat);
        const double min_eig = es.eigenvalues().minCoeff();
        sol.min_eig_r_hat_knots[i] = min_eig;
        sol.min_eig_r_hat = std::min(sol.min_eig_r_hat, min_eig);
        if (!opts.lyapunov_mode && min_eig <= opts.positivity_floor)
            throw RiccatiBlowUp("R_hat lost uniform positivity at knot t=" + std::to_string(t),
                                t, min_eig);
        sol.theta[i] = solve_gain(w.r_hat, w.s_hat, opts.positivity_floor);
    }

    // Closed-loop jump multipliers |det(I + E + F Theta)|.
    const auto& marks = problem.jumps->marks();
    sol.jump_multiplier_min_abs_det = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd mult;
    for (std::size_t i = 0; i < n_knots; ++i) {
        const double t = grid.knots[i];
        double knot_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < marks.size(); ++k) {
            problem.coefficients.E[k].eval_into(t, w.Ek);
            problem.coefficients.F[k].eval_into(t, w.Fk);
            mult = Eigen::MatrixXd::Identity(problem.n, problem.n) + w.Ek + w.Fk * sol.theta[i];
            const double abs_det = std::abs(mult.determinant());
            knot_min = std::min(knot_min, abs_det);
            if (abs_det < sol.jump_multiplier_min_abs_det) {
                sol.jump_multiplier_min_abs_det = abs_det;
                sol.jump_multiplier_argmin_knot = i;
                sol.jump_multiplier_argmin_mark = marks[k].id;
            }
        }
        sol.min_abs_det_multiplier_knots[i] = knot_min;
    }
    return sol;
}

Eigen::MatrixXd RiccatiSolution::p_at(double t) const {
    const std::size_t i = grid.interval_of(t);
    const double lo = grid.knots[i], hi = grid.knots[i + 1];
    const double wgt = (t - lo) / (hi - lo);
    if (wgt == 0.0) return p[i];
    return (1.0 - wgt) * p[i] + wgt * p[i + 1];
}

const Eigen::MatrixXd& RiccatiSolution::theta_at(double t) const {
    if (t >= grid.knots.back()) {
        if (t > grid.knots.back())
            throw TimeOutOfRange("theta_at: t beyond the solution grid");
        return theta.back();
    }
    return theta[grid.interval_of(t)];
}

Eigen::MatrixXd RiccatiSolution::s_hat_at(double t) const {
    const std::size_t i = grid.interval_of(t);
    const double lo = grid.knots[i], hi = grid.knots[i + 1];
    const double wgt = (t - lo) / (hi - lo);
    if (wgt == 0.0) return s_hat[i];
    return (1.0 - wgt) * s_hat[i] + wgt * s_hat[i + 1];
}

Eigen::MatrixXd RiccatiSolution::r_hat_at(double t) const {
    const std::size_t i = grid.interval_of(t);
    const double lo = grid.knots[i], hi = grid.knots[i + 1];
    const double wgt = (t - lo) / (hi - lo);
    if (wgt == 0.0) return r_hat[i];
    return (1.0 - wgt) * r_hat[i] + wgt * r_hat[i + 1];
}

JumpMultiplierReport closed_loop_jump_multiplier(const LQProblem& problem,
                                                 const RiccatiSolution& sol) {
    JumpMultiplierReport report;
    report.min_abs_det = sol.jump_multiplier_min_abs_det;
    report.time = sol.grid.knots[sol.jump_multiplier_argmin_knot];
    report.mark_id = sol.jump_multiplier_argmin_mark;
    (void)problem;
    return report;
}

}  // namespace jumplq
