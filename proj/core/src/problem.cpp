#include "jumplq/problem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>
#include <utility>

#include "jumplq/errors.hpp"

namespace jumplq {

namespace {

double min_eigenvalue(const Eigen::MatrixXd& sym) {
    if (sym.rows() == 1) return sym(0, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void require_shape(const TimeMatrixFn& p, Eigen::Index r, Eigen::Index c, const char* name) {
    if (!p.valid())
        throw ConfigError(std::string("coefficient/weight '") + name + "' is missing");
    if (p.rows() != r || p.cols() != c)
        throw DimensionMismatch(std::string("'") + name + "' has shape " +
                                std::to_string(p.rows()) + "x" + std::to_string(p.cols()) +
                                ", expected " + std::to_string(r) + "x" + std::to_string(c));
}

void require_finite_on(const TimeMatrixFn& p, const std::vector<double>& probes,
                       const char* name) {
    Eigen::MatrixXd value;
    for (double t : probes) {
        p.eval_into(t, value);
        if (!value.allFinite())
            throw NonFiniteCoefficient(std::string("'") + name + "' is non-finite at t=" +
                                       std::to_string(t));
    }
}

double max_relative_asymmetry(const TimeMatrixFn& p, const std::vector<double>& probes) {
    double worst = 0.0;
    Eigen::MatrixXd value;
    for (double t : probes) {
        p.eval_into(t, value);
        const double scale = 1.0 + value.norm();
        worst = std::max(worst, (value - value.transpose()).norm() / scale);
    }
    return worst;
}

std::vector<double> probe_times(double horizon) {
    constexpr std::size_t kProbes = 129;
    std::vector<double> times(kProbes);
    for (std::size_t i = 0; i < kProbes; ++i)
        times[i] = horizon * static_cast<double>(i) / static_cast<double>(kProbes - 1);
    return times;
}

}  // namespace

JumpMeasure::JumpMeasure(std::vector<JumpMark> marks) : marks_(std::move(marks)) {
    if (marks_.empty())
        throw InvalidIntensity("jump measure needs at least one mark; "
                               "model the no-jump case with zero jump coefficients");
    total_intensity_ = 0.0;
    for (const auto& mark : marks_) {
        if (!(mark.intensity > 0.0) || !std::isfinite(mark.intensity))
            throw InvalidIntensity("mark " + std::to_string(mark.id) +
                                   " has non-positive or non-finite intensity");
        total_intensity_ += mark.intensity;
    }
}

LQProblem validate_problem(LQProblem raw) {
    if (raw.n <= 0 || raw.m <= 0)
        throw DimensionMismatch("state and control dimensions must be positive");
    if (!(raw.horizon > 0.0) || !std::isfinite(raw.horizon))
        throw InvalidHorizon("horizon T must be finite and positive");
    if (!raw.jumps) throw InvalidIntensity("problem has no jump measure");

    const Eigen::Index n = raw.n, m = raw.m;
    require_shape(raw.coefficients.A, n, n, "A");
    require_shape(raw.coefficients.B, n, m, "B");
    require_shape(raw.coefficients.C, n, n, "C");
    require_shape(raw.coefficients.D, n, m, "D");
    if (raw.coefficients.E.size() != raw.jumps->size() ||
        raw.coefficients.F.size() != raw.jumps->size())
        throw DimensionMismatch("E/F must provide one matrix function per jump mark");
    for (std::size_t k = 0; k < raw.jumps->size(); ++k) {
        require_shape(raw.coefficients.E[k], n, n, "E");
        require_shape(raw.coefficients.F[k], n, m, "F");
    }
    require_shape(raw.weights.Q, n, n, "Q");
    require_shape(raw.weights.S, m, n, "S");
    require_shape(raw.weights.R, m, m, "R");
    if (raw.weights.G.rows() != n || raw.weights.G.cols() != n)
        throw DimensionMismatch("G has shape " + std::to_string(raw.weights.G.rows()) + "x" +
                                std::to_string(raw.weights.G.cols()));
    if (!raw.weights.G.allFinite()) throw NonFiniteCoefficient("G is non-finite");

    const std::vector<double> probes = probe_times(raw.horizon);
    require_finite_on(raw.coefficients.A, probes, "A");
    require_finite_on(raw.coefficients.B, probes, "B");
    require_finite_on(raw.coefficients.C, probes, "C");
    require_finite_on(raw.coefficients.D, probes, "D");
    for (std::size_t k = 0; k < raw.coefficients.E.size(); ++k) {
        require_finite_on(raw.coefficients.E[k], probes, "E");
        require_finite_on(raw.coefficients.F[k], probes, "F");
    }
    require_finite_on(raw.weights.Q, probes, "Q");
    require_finite_on(raw.weights.S, probes, "S");
    require_finite_on(raw.weights.R, probes, "R");

    // The cost only sees the symmetric part of Q, R, G.
    constexpr double kAsymmetryWarn = 1e-9;
    if (max_relative_asymmetry(raw.weights.Q, probes) > kAsymmetryWarn)
        std::cerr << "jumplq: warning: Q is noticeably asymmetric; using (Q+Q^T)/2\n";
    if (max_relative_asymmetry(raw.weights.R, probes) > kAsymmetryWarn)
        std::cerr << "jumplq: warning: R is noticeably asymmetric; using (R+R^T)/2\n";
    raw.weights.Q = raw.weights.Q.symmetrized();
    raw.weights.R = raw.weights.R.symmetrized();
    const double g_asym = (raw.weights.G - raw.weights.G.transpose()).norm() /
                          (1.0 + raw.weights.G.norm());
    if (g_asym > kAsymmetryWarn)
        std::cerr << "jumplq: warning: G is noticeably asymmetric; using (G+G^T)/2\n";
    raw.weights.G = (0.5 * (raw.weights.G + raw.weights.G.transpose())).eval();

    if (raw.weights.pathwise) {
        const auto& pw = *raw.weights.pathwise;
        if (pw.Q_dir.rows() != n || pw.Q_dir.cols() != n || pw.G_dir.rows() != n ||
            pw.G_dir.cols() != n)
            throw DimensionMismatch("pathwise weight directions must be n x n");
        if (pw.mu.horizon != raw.horizon)
            throw ConfigError("pathwise weights were built for a different horizon");
        if (pw.mu.total_intensity != raw.jumps->total_intensity())
            throw ConfigError("pathwise weights were built for a different jump intensity");
    }
    return raw;
}

StandardConditionReport standard_condition_check(const LQProblem& problem, const TimeGrid& grid) {
    StandardConditionReport report;
    const auto& w = problem.weights;
    const auto& marks = problem.jumps->marks();

    double min_q = std::numeric_limits<double>::infinity();
    double min_r = std::numeric_limits<double>::infinity();
    double max_s = 0.0;
    double min_channel = std::numeric_limits<double>::infinity();

    Eigen::MatrixXd value, channel;
    for (double t : grid.knots) {
        w.Q.eval_into(t, value);
        min_q = std::min(min_q, min_eigenvalue(value));
        w.R.eval_into(t, value);
        min_r = std::min(min_r, min_eigenvalue(value));
        w.S.eval_into(t, value);
        max_s = std::max(max_s, value.norm());

        if (problem.n == problem.m) {
            const Eigen::MatrixXd d = problem.coefficients.D(t);
            channel = d.transpose() * d;
            for (std::size_t k = 0; k < marks.size(); ++k) {
                const Eigen::MatrixXd f = problem.coefficients.F[k](t);
                channel += marks[k].intensity * f.transpose() * f;
            }
            min_channel = std::min(min_channel, min_eigenvalue(channel));
        }
    }
    const double min_g = min_eigenvalue(w.G);

    report.min_eig_Q = min_q;
    report.min_eig_G = min_g;
    report.max_norm_S = max_s;
    report.min_eig_R = min_r;

    report.convex1.applicable = true;
    report.convex1.margin = min_r;
    report.convex1.holds = (min_q >= 0.0) && (min_g >= 0.0) && (max_s == 0.0) && (min_r > 0.0);

    report.convex2.applicable = (problem.n == problem.m);
    if (report.convex2.applicable) {
        report.convex2.margin = std::min(min_g, min_channel);
        report.convex2.holds = (min_q >= 0.0) && (min_r >= 0.0) && (max_s == 0.0) &&
                               (report.convex2.margin > 0.0);
    }
    return report;
}

}  // namespace jumplq
