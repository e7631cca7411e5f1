#include "jumplq/verify.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <string>

#include "jumplq/errors.hpp"
#include "jumplq/philox.hpp"

namespace jumplq {

namespace {

// Theta (left-constant) and R_hat (linear) from the Riccati solution,
// pre-evaluated at the simulation base knots.
struct SquareTermTable {
    std::vector<Eigen::MatrixXd> theta;
    std::vector<Eigen::MatrixXd> r_hat;
};

SquareTermTable tabulate_square_term(const RiccatiSolution& sol, const TimeGrid& grid) {
    SquareTermTable table;
    table.theta.reserve(grid.n_knots());
    table.r_hat.reserve(grid.n_knots());
    for (double t : grid.knots) {
        table.theta.push_back(sol.theta_at(t));
        table.r_hat.push_back(sol.r_hat_at(t));
    }
    return table;
}

// int |R_hat^{1/2}(u - Theta x)|^2 ds over the path, left-Riemann, with the
// same interval convention as pathwise_cost.
double square_term(const SamplePath& path, const RiccatiSolution& sol,
                   const SquareTermTable& table, Eigen::VectorXd& w, Eigen::VectorXd& tmp) {
    double total = 0.0;
    Eigen::MatrixXd theta_scratch, rhat_scratch;
    for (std::size_t i = 0; i + 1 < path.knots.size(); ++i) {
        const double t = path.knots[i];
        const double dt = path.knots[i + 1] - path.knots[i];
        const std::int32_t bi = path.base_knot[i];
        const Eigen::MatrixXd* theta;
        const Eigen::MatrixXd* r_hat;
        if (bi >= 0) {
            theta = &table.theta[bi];
            r_hat = &table.r_hat[bi];
        } else {
            theta_scratch = sol.theta_at(t);
            rhat_scratch = sol.r_hat_at(t);
            theta = &theta_scratch;
            r_hat = &rhat_scratch;
        }
        w = path.u[i];
        w.noalias() -= (*theta) * path.x[i];
        tmp.noalias() = (*r_hat) * w;
        total += w.dot(tmp) * dt;
    }
    return total;
}

}  // namespace

ResidualReport completion_of_squares_residual(const LQProblem& problem,
                                              const RiccatiSolution& sol, const ControlLaw& law,
                                              const Eigen::VectorXd& xi, const TimeGrid& grid,
                                              const MCOptions& opts) {
    const CoefficientTable coeff_table = tabulate_coefficients(problem, grid);
    const WeightTable weight_table = tabulate_weights(problem.weights, grid);
    const SquareTermTable sq_table = tabulate_square_term(sol, grid);
    const double value_term = xi.dot(sol.p_at(grid.t0()) * xi);

    struct Workspace {
        PathDraw draw;
        SamplePath path;
        Eigen::VectorXd w, tmp;
    };
    std::vector<Workspace> workspaces(resolve_workers(opts.workers));

    std::vector<double> rows;
    mc_table(
        opts.n_paths, opts.workers, 3,
        [&](int worker, std::uint64_t index, double* row) {
            Workspace& ws = workspaces[worker];
            draw_path_into(*problem.jumps, grid, opts.seed, index, ws.draw);
            propagate(problem, &coeff_table, law, xi, ws.draw, ws.path);
            const double cost = pathwise_cost(ws.path, problem.weights, &weight_table);
            const double square = square_term(ws.path, sol, sq_table, ws.w, ws.tmp);
            row[0] = cost;
            row[1] = square;
            row[2] = cost - value_term - square;
        },
        rows);

    std::vector<double> cost_col(opts.n_paths), square_col(opts.n_paths), res_col(opts.n_paths);
    for (std::size_t i = 0; i < opts.n_paths; ++i) {
        cost_col[i] = rows[3 * i];
        square_col[i] = rows[3 * i + 1];
        res_col[i] = rows[3 * i + 2];
    }

    ResidualReport report;
    report.cost = reduce_mc(cost_col);
    report.square_term = reduce_mc(square_col);
    report.residual = reduce_mc(res_col);
    report.value_term = value_term;
    report.seed = opts.seed;
    for (std::size_t i = 0; i < opts.n_paths; ++i) {
        if (std::abs(res_col[i]) > report.worst_abs_residual) {
            report.worst_abs_residual = std::abs(res_col[i]);
            report.worst_path_index = i;
        }
    }
    return report;
}

std::vector<GapReport> optimality_gap(const LQProblem& problem, const RiccatiSolution& sol,
                                      const Eigen::VectorXd& xi,
                                      const std::vector<std::pair<std::string, ControlLaw>>& challengers,
                                      const TimeGrid& grid, const MCOptions& opts) {
    const CoefficientTable coeff_table = tabulate_coefficients(problem, grid);
    const WeightTable weight_table = tabulate_weights(problem.weights, grid);
    const ControlLaw feedback =
        ControlLaw::feedback(std::make_shared<const RiccatiSolution>(sol));

    struct Workspace {
        PathDraw draw;
        SamplePath path;
    };

    std::vector<GapReport> reports;
    for (const auto& [name, challenger] : challengers) {
        std::vector<Workspace> workspaces(resolve_workers(opts.workers));
        std::vector<double> rows;
        mc_table(
            opts.n_paths, opts.workers, 2,
            [&](int worker, std::uint64_t index, double* row) {
                Workspace& ws = workspaces[worker];
                draw_path_into(*problem.jumps, grid, opts.seed, index, ws.draw);
                propagate(problem, &coeff_table, challenger, xi, ws.draw, ws.path);
                row[0] = pathwise_cost(ws.path, problem.weights, &weight_table);
                propagate(problem, &coeff_table, feedback, xi, ws.draw, ws.path);
                row[1] = pathwise_cost(ws.path, problem.weights, &weight_table);
            },
            rows);
        std::vector<double> diffs(opts.n_paths);
        double challenger_sum = 0.0, feedback_sum = 0.0;
        for (std::size_t i = 0; i < opts.n_paths; ++i) {
            challenger_sum += rows[2 * i];
            feedback_sum += rows[2 * i + 1];
            diffs[i] = rows[2 * i] - rows[2 * i + 1];
        }
        GapReport report;
        report.challenger = name;
        report.gap = reduce_mc(diffs);
        report.challenger_mean = challenger_sum / static_cast<double>(opts.n_paths);
        report.feedback_mean = feedback_sum / static_cast<double>(opts.n_paths);
        reports.push_back(std::move(report));
    }
    return reports;
}

GramReport convexity_gram(const LQProblem& problem, int n_intervals, const TimeGrid& grid,
                          const MCOptions& opts) {
    if (n_intervals < 1 || n_intervals > 16)
        throw ConfigError("convexity_gram: n_intervals must be in [1, 16]");
    if (grid.n_steps() % static_cast<std::size_t>(n_intervals) != 0)
        throw ConfigError("convexity_gram: grid steps must be a multiple of n_intervals "
                          "so spike boundaries are knots");

    const int m = problem.m;
    const int dim = m * n_intervals;
    const double T = problem.horizon;
    const double dt = T / n_intervals;

    std::vector<ControlLaw> basis;
    basis.reserve(dim);
    for (int interval = 0; interval < n_intervals; ++interval) {
        for (int coord = 0; coord < m; ++coord) {
            basis.push_back(ControlLaw::basis_spike(m, interval * dt, (interval + 1) * dt,
                                                    coord, 1.0));
        }
    }

    const CoefficientTable coeff_table = tabulate_coefficients(problem, grid);
    const WeightTable weight_table = tabulate_weights(problem.weights, grid);
    const Eigen::VectorXd xi = Eigen::VectorXd::Zero(problem.n);

    GramReport report;
    report.gram.setZero(dim, dim);
    report.gram_stderr.setZero(dim, dim);
    report.n_intervals = n_intervals;
    report.n_paths_per_cell = opts.n_paths;

    struct Workspace {
        PathDraw draw;
        SamplePath path;
    };

    for (int k = 0; k < dim; ++k) {
        for (int l = k; l < dim; ++l) {
            const ControlLaw plus = ControlLaw::superpose({{1.0, basis[k]}, {1.0, basis[l]}});
            const ControlLaw minus = ControlLaw::superpose({{1.0, basis[k]}, {-1.0, basis[l]}});
            const std::uint64_t cell_seed = derive_seed(opts.seed, k, l);

            std::vector<Workspace> workspaces(resolve_workers(opts.workers));
            std::vector<double> diffs;
            mc_table(
                opts.n_paths, opts.workers, 1,
                [&](int worker, std::uint64_t index, double* row) {
                    Workspace& ws = workspaces[worker];
                    draw_path_into(*problem.jumps, grid, cell_seed, index, ws.draw);
                    propagate(problem, &coeff_table, plus, xi, ws.draw, ws.path);
                    const double cost_plus =
                        pathwise_cost(ws.path, problem.weights, &weight_table);
                    propagate(problem, &coeff_table, minus, xi, ws.draw, ws.path);
                    const double cost_minus =
                        pathwise_cost(ws.path, problem.weights, &weight_table);
                    row[0] = 0.25 * (cost_plus - cost_minus);
                },
                diffs);
            const MCEstimate est = reduce_mc(diffs);
            report.gram(k, l) = est.mean;
            report.gram(l, k) = est.mean;
            report.gram_stderr(k, l) = est.stderr_;
            report.gram_stderr(l, k) = est.stderr_;
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(report.gram, Eigen::EigenvaluesOnly);
    report.min_eigenvalue = es.eigenvalues().minCoeff();
    report.epsilon_hat = report.min_eigenvalue / dt;
    return report;
}

UnifConvexReport check_unifconvex_phi(const LQProblem& problem, double delta,
                                      const TimeGrid& grid) {
    grid.validate();
    const auto& marks = problem.jumps->marks();

    // Structural requirement: B = C = E = S = 0.
    Eigen::MatrixXd probe;
    for (double t : grid.knots) {
        problem.coefficients.B.eval_into(t, probe);
        if (probe.cwiseAbs().maxCoeff() != 0.0)
            throw StructureViolation("check_unifconvex_phi requires B = 0");
        problem.coefficients.C.eval_into(t, probe);
        if (probe.cwiseAbs().maxCoeff() != 0.0)
            throw StructureViolation("check_unifconvex_phi requires C = 0");
        problem.weights.S.eval_into(t, probe);
        if (probe.cwiseAbs().maxCoeff() != 0.0)
            throw StructureViolation("check_unifconvex_phi requires S = 0");
        for (std::size_t k = 0; k < marks.size(); ++k) {
            problem.coefficients.E[k].eval_into(t, probe);
            if (probe.cwiseAbs().maxCoeff() != 0.0)
                throw StructureViolation("check_unifconvex_phi requires E = 0");
        }
    }

    // Phi' = A Phi, Phi(0) = I, classical RK4 on the grid.
    const std::size_t n_knots = grid.n_knots();
    std::vector<Eigen::MatrixXd> phi(n_knots);
    phi[0] = Eigen::MatrixXd::Identity(problem.n, problem.n);
    Eigen::MatrixXd a_lo, a_mid, a_hi, k1, k2, k3, k4;
    for (std::size_t i = 0; i + 1 < n_knots; ++i) {
        const double t_lo = grid.knots[i], t_hi = grid.knots[i + 1];
        const double h = t_hi - t_lo;
        problem.coefficients.A.eval_into(t_lo, a_lo);
        problem.coefficients.A.eval_into(0.5 * (t_lo + t_hi), a_mid);
        problem.coefficients.A.eval_into(t_hi, a_hi);
        k1.noalias() = a_lo * phi[i];
        k2.noalias() = a_mid * (phi[i] + (0.5 * h) * k1);
        k3.noalias() = a_mid * (phi[i] + (0.5 * h) * k2);
        k4.noalias() = a_hi * (phi[i] + h * k3);
        phi[i + 1] = phi[i] + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    std::vector<double> smin_sq(n_knots), smax_sq(n_knots);
    for (std::size_t i = 0; i < n_knots; ++i) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(phi[i]);
        const double smin = svd.singularValues().minCoeff();
        const double smax = svd.singularValues().maxCoeff();
        smin_sq[i] = smin * smin;
        smax_sq[i] = smax * smax;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_g(problem.weights.G,
                                                        Eigen::EigenvaluesOnly);
    const double lambda_g = es_g.eigenvalues().minCoeff();

    // weight(s) = min-eig Q(s) * smin(Phi(s))^2, integrated from the right
    // (trapezoid).
    std::vector<double> weight(n_knots);
    Eigen::MatrixXd q;
    for (std::size_t i = 0; i < n_knots; ++i) {
        problem.weights.Q.eval_into(grid.knots[i], q);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_q(q, Eigen::EigenvaluesOnly);
        weight[i] = es_q.eigenvalues().minCoeff() * smin_sq[i];
    }
    std::vector<double> tail(n_knots, 0.0);
    for (std::size_t i = n_knots - 1; i > 0; --i) {
        const double h = grid.knots[i] - grid.knots[i - 1];
        tail[i - 1] = tail[i] + 0.5 * h * (weight[i - 1] + weight[i]);
    }

    UnifConvexReport report;
    report.delta = delta;
    report.margin = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd d, f, channel, lhs;
    for (std::size_t i = 0; i < n_knots; ++i) {
        const double t = grid.knots[i];
        problem.coefficients.D.eval_into(t, d);
        channel = d.transpose() * d;
        for (std::size_t k = 0; k < marks.size(); ++k) {
            problem.coefficients.F[k].eval_into(t, f);
            channel += marks[k].intensity * f.transpose() * f;
        }
        const double bracket = lambda_g * smin_sq[n_knots - 1] + tail[i];
        lhs = (bracket / smax_sq[i]) * channel + problem.weights.R(t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (lhs + lhs.transpose()),
                                                          Eigen::EigenvaluesOnly);
        const double margin_here = es.eigenvalues().minCoeff() - delta;
        if (margin_here < report.margin) {
            report.margin = margin_here;
            report.worst_time = t;
        }
    }
    report.pass = report.margin >= 0.0;
    return report;
}

UnifConvexReport check_unifconvex_lyapunov(const LQProblem& problem, const TimeMatrixFn& Q0,
                                           double delta, const TimeGrid& grid) {
    grid.validate();
    if (Q0.rows() != problem.n || Q0.cols() != problem.n)
        throw DimensionMismatch("Q0 must be n x n");

    Eigen::MatrixXd q0;
    for (double t : grid.knots) {
        Q0.eval_into(t, q0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (q0 + q0.transpose()),
                                                          Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw InvalidQ0("Q0 must be positive definite on the whole grid (fails at t=" +
                            std::to_string(t) + ")");
    }

    // Lyapunov solve with Q replaced by Q - Q0.
    LQProblem modified = problem;
    const TimeMatrixFn q_provider = problem.weights.Q;
    const TimeMatrixFn q0_provider = Q0.symmetrized();
    modified.weights.Q = TimeMatrixFn::analytic(
        problem.n, problem.n,
        [q_provider, q0_provider](double t) { return (q_provider(t) - q0_provider(t)).eval(); });
    modified.weights.pathwise.reset();

    RiccatiOptions opts;
    opts.lyapunov_mode = true;
    const RiccatiSolution lyap = solve_riccati(modified, grid, opts);

    UnifConvexReport report;
    report.delta = delta;
    report.margin = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd m_lhs;
    for (std::size_t i = 0; i < grid.n_knots(); ++i) {
        const double t = grid.knots[i];
        const auto [k_gain, r_pi] = aggregate_weights(problem, t, lyap.p[i]);
        Q0.eval_into(t, q0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_q0(0.5 * (q0 + q0.transpose()));
        const Eigen::MatrixXd q0_inv = es_q0.eigenvectors() *
                                       es_q0.eigenvalues().cwiseInverse().asDiagonal() *
                                       es_q0.eigenvectors().transpose();
        m_lhs = r_pi - k_gain * q0_inv * k_gain.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m_lhs + m_lhs.transpose()),
                                                          Eigen::EigenvaluesOnly);
        const double margin_here = es.eigenvalues().minCoeff() - delta;
        if (margin_here < report.margin) {
            report.margin = margin_here;
            report.worst_time = t;
        }
    }
    report.pass = report.margin >= 0.0;
    return report;
}

}  // namespace jumplq
