#include "jumplq/builtin.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <utility>

#include "jumplq/costs.hpp"
#include "jumplq/errors.hpp"
#include "jumplq/philox.hpp"
#include "jumplq/riccati.hpp"
#include "jumplq/simulate.hpp"
#include "jumplq/verify.hpp"

namespace jumplq {

namespace {

Eigen::MatrixXd mat1(double v) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v;
    return m;
}

Eigen::MatrixXd mat2x2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

Eigen::MatrixXd col2(double a, double b) {
    Eigen::MatrixXd m(2, 1);
    m << a, b;
    return m;
}

ManifestEntry deviation_row(std::string quantity, double measured, double tolerance,
                            std::string note = {}) {
    ManifestEntry row;
    row.quantity = std::move(quantity);
    row.expected = 0.0;
    row.measured = measured;
    row.tolerance = tolerance;
    row.pass = std::abs(measured) <= tolerance;
    row.note = std::move(note);
    return row;
}

ManifestEntry statistical_row(std::string quantity, double expected, const MCEstimate& est,
                              std::string note = {}) {
    ManifestEntry row;
    row.quantity = std::move(quantity);
    row.expected = expected;
    row.measured = est.mean;
    row.tolerance = tol::stderr_sigmas * est.stderr_;
    row.statistical = true;
    row.pass = std::abs(est.mean - expected) <= row.tolerance;
    row.note = std::move(note);
    return row;
}

double default_intensity(const std::string& name) {
    if (name == "counterexample_6_2") return 0.5;
    return 1.0;
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"example_9_1", "example_9_2", "example_9_3", "counterexample_6_1",
            "counterexample_6_2"};
}

bool is_builtin(const std::string& name) {
    const auto names = builtin_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

CoefficientSet builtin_coefficients(const std::string& name, double /*horizon*/,
                                    double /*intensity*/) {
    CoefficientSet c;
    if (name == "example_9_1") {
        c.A = TimeMatrixFn::zero(1, 1);
        c.B = TimeMatrixFn::zero(1, 1);
        c.C = TimeMatrixFn::zero(1, 1);
        c.D = TimeMatrixFn::constant(mat1(1.0));
        c.E = {TimeMatrixFn::zero(1, 1)};
        c.F = {TimeMatrixFn::constant(mat1(1.0))};
    } else if (name == "example_9_2") {
        c.A = TimeMatrixFn::zero(2, 2);
        c.B = TimeMatrixFn::zero(2, 1);
        c.C = TimeMatrixFn::zero(2, 2);
        c.D = TimeMatrixFn::constant(col2(1.0, 0.0));
        c.E = {TimeMatrixFn::zero(2, 2)};
        c.F = {TimeMatrixFn::constant(col2(1.0, 0.0))};
    } else if (name == "example_9_3") {
        c.A = TimeMatrixFn::constant(mat2x2(0.0, 1.0, 0.0, 0.0));
        c.B = TimeMatrixFn::zero(2, 1);
        c.C = TimeMatrixFn::zero(2, 2);
        c.D = TimeMatrixFn::constant(col2(1.0, 2.0));
        c.E = {TimeMatrixFn::zero(2, 2)};
        c.F = {TimeMatrixFn::constant(col2(1.0, 2.0))};
    } else if (name == "counterexample_6_1") {
        c.A = TimeMatrixFn::zero(1, 1);
        c.B = TimeMatrixFn::zero(1, 1);
        c.C = TimeMatrixFn::zero(1, 1);
        c.D = TimeMatrixFn::zero(1, 1);
        c.E = {TimeMatrixFn::constant(mat1(-1.0))};
        c.F = {TimeMatrixFn::zero(1, 1)};
    } else if (name == "counterexample_6_2") {
        c.A = TimeMatrixFn::zero(1, 1);
        c.B = TimeMatrixFn::constant(mat1(1.0));
        c.C = TimeMatrixFn::zero(1, 1);
        c.D = TimeMatrixFn::zero(1, 1);
        c.E = {TimeMatrixFn::zero(1, 1)};
        c.F = {TimeMatrixFn::constant(mat1(1.0))};
    } else {
        throw UnknownExample("unknown coefficient set '" + name + "'");
    }
    return c;
}

WeightSet builtin_weights(const std::string& name, double horizon, double intensity) {
    WeightSet w;
    if (name == "example_9_1") {
        w.Q = TimeMatrixFn::zero(1, 1);
        w.S = TimeMatrixFn::zero(1, 1);
        w.R = TimeMatrixFn::analytic(1, 1, [](double s) { return mat1(s * s + 2.0); });
        w.G = mat1(-0.75);
    } else if (name == "example_9_2") {
        w.Q = TimeMatrixFn::zero(2, 2);
        w.S = TimeMatrixFn::zero(1, 2);
        w.R = TimeMatrixFn::constant(mat1(-9.0));
        w.G = mat2x2(5.0, 0.0, 0.0, -1.0);
    } else if (name == "example_9_3") {
        w.Q = TimeMatrixFn::analytic(
            2, 2, [](double s) { return mat2x2(2.0 * s, s * s, s * s, -4.0 * s); });
        w.S = TimeMatrixFn::zero(1, 2);
        w.R = TimeMatrixFn::analytic(1, 1, [](double s) { return mat1(-(1.0 + s * s)); });
        w.G = mat2x2(-(1.0 + horizon * horizon), horizon, horizon, 1.0 + horizon * horizon);
        auto pathwise = std::make_shared<PathFunctionalWeights>();
        pathwise->Q_dir = mat2x2(0.0, -1.0, -1.0, 1.0);
        pathwise->q_coeff = 4.0;
        pathwise->G_dir = mat2x2(4.0, -2.0, -2.0, 1.0);
        pathwise->mu.horizon = horizon;
        pathwise->mu.total_intensity = intensity;
        w.pathwise = std::move(pathwise);
    } else if (name == "counterexample_6_1") {
        w.Q = TimeMatrixFn::zero(1, 1);
        w.S = TimeMatrixFn::zero(1, 1);
        w.R = TimeMatrixFn::constant(mat1(1.0));
        w.G = mat1(0.0);
    } else if (name == "counterexample_6_2") {
        w.Q = TimeMatrixFn::constant(mat1(2.0));
        w.S = TimeMatrixFn::zero(1, 1);
        w.R = TimeMatrixFn::constant(mat1(1.0));
        w.G = mat1(2.0);
    } else {
        throw UnknownExample("unknown weight set '" + name + "'");
    }
    return w;
}

LQProblem builtin_problem(const std::string& name, const BuiltinOverrides& overrides) {
    if (!is_builtin(name)) throw UnknownExample("unknown example '" + name + "'");
    LQProblem problem;
    problem.horizon = overrides.horizon.value_or(1.0);
    const double intensity = overrides.intensity.value_or(default_intensity(name));
    problem.n = (name == "example_9_2" || name == "example_9_3") ? 2 : 1;
    problem.m = 1;
    problem.jumps = std::make_shared<const JumpMeasure>(std::vector<JumpMark>{{0, intensity}});
    problem.coefficients = builtin_coefficients(name, problem.horizon, intensity);
    problem.weights = builtin_weights(name, problem.horizon, intensity);
    return validate_problem(std::move(problem));
}

namespace {

// max over knots of a per-knot deviation against a closed-form target.
template <typename Fn>
double max_knot_deviation(const RiccatiSolution& sol, Fn&& deviation) {
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.grid.n_knots(); ++i)
        worst = std::max(worst, deviation(sol.grid.knots[i], i));
    return worst;
}

std::vector<ManifestEntry> check_example_9_1(const RunOptions& opts) {
    const LQProblem problem = builtin_problem("example_9_1");
    const TimeGrid grid = TimeGrid::uniform(0.0, problem.horizon, opts.riccati_knots - 1);
    const RiccatiSolution sol = solve_riccati(problem, grid);

    std::vector<ManifestEntry> rows;
    rows.push_back(deviation_row(
        "max_t |P(t) + 3/4|",
        max_knot_deviation(sol, [&](double, std::size_t i) {
            return std::abs(sol.p[i](0, 0) + 0.75);
        }),
        tol::riccati_golden, "constant solution -3/4"));
    rows.push_back(deviation_row(
        "max_t |R_hat(t) - (t^2 + 1/2)|",
        max_knot_deviation(sol, [&](double t, std::size_t i) {
            return std::abs(sol.r_hat[i](0, 0) - (t * t + 0.5));
        }),
        tol::riccati_golden, "aggregated weight t^2 + 1/2"));
    rows.push_back(deviation_row(
        "max_t |Theta(t)|",
        max_knot_deviation(sol, [&](double, std::size_t i) {
            return std::abs(sol.theta[i](0, 0));
        }),
        tol::theta_zero, "feedback gain vanishes"));
    return rows;
}

std::vector<ManifestEntry> check_example_9_2(const RunOptions& opts) {
    const LQProblem problem = builtin_problem("example_9_2");
    const TimeGrid grid = TimeGrid::uniform(0.0, problem.horizon, opts.riccati_knots - 1);
    const RiccatiSolution sol = solve_riccati(problem, grid);
    const Eigen::MatrixXd target = mat2x2(5.0, 0.0, 0.0, -1.0);

    std::vector<ManifestEntry> rows;
    rows.push_back(deviation_row(
        "max_t ||P(t) - diag(5,-1)||",
        max_knot_deviation(sol, [&](double, std::size_t i) {
            return (sol.p[i] - target).norm();
        }),
        tol::riccati_golden));
    rows.push_back(deviation_row(
        "max_t |R_hat(t) - 1|",
        max_knot_deviation(sol, [&](double, std::size_t i) {
            return std::abs(sol.r_hat[i](0, 0) - 1.0);
        }),
        tol::riccati_golden, "5 + 5 - 9 = 1"));
    rows.push_back(deviation_row(
        "max_t ||Theta(t)||",
        max_knot_deviation(sol, [&](double, std::size_t i) { return sol.theta[i].norm(); }),
        tol::theta_zero));

    Eigen::VectorXd xi(2);
    xi << 1.0, 1.0;
    rows.push_back(deviation_row("<P(0)(1,1),(1,1)> - 4",
                                 value_quadratic(sol, 0.0, xi) - 4.0, tol::riccati_golden,
                                 "indefinite quadratic value"));

    const TimeGrid sim = TimeGrid::uniform(0.0, problem.horizon, opts.sim_steps);
    MCOptions mc;
    mc.n_paths = std::min<std::size_t>(opts.n_paths, 1000);
    mc.seed = opts.seed;
    mc.workers = opts.workers;
    const MCEstimate cost = mc_cost(problem, ControlLaw::zero(1), xi, sim, mc);
    rows.push_back(deviation_row("mc_cost(zero law) - 4", cost.mean - 4.0, tol::exact,
                                 "path-independent cost"));
    rows.push_back(deviation_row("mc_cost(zero law) stderr", cost.stderr_, 0.0,
                                 "deterministic cost has zero spread"));
    return rows;
}

std::vector<ManifestEntry> check_example_9_3(const RunOptions& opts) {
    const LQProblem problem = builtin_problem("example_9_3");
    const double T = problem.horizon;
    const auto& pw = *problem.weights.pathwise;

    std::vector<ManifestEntry> rows;

    // (a) algebraic kernel of the random direction
    const Eigen::MatrixXd d = problem.coefficients.D(0.0);
    const Eigen::MatrixXd g1 = pw.G_dir;
    rows.push_back(deviation_row("||D^T G1||", (d.transpose() * g1).norm(), 0.0,
                                 "random parts cannot enter S_hat"));
    rows.push_back(deviation_row("|F^T G1 F|", (d.transpose() * g1 * d).norm(), 0.0,
                                 "random parts cancel in R_hat (F = D)"));

    // (b) R_hat(s) = 5 + 5 s^2 + 8 s for any value of the random scalar
    double worst_rhat = 0.0, worst_shat = 0.0;
    for (const double mu_probe : {0.0, 0.1, -0.15}) {
        for (int i = 0; i <= 100; ++i) {
            const double s = T * i / 100.0;
            Eigen::MatrixXd p0 = mat2x2(-(1.0 + s * s), s, s, 1.0 + s * s);
            const Eigen::MatrixXd p = p0 + mu_probe * g1;
            const auto [s_hat, r_hat] = aggregate_weights(problem, s, p);
            worst_rhat = std::max(worst_rhat,
                                  std::abs(r_hat(0, 0) - (5.0 + 5.0 * s * s + 8.0 * s)));
            worst_shat = std::max(worst_shat, s_hat.norm());
        }
    }
    rows.push_back(deviation_row("max_s |R_hat(s) - (5 + 5s^2 + 8s)|", worst_rhat,
                                 tol::rhat_formula, "path-independent aggregated weight"));
    rows.push_back(deviation_row("max_s ||S_hat(s)||", worst_shat, tol::rhat_formula));

    // (c) expected cost of u = 1 equals the R_hat integral (T = 1: 32/3)
    const TimeGrid sim = TimeGrid::uniform(0.0, T, opts.sim_steps);
    MCOptions mc;
    mc.n_paths = opts.n_paths;
    mc.seed = opts.seed;
    mc.workers = opts.workers;
    const double integral = 5.0 * T + 5.0 * T * T * T / 3.0 + 4.0 * T * T;
    const MCEstimate cost =
        mc_cost(problem, ControlLaw::constant(Eigen::VectorXd::Ones(1)), Eigen::VectorXd::Zero(2),
                sim, mc);
    rows.push_back(statistical_row("J(0,0; u=1) vs int R_hat", integral, cost,
                                   "pathwise random weights"));

    // (d) mu is a martingale: E mu(t) = mu(0) at t in {T/4, T/2, T}
    const double mu0 = malliavin_mu(0.0, 0.0, 0, pw.mu);
    const std::array<double, 3> stops = {T / 4.0, T / 2.0, T};
    std::vector<double> table;
    struct Workspace {
        PathDraw draw;
    };
    std::vector<Workspace> workspaces(resolve_workers(opts.workers));
    mc_table(
        opts.n_paths, opts.workers, stops.size(),
        [&](int worker, std::uint64_t index, double* row) {
            PathDraw& draw = workspaces[worker].draw;
            draw_path_into(*problem.jumps, sim, opts.seed, index, draw);
            double w = 0.0;
            std::int64_t count = 0;
            std::size_t next_stop = 0;
            for (std::size_t i = 0; i < draw.knots.size() && next_stop < stops.size(); ++i) {
                if (i > 0) w += draw.dw[i - 1];
                if (draw.jump_mark[i] >= 0) ++count;
                if (draw.knots[i] == stops[next_stop]) {
                    row[next_stop] = malliavin_mu(draw.knots[i], w, count, pw.mu);
                    ++next_stop;
                }
            }
        },
        table);
    for (std::size_t s = 0; s < stops.size(); ++s) {
        std::vector<double> col(opts.n_paths);
        for (std::size_t i = 0; i < opts.n_paths; ++i) col[i] = table[i * stops.size() + s];
        rows.push_back(statistical_row(
            "E mu(" + std::to_string(stops[s]) + ") vs mu(0)", mu0, reduce_mc(col)));
    }

    // closed-form Gaussian mean of sin(X^2) vs a nested Monte Carlo oracle
    const std::array<std::pair<double, double>, 5> probes = {
        {{0.0, 0.0}, {T / 4, 0.5}, {T / 2, -1.0}, {3 * T / 4, 2.0}, {0.9 * T, -0.3}}};
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
        const auto [t, w] = probes[pi];
        const double var = T - t;
        PathRng rng(derive_seed(opts.seed, 0xB0, pi), 0);
        std::vector<double> samples(opts.nested_mc_samples);
        for (auto& sample : samples) {
            const double x = w + std::sqrt(var) * rng.normal();
            sample = std::sin(x * x);
        }
        const MCEstimate nested = reduce_mc(samples);
        ManifestEntry row;
        row.quantity = "B(" + std::to_string(t) + ", " + std::to_string(w) +
                       ") closed form vs nested MC";
        row.expected = nested.mean;
        row.measured = gaussian_sin_square_mean(w, var);
        row.tolerance = tol::stderr_sigmas * nested.stderr_;
        row.statistical = true;
        row.pass = std::abs(row.measured - row.expected) <= row.tolerance;
        rows.push_back(row);
    }
    return rows;
}

// Fraction of paths hitting zero and exactness of the post-jump collapse,
// shared by both counterexamples.
void singular_flow_rows(const LQProblem& problem, const ControlLaw& law, const RunOptions& opts,
                        double expected_fraction, std::vector<ManifestEntry>& rows) {
    const TimeGrid sim = TimeGrid::uniform(0.0, problem.horizon, opts.sim_steps);
    const CoefficientTable table = tabulate_coefficients(problem, sim);

    struct Workspace {
        PathDraw draw;
        SamplePath path;
    };
    std::vector<Workspace> workspaces(resolve_workers(opts.workers));
    const Eigen::VectorXd xi = Eigen::VectorXd::Ones(problem.n);

    std::vector<double> cols;
    mc_table(
        opts.n_paths, opts.workers, 3,
        [&](int worker, std::uint64_t index, double* row) {
            Workspace& ws = workspaces[worker];
            draw_path_into(*problem.jumps, sim, opts.seed, index, ws.draw);
            propagate(problem, &table, law, xi, ws.draw, ws.path);
            const bool jumped = !ws.path.events.empty();
            bool zero_after_jump = jumped;
            if (jumped) {
                std::size_t first = 0;
                while (ws.path.jump_mark[first] < 0) ++first;
                for (std::size_t i = first; i < ws.path.knots.size(); ++i) {
                    if (ws.path.x[i].cwiseAbs().maxCoeff() != 0.0) {
                        zero_after_jump = false;
                        break;
                    }
                }
            }
            row[0] = (ws.path.x.back().cwiseAbs().maxCoeff() == 0.0) ? 1.0 : 0.0;
            row[1] = jumped ? 1.0 : 0.0;
            row[2] = zero_after_jump ? 1.0 : 0.0;
        },
        cols);

    std::vector<double> zero_at_T(opts.n_paths);
    double n_jumped = 0.0, n_zero_after = 0.0;
    for (std::size_t i = 0; i < opts.n_paths; ++i) {
        zero_at_T[i] = cols[3 * i];
        n_jumped += cols[3 * i + 1];
        n_zero_after += cols[3 * i + 2];
    }
    rows.push_back(statistical_row("P(X(T) = 0)", expected_fraction, reduce_mc(zero_at_T),
                                   "probability of at least one jump"));
    ManifestEntry exact;
    exact.quantity = "jumped paths with X identically 0 after the first jump";
    exact.expected = 1.0;
    exact.measured = (n_jumped > 0.0) ? n_zero_after / n_jumped : 1.0;
    exact.tolerance = 0.0;
    exact.pass = (exact.measured == 1.0);
    exact.note = "exact, not statistical";
    rows.push_back(exact);
}

std::vector<ManifestEntry> check_counterexample_6_1(const RunOptions& opts) {
    const LQProblem problem = builtin_problem("counterexample_6_1");
    const TimeGrid grid = TimeGrid::uniform(0.0, problem.horizon, opts.riccati_knots - 1);
    const RiccatiSolution sol = solve_riccati(problem, grid);

    std::vector<ManifestEntry> rows;
    rows.push_back(deviation_row(
        "max_t |P(t)|",
        max_knot_deviation(sol, [&](double, std::size_t i) { return sol.p[i].norm(); }),
        tol::riccati_golden, "Riccati solvable despite the singular flow"));
    rows.push_back(deviation_row(
        "max_t |R_hat(t) - 1|",
        max_knot_deviation(sol, [&](double, std::size_t i) {
            return std::abs(sol.r_hat[i](0, 0) - 1.0);
        }),
        tol::riccati_golden));
    rows.push_back(deviation_row("min |det(I + E + F Theta)|", sol.jump_multiplier_min_abs_det,
                                 tol::multiplier_singular, "uncontrolled jump multiplier 1 - 1"));

    const double lambda = problem.jumps->total_intensity();
    singular_flow_rows(problem, ControlLaw::zero(1), opts,
                       1.0 - std::exp(-lambda * problem.horizon), rows);
    return rows;
}

std::vector<ManifestEntry> check_counterexample_6_2(const RunOptions& opts) {
    const LQProblem problem = builtin_problem("counterexample_6_2");
    const TimeGrid grid = TimeGrid::uniform(0.0, problem.horizon, opts.riccati_knots - 1);
    auto sol = std::make_shared<const RiccatiSolution>(solve_riccati(problem, grid));

    std::vector<ManifestEntry> rows;
    rows.push_back(deviation_row(
        "max_t |P(t) - 2|",
        max_knot_deviation(*sol, [&](double, std::size_t i) {
            return std::abs(sol->p[i](0, 0) - 2.0);
        }),
        tol::riccati_golden));
    rows.push_back(deviation_row(
        "max_t |Theta(t) + 1|",
        max_knot_deviation(*sol, [&](double, std::size_t i) {
            return std::abs(sol->theta[i](0, 0) + 1.0);
        }),
        tol::riccati_golden));
    rows.push_back(deviation_row(
        "max_t |R_hat(t) - 2|",
        max_knot_deviation(*sol, [&](double, std::size_t i) {
            return std::abs(sol->r_hat[i](0, 0) - 2.0);
        }),
        tol::riccati_golden));
    rows.push_back(deviation_row(
        "max_t |S_hat(t) - 2|",
        max_knot_deviation(*sol, [&](double, std::size_t i) {
            return std::abs(sol->s_hat[i](0, 0) - 2.0);
        }),
        tol::riccati_golden));
    rows.push_back(deviation_row("min |det(I + E + F Theta)|", sol->jump_multiplier_min_abs_det,
                                 tol::multiplier_singular, "1 + 0 + 1*(-1) = 0"));

    singular_flow_rows(problem, ControlLaw::feedback(sol), opts,
                       1.0 - std::exp(-0.5 * problem.horizon), rows);

    // optimality: the zero law must lose to the feedback law
    const TimeGrid sim = TimeGrid::uniform(0.0, problem.horizon, opts.sim_steps);
    MCOptions mc;
    mc.n_paths = std::min<std::size_t>(opts.n_paths, 10000);
    mc.seed = opts.seed;
    mc.workers = opts.workers;
    const auto gaps = optimality_gap(problem, *sol, Eigen::VectorXd::Ones(1),
                                     {{"zero", ControlLaw::zero(1)}}, sim, mc);
    ManifestEntry gap_row;
    gap_row.quantity = "J(zero) - J(feedback)";
    gap_row.expected = 0.0;
    gap_row.measured = gaps[0].gap.mean;
    gap_row.tolerance = tol::stderr_sigmas * gaps[0].gap.stderr_;
    gap_row.statistical = true;
    gap_row.pass = gaps[0].gap.mean > gap_row.tolerance;
    gap_row.note = "must exceed 3 stderr above zero";
    rows.push_back(gap_row);
    return rows;
}

}  // namespace

std::vector<ManifestEntry> run_builtin_checks(const std::string& name, const RunOptions& opts) {
    if (name == "example_9_1") return check_example_9_1(opts);
    if (name == "example_9_2") return check_example_9_2(opts);
    if (name == "example_9_3") return check_example_9_3(opts);
    if (name == "counterexample_6_1") return check_counterexample_6_1(opts);
    if (name == "counterexample_6_2") return check_counterexample_6_2(opts);
    throw UnknownExample("unknown example '" + name + "'");
}

}  // namespace jumplq
