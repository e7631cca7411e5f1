// Batch front end: load a problem from a built-in name or a JSON config,
// dispatch to the solver / simulator / verifier, and emit machine-readable
// results (JSON for scalars, CSV for time-indexed arrays).

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "jumplq/builtin.hpp"
#include "jumplq/config_io.hpp"
#include "jumplq/control_law.hpp"
#include "jumplq/costs.hpp"
#include "jumplq/errors.hpp"
#include "jumplq/riccati.hpp"
#include "jumplq/simulate.hpp"
#include "jumplq/verify.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string builtin;
    std::string config_path;
    std::size_t n_paths = 10000;
    std::uint64_t seed = 1;
    double step = 0.0;          // simulation step h; 0 = T/2000
    std::size_t knots = 4000;   // Riccati grid knots
    std::string out;
    std::string format = "default";
    bool strict = false;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_mc = true) {
    auto* builtin = cmd->add_option("--builtin", args.builtin,
                                    "built-in problem name (see `examples list`)");
    auto* config = cmd->add_option("--config", args.config_path, "problem config JSON path");
    builtin->excludes(config);
    if (with_mc) {
        cmd->add_option("--paths", args.n_paths, "Monte Carlo path count");
        cmd->add_option("--workers", args.workers, "worker threads (0 = all cores)");
    }
    cmd->add_option("--seed", args.seed, "master seed for the counter-based streams");
    cmd->add_option("--step", args.step, "simulation step h (default T/2000)");
    cmd->add_option("--knots", args.knots, "Riccati grid knots");
    cmd->add_option("--out", args.out, "output file (default stdout)");
    cmd->add_option("--format", args.format, "output format: json|csv");
    cmd->add_flag("--strict", args.strict, "exit nonzero when any reported check fails");
}

jumplq::LQProblem load_problem(const CommonArgs& args) {
    if (!args.builtin.empty()) return jumplq::builtin_problem(args.builtin);
    if (!args.config_path.empty()) return jumplq::load_problem_file(args.config_path);
    throw jumplq::ConfigError("choose a problem with --builtin or --config");
}

jumplq::TimeGrid sim_grid(const jumplq::LQProblem& problem, const CommonArgs& args) {
    std::size_t steps = jumplq::kDefaultSimSteps;
    if (args.step > 0.0)
        steps = static_cast<std::size_t>(std::lround(problem.horizon / args.step));
    return jumplq::TimeGrid::uniform(0.0, problem.horizon, std::max<std::size_t>(steps, 1));
}

void emit(const CommonArgs& args, const std::string& payload) {
    if (args.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(args.out);
    if (!out) throw jumplq::ConfigError("cannot open output file '" + args.out + "'");
    out << payload;
}

Eigen::VectorXd parse_vector(const std::string& csv, int expected) {
    Eigen::VectorXd v(expected);
    std::stringstream ss(csv);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i >= expected)
            throw jumplq::ConfigError("vector '" + csv + "' has too many entries");
        v[i++] = std::stod(item);
    }
    if (i != expected)
        throw jumplq::ConfigError("vector '" + csv + "' needs " + std::to_string(expected) +
                                  " entries");
    return v;
}

jumplq::ControlLaw parse_law(const std::string& text, const jumplq::LQProblem& problem,
                             const std::shared_ptr<const jumplq::RiccatiSolution>& sol) {
    if (text == "zero") return jumplq::ControlLaw::zero(problem.m);
    if (text == "feedback") {
        if (!sol)
            throw jumplq::ConfigError("feedback law needs a Riccati solution "
                                      "(not available for this problem)");
        return jumplq::ControlLaw::feedback(sol);
    }
    if (text.rfind("constant:", 0) == 0)
        return jumplq::ControlLaw::constant(parse_vector(text.substr(9), problem.m));
    throw jumplq::ConfigError("unknown law '" + text + "' (zero|feedback|constant:v1,v2,...)");
}

bool is_malliavin_problem(const jumplq::LQProblem& problem) {
    return problem.weights.pathwise != nullptr;
}

std::shared_ptr<const jumplq::RiccatiSolution> solve_for(const jumplq::LQProblem& problem,
                                                         const CommonArgs& args) {
    const auto grid =
        jumplq::TimeGrid::uniform(0.0, problem.horizon, std::max<std::size_t>(args.knots, 2) - 1);
    return std::make_shared<const jumplq::RiccatiSolution>(jumplq::solve_riccati(problem, grid));
}

int cmd_riccati(const CommonArgs& args) {
    const auto problem = load_problem(args);
    if (is_malliavin_problem(problem))
        throw jumplq::ConfigError(
            "this problem has pathwise weights; its Riccati solution is random and outside "
            "the deterministic solver (use `examples run example_9_3`)");
    const auto sol = solve_for(problem, args);
    if (args.format == "json") {
        json j;
        j["t"] = sol->grid.knots;
        j["min_eig_R_hat"] = sol->min_eig_r_hat;
        j["jump_multiplier_min_abs_det"] = sol->jump_multiplier_min_abs_det;
        j["knots"] = args.knots;
        emit(args, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        jumplq::write_riccati_csv(os, *sol);
        emit(args, os.str());
    }
    return 0;
}

int cmd_simulate(const CommonArgs& args, const std::string& law_text, const std::string& xi_text,
                 std::uint64_t path_index) {
    const auto problem = load_problem(args);
    std::shared_ptr<const jumplq::RiccatiSolution> sol;
    if (law_text == "feedback" && !is_malliavin_problem(problem)) sol = solve_for(problem, args);
    const auto law = parse_law(law_text, problem, sol);
    const Eigen::VectorXd xi = xi_text.empty() ? Eigen::VectorXd::Ones(problem.n)
                                               : parse_vector(xi_text, problem.n);
    const auto path =
        jumplq::simulate_state(problem, law, xi, sim_grid(problem, args), args.seed, path_index);
    std::ostringstream os;
    jumplq::write_path_csv(os, path);
    emit(args, os.str());
    return 0;
}

int cmd_cost(const CommonArgs& args, const std::string& law_text, const std::string& xi_text) {
    const auto problem = load_problem(args);
    std::shared_ptr<const jumplq::RiccatiSolution> sol;
    if (law_text == "feedback" && !is_malliavin_problem(problem)) sol = solve_for(problem, args);
    const auto law = parse_law(law_text, problem, sol);
    const Eigen::VectorXd xi = xi_text.empty() ? Eigen::VectorXd::Ones(problem.n)
                                               : parse_vector(xi_text, problem.n);
    jumplq::MCOptions mc;
    mc.n_paths = args.n_paths;
    mc.seed = args.seed;
    mc.workers = args.workers;
    const auto start = std::chrono::steady_clock::now();
    const auto estimate = jumplq::mc_cost(problem, law, xi, sim_grid(problem, args), mc);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (args.format == "csv") {
        std::ostringstream os;
        os << "mean,stderr,n_paths,seed\n"
           << estimate.mean << ',' << estimate.stderr_ << ',' << estimate.n_paths << ','
           << args.seed << '\n';
        emit(args, os.str());
    } else {
        json j = jumplq::to_json(estimate);
        j["seed"] = args.seed;
        j["wall_time"] = wall;
        emit(args, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_verify(const CommonArgs& args, const std::string& xi_text,
               std::optional<double> delta, std::optional<double> q0_scale) {
    const auto problem = load_problem(args);
    if (is_malliavin_problem(problem))
        throw jumplq::ConfigError(
            "verify needs the deterministic Riccati reduction; "
            "use `examples run example_9_3` for the pathwise-weight checks");
    const auto sol = solve_for(problem, args);
    const Eigen::VectorXd xi = xi_text.empty() ? Eigen::VectorXd::Ones(problem.n)
                                               : parse_vector(xi_text, problem.n);
    const auto grid = sim_grid(problem, args);
    jumplq::MCOptions mc;
    mc.n_paths = args.n_paths;
    mc.seed = args.seed;
    mc.workers = args.workers;

    std::vector<std::pair<std::string, jumplq::ControlLaw>> laws = {
        {"zero", jumplq::ControlLaw::zero(problem.m)},
        {"u=+1", jumplq::ControlLaw::constant(Eigen::VectorXd::Ones(problem.m))},
        {"u=-0.5", jumplq::ControlLaw::constant(-0.5 * Eigen::VectorXd::Ones(problem.m))},
        {"feedback", jumplq::ControlLaw::feedback(sol)},
    };

    bool all_pass = true;
    json bundle;
    bundle["problem"] = args.builtin.empty() ? ("config:" + args.config_path) : args.builtin;
    bundle["seed"] = args.seed;
    bundle["n_paths"] = args.n_paths;
    bundle["riccati_knots"] = args.knots;
    bundle["sim_steps"] = grid.n_steps();
    bundle["standard_conditions"] = jumplq::to_json(
        jumplq::standard_condition_check(problem, sol->grid));

    json residuals = json::array();
    for (const auto& [name, law] : laws) {
        const auto report =
            jumplq::completion_of_squares_residual(problem, *sol, law, xi, grid, mc);
        const bool pass = std::abs(report.residual.mean) <=
                          jumplq::tol::stderr_sigmas * report.residual.stderr_ +
                              jumplq::tol::exact;
        all_pass = all_pass && pass;
        json item = jumplq::to_json(report);
        item["law"] = name;
        item["pass"] = pass;
        residuals.push_back(item);
    }
    bundle["completion_of_squares"] = residuals;

    json gaps = json::array();
    laws.pop_back();  // the feedback self-gap is identically zero
    for (const auto& report : jumplq::optimality_gap(problem, *sol, xi, laws, grid, mc)) {
        const bool pass =
            report.gap.mean >= -jumplq::tol::stderr_sigmas * report.gap.stderr_;
        all_pass = all_pass && pass;
        json item = jumplq::to_json(report);
        item["pass"] = pass;
        gaps.push_back(item);
    }
    bundle["optimality_gaps"] = gaps;

    if (delta) {
        try {
            bundle["unifconvex_phi"] =
                jumplq::to_json(jumplq::check_unifconvex_phi(problem, *delta, sol->grid));
        } catch (const jumplq::StructureViolation& err) {
            bundle["unifconvex_phi"] = json{{"skipped", err.what()}};
        }
        const double scale = q0_scale.value_or(0.01);
        const auto q0 = jumplq::TimeMatrixFn::constant(
            scale * Eigen::MatrixXd::Identity(problem.n, problem.n));
        bundle["unifconvex_lyapunov"] =
            jumplq::to_json(jumplq::check_unifconvex_lyapunov(problem, q0, *delta, sol->grid));
    }

    bundle["all_pass"] = all_pass;
    emit(args, bundle.dump(2) + "\n");
    return (args.strict && !all_pass) ? 1 : 0;
}

int cmd_convexity(const CommonArgs& args, int n_intervals, std::size_t gram_steps) {
    const auto problem = load_problem(args);
    jumplq::MCOptions mc;
    mc.n_paths = args.n_paths;
    mc.seed = args.seed;
    mc.workers = args.workers;
    std::size_t steps = gram_steps;
    if (args.step > 0.0)
        steps = static_cast<std::size_t>(std::lround(problem.horizon / args.step));
    steps = std::max<std::size_t>(steps, n_intervals);
    steps -= steps % n_intervals;  // spike boundaries must be knots
    const auto grid = jumplq::TimeGrid::uniform(0.0, problem.horizon, steps);
    const auto start = std::chrono::steady_clock::now();
    const auto report = jumplq::convexity_gram(problem, n_intervals, grid, mc);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json j = jumplq::to_json(report);
    j["seed"] = args.seed;
    j["wall_time"] = wall;
    j["gram_steps"] = steps;
    emit(args, j.dump(2) + "\n");
    return 0;
}

int cmd_examples_list(const CommonArgs& args) {
    json j = json::array();
    for (const auto& name : jumplq::builtin_names()) j.push_back(name);
    emit(args, j.dump(2) + "\n");
    return 0;
}

int cmd_examples_run(const CommonArgs& args, const std::string& name) {
    jumplq::RunOptions opts;
    opts.riccati_knots = args.knots;
    opts.n_paths = args.n_paths;
    opts.seed = args.seed;
    opts.workers = args.workers;
    if (args.step > 0.0)
        opts.sim_steps = static_cast<std::size_t>(std::lround(1.0 / args.step));
    const auto rows = jumplq::run_builtin_checks(name, opts);

    bool all_pass = true;
    json items = json::array();
    std::ostringstream table;
    table << name << "\n";
    for (const auto& row : rows) {
        all_pass = all_pass && row.pass;
        items.push_back(jumplq::to_json(row));
        table << (row.pass ? "  [pass] " : "  [FAIL] ") << row.quantity << ": measured "
              << row.measured << " vs expected " << row.expected << " (tol " << row.tolerance
              << (row.statistical ? ", 3 stderr" : "") << ")\n";
    }
    if (args.format == "json" || !args.out.empty()) {
        json j;
        j["example"] = name;
        j["seed"] = args.seed;
        j["n_paths"] = args.n_paths;
        j["checks"] = items;
        j["all_pass"] = all_pass;
        emit(args, j.dump(2) + "\n");
        if (args.out.empty()) {
        } else {
            std::cout << table.str();
        }
    } else {
        std::cout << table.str();
    }
    return (args.strict && !all_pass) ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-horizon stochastic LQ control with Poisson jumps: Riccati solves, "
                 "jump-diffusion simulation, Monte Carlo verification"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string law_text = "zero";
    std::string xi_text;
    std::uint64_t path_index = 0;
    int n_intervals = 8;
    std::size_t gram_steps = 512;
    std::optional<double> delta, q0_scale;
    std::string example_name;

    auto* riccati = app.add_subcommand("riccati", "solve the Riccati equation, dump CSV");
    add_common(riccati, args, false);

    auto* simulate = app.add_subcommand("simulate", "simulate one path, dump CSV");
    add_common(simulate, args, false);
    simulate->add_option("--law", law_text, "zero|feedback|constant:v1,v2,...");
    simulate->add_option("--xi", xi_text, "initial state, comma separated (default ones)");
    simulate->add_option("--index", path_index, "path index within the seed's family");

    auto* cost = app.add_subcommand("cost", "Monte Carlo cost estimate, JSON");
    add_common(cost, args);
    cost->add_option("--law", law_text, "zero|feedback|constant:v1,v2,...");
    cost->add_option("--xi", xi_text, "initial state, comma separated (default ones)");

    auto* verify = app.add_subcommand(
        "verify", "completion-of-squares and optimality report bundle, JSON");
    add_common(verify, args);
    verify->add_option("--xi", xi_text, "initial state, comma separated (default ones)");
    verify->add_option("--delta", delta, "also run the uniform-convexity checkers at delta");
    verify->add_option("--q0", q0_scale, "Q0 = q0 * I for the Lyapunov checker (default 0.01)");

    auto* convexity = app.add_subcommand("convexity", "cost-operator Gram matrix and "
                                                      "coercivity estimate, JSON");
    add_common(convexity, args);
    convexity->add_option("--intervals", n_intervals, "spike basis intervals (<= 16)");
    convexity->add_option("--gram-steps", gram_steps, "simulation steps for the Gram assembly");

    auto* examples = app.add_subcommand("examples", "built-in example problems");
    examples->require_subcommand(1);
    auto* list = examples->add_subcommand("list", "list built-in names");
    add_common(list, args, false);
    auto* run = examples->add_subcommand("run", "reproduce an example's expected quantities");
    run->add_option("name", example_name, "example name")->required();
    add_common(run, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (riccati->parsed()) return cmd_riccati(args);
        if (simulate->parsed()) return cmd_simulate(args, law_text, xi_text, path_index);
        if (cost->parsed()) return cmd_cost(args, law_text, xi_text);
        if (verify->parsed()) return cmd_verify(args, xi_text, delta, q0_scale);
        if (convexity->parsed()) return cmd_convexity(args, n_intervals, gram_steps);
        if (list->parsed()) return cmd_examples_list(args);
        if (run->parsed()) return cmd_examples_run(args, example_name);
    } catch (const jumplq::Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "unexpected error: " << err.what() << "\n";
        return 3;
    }
    return 2;
}
