#include "jumplq/config_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "jumplq/errors.hpp"

namespace jumplq {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& value, const std::string& where) {
    if (!value.is_array() || value.empty() || !value[0].is_array())
        throw ConfigError(where + ": expected an array of rows");
    const std::size_t rows = value.size();
    const std::size_t cols = value[0].size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!value[i].is_array() || value[i].size() != cols)
            throw ConfigError(where + ": ragged rows");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!value[i][j].is_number())
                throw ConfigError(where + ": non-numeric entry at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                value[i][j].get<double>();
        }
    }
    return m;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where + ": missing field '" + key + "'");
    return *it;
}

TimeMatrixFn parse_provider(const json& section, const char* key, const std::string& kind,
                            const std::string& where) {
    if (kind == "constant") return TimeMatrixFn::constant(parse_matrix(require(section, key, where), where + "." + key));
    // grid: {"times": [...], key: [matrix per time]}
    const json& times_json = require(section, "times", where);
    const json& values_json = require(section, key, where);
    if (!times_json.is_array() || !values_json.is_array() ||
        times_json.size() != values_json.size())
        throw ConfigError(where + ": 'times' and '" + key + "' must be arrays of equal length");
    std::vector<double> times;
    std::vector<Eigen::MatrixXd> values;
    for (std::size_t i = 0; i < times_json.size(); ++i) {
        times.push_back(times_json[i].get<double>());
        values.push_back(parse_matrix(values_json[i], where + "." + key + "[" +
                                      std::to_string(i) + "]"));
    }
    return TimeMatrixFn::grid(std::move(times), std::move(values));
}

std::vector<TimeMatrixFn> parse_per_mark(const json& section, const char* key,
                                         const std::string& kind, std::size_t n_marks,
                                         const std::string& where) {
    const json& value = require(section, key, where);
    if (!value.is_array() || value.size() != n_marks)
        throw ConfigError(where + "." + key + ": expected one entry per jump mark (" +
                          std::to_string(n_marks) + ")");
    std::vector<TimeMatrixFn> out;
    out.reserve(n_marks);
    for (std::size_t k = 0; k < n_marks; ++k) {
        if (kind == "constant") {
            out.push_back(TimeMatrixFn::constant(
                parse_matrix(value[k], where + "." + key + "[" + std::to_string(k) + "]")));
        } else {
            throw ConfigError(where + ": grid-sampled E/F are not supported; "
                              "use 'constant' or a builtin set");
        }
    }
    return out;
}

}  // namespace

LQProblem problem_from_json(const json& config) {
    if (!config.is_object()) throw ConfigError("config root must be an object");
    LQProblem problem;
    problem.n = require(config, "n", "config").get<int>();
    problem.m = require(config, "m", "config").get<int>();
    problem.horizon = require(config, "T", "config").get<double>();

    const json& jm = require(config, "jump_measure", "config");
    if (!jm.is_array() || jm.empty())
        throw ConfigError("config.jump_measure: expected a non-empty array");
    std::vector<JumpMark> marks;
    for (std::size_t k = 0; k < jm.size(); ++k) {
        JumpMark mark;
        mark.id = require(jm[k], "id", "config.jump_measure").get<int>();
        mark.intensity = require(jm[k], "intensity", "config.jump_measure").get<double>();
        marks.push_back(mark);
    }
    problem.jumps = std::make_shared<const JumpMeasure>(std::move(marks));

    const json& coeffs = require(config, "coefficients", "config");
    const std::string ckind = require(coeffs, "kind", "config.coefficients").get<std::string>();
    if (ckind == "builtin") {
        const std::string name =
            require(coeffs, "name", "config.coefficients").get<std::string>();
        problem.coefficients =
            builtin_coefficients(name, problem.horizon, problem.jumps->total_intensity());
    } else if (ckind == "constant" || ckind == "grid") {
        problem.coefficients.A = parse_provider(coeffs, "A", ckind, "config.coefficients");
        problem.coefficients.B = parse_provider(coeffs, "B", ckind, "config.coefficients");
        problem.coefficients.C = parse_provider(coeffs, "C", ckind, "config.coefficients");
        problem.coefficients.D = parse_provider(coeffs, "D", ckind, "config.coefficients");
        problem.coefficients.E =
            parse_per_mark(coeffs, "E", "constant", problem.jumps->size(), "config.coefficients");
        problem.coefficients.F =
            parse_per_mark(coeffs, "F", "constant", problem.jumps->size(), "config.coefficients");
    } else {
        throw ConfigError("config.coefficients.kind must be builtin|constant|grid");
    }

    const json& weights = require(config, "weights", "config");
    const std::string wkind = require(weights, "kind", "config.weights").get<std::string>();
    if (wkind == "builtin") {
        const std::string name = require(weights, "name", "config.weights").get<std::string>();
        problem.weights =
            builtin_weights(name, problem.horizon, problem.jumps->total_intensity());
    } else if (wkind == "constant" || wkind == "grid") {
        problem.weights.Q = parse_provider(weights, "Q", wkind, "config.weights");
        problem.weights.S = parse_provider(weights, "S", wkind, "config.weights");
        problem.weights.R = parse_provider(weights, "R", wkind, "config.weights");
        problem.weights.G = parse_matrix(require(weights, "G", "config.weights"),
                                         "config.weights.G");
    } else {
        throw ConfigError("config.weights.kind must be builtin|constant|grid");
    }

    return validate_problem(std::move(problem));
}

LQProblem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("parse error in '" + path + "': " + err.what());
    }
    return problem_from_json(config);
}

nlohmann::json to_json(const MCEstimate& estimate) {
    return json{{"mean", estimate.mean},
                {"stderr", estimate.stderr_},
                {"n_paths", estimate.n_paths},
                {"confidence_level", estimate.confidence_level}};
}

nlohmann::json to_json(const ManifestEntry& entry) {
    return json{{"quantity", entry.quantity}, {"expected", entry.expected},
                {"measured", entry.measured}, {"tolerance", entry.tolerance},
                {"statistical", entry.statistical}, {"pass", entry.pass},
                {"note", entry.note}};
}

nlohmann::json to_json(const ResidualReport& report) {
    return json{{"residual", to_json(report.residual)},
                {"square_term", to_json(report.square_term)},
                {"cost", to_json(report.cost)},
                {"value_term", report.value_term},
                {"worst_abs_residual", report.worst_abs_residual},
                {"worst_path_index", report.worst_path_index},
                {"seed", report.seed}};
}

nlohmann::json to_json(const GapReport& report) {
    return json{{"challenger", report.challenger},
                {"gap", to_json(report.gap)},
                {"challenger_mean", report.challenger_mean},
                {"feedback_mean", report.feedback_mean}};
}

nlohmann::json to_json(const GramReport& report) {
    json gram = json::array();
    json gram_se = json::array();
    for (Eigen::Index i = 0; i < report.gram.rows(); ++i) {
        json row = json::array(), row_se = json::array();
        for (Eigen::Index j = 0; j < report.gram.cols(); ++j) {
            row.push_back(report.gram(i, j));
            row_se.push_back(report.gram_stderr(i, j));
        }
        gram.push_back(row);
        gram_se.push_back(row_se);
    }
    return json{{"gram", gram},
                {"gram_stderr", gram_se},
                {"min_eigenvalue", report.min_eigenvalue},
                {"epsilon_hat", report.epsilon_hat},
                {"n_intervals", report.n_intervals},
                {"n_paths_per_cell", report.n_paths_per_cell}};
}

nlohmann::json to_json(const UnifConvexReport& report) {
    // "holds" rather than "pass": these describe the problem data, so they
    // never gate --strict.
    return json{{"holds", report.pass},
                {"margin", report.margin},
                {"worst_time", report.worst_time},
                {"delta", report.delta}};
}

nlohmann::json to_json(const StandardConditionReport& report) {
    const auto branch = [](const StandardConditionReport::Branch& b) {
        return json{{"applicable", b.applicable}, {"holds", b.holds}, {"margin", b.margin}};
    };
    return json{{"convex1", branch(report.convex1)},
                {"convex2", branch(report.convex2)},
                {"min_eig_Q", report.min_eig_Q},
                {"min_eig_G", report.min_eig_G},
                {"max_norm_S", report.max_norm_S},
                {"min_eig_R", report.min_eig_R}};
}

namespace {

void write_double(std::ostream& os, double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    os << buffer;
}

}  // namespace

void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol) {
    const Eigen::Index n = sol.p.front().rows();
    const Eigen::Index m = sol.theta.front().rows();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) os << ",P_" << (i + 1) << (j + 1);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j) os << ",Theta_" << (i + 1) << (j + 1);
    os << ",min_eig_R_hat,min_abs_det_jump_multiplier\n";
    for (std::size_t k = 0; k < sol.grid.n_knots(); ++k) {
        write_double(os, sol.grid.knots[k]);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                os << ',';
                write_double(os, sol.p[k](i, j));
            }
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                os << ',';
                write_double(os, sol.theta[k](i, j));
            }
        os << ',';
        write_double(os, sol.min_eig_r_hat_knots[k]);
        os << ',';
        write_double(os, sol.min_abs_det_multiplier_knots[k]);
        os << '\n';
    }
}

void write_path_csv(std::ostream& os, const SamplePath& path) {
    const Eigen::Index n = path.x.front().size();
    const Eigen::Index m = path.u.front().size();
    os << "t";
    for (Eigen::Index i = 0; i < n; ++i) os << ",X_" << (i + 1);
    for (Eigen::Index i = 0; i < m; ++i) os << ",u_" << (i + 1);
    os << ",is_jump,mark_id\n";
    std::size_t event_idx = 0;
    for (std::size_t k = 0; k < path.knots.size(); ++k) {
        write_double(os, path.knots[k]);
        for (Eigen::Index i = 0; i < n; ++i) {
            os << ',';
            write_double(os, path.x[k](i));
        }
        const std::size_t u_idx = std::min(k, path.u.size() - 1);
        for (Eigen::Index i = 0; i < m; ++i) {
            os << ',';
            write_double(os, path.u[u_idx](i));
        }
        if (path.jump_mark[k] >= 0) {
            os << ",1," << path.events[event_idx++].mark_id << '\n';
        } else {
            os << ",0,-1\n";
        }
    }
}

}  // namespace jumplq
