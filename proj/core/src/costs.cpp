#include "jumplq/costs.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "jumplq/errors.hpp"
#include "jumplq/malliavin.hpp"

namespace jumplq {

MCEstimate reduce_mc(const std::vector<double>& values, double confidence_level) {
    MCEstimate est;
    est.n_paths = values.size();
    est.confidence_level = confidence_level;
    if (values.empty()) return est;
    double sum = 0.0;
    for (double v : values) sum += v;
    est.mean = sum / static_cast<double>(values.size());
    if (values.size() >= 2) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - est.mean;
            ss += d * d;
        }
        const double var = ss / static_cast<double>(values.size() - 1);
        est.stderr_ = std::sqrt(var / static_cast<double>(values.size()));
    }
    return est;
}

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void mc_table(std::size_t n_paths, int workers, std::size_t width, const McBody& fn,
              std::vector<double>& out) {
    out.assign(n_paths * width, 0.0);
    const int n_workers = std::min<int>(resolve_workers(workers),
                                        std::max<std::size_t>(n_paths, 1));
    if (n_workers <= 1) {
        for (std::uint64_t i = 0; i < n_paths; ++i) fn(0, i, out.data() + i * width);
        return;
    }

    std::atomic<bool> failed{false};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::uint64_t first_error_index = ~0ull;

    auto run_chunk = [&](int worker, std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            if (failed.load(std::memory_order_relaxed)) return;
            try {
                fn(worker, i, out.data() + i * width);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error || i < first_error_index) {
                    first_error = std::current_exception();
                    first_error_index = i;
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    const std::uint64_t chunk = (n_paths + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
        const std::uint64_t begin = static_cast<std::uint64_t>(w) * chunk;
        const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, n_paths);
        if (begin >= end) break;
        threads.emplace_back(run_chunk, w, begin, end);
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

WeightTable tabulate_weights(const WeightSet& weights, const TimeGrid& base) {
    WeightTable table;
    const std::size_t n = base.n_knots();
    table.Q.resize(n);
    table.S.resize(n);
    table.R.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = base.knots[i];
        weights.Q.eval_into(t, table.Q[i]);
        weights.S.eval_into(t, table.S[i]);
        weights.R.eval_into(t, table.R[i]);
    }
    return table;
}

double pathwise_cost(const SamplePath& path, const WeightSet& weights, const WeightTable* table) {
    const std::size_t n_knots = path.knots.size();
    const auto* pw = weights.pathwise.get();

    Eigen::MatrixXd q, s, r;
    Eigen::VectorXd tmp_n, tmp_m;

    double w_value = 0.0;
    std::int64_t n_events = 0;
    double running = 0.0;

    for (std::size_t i = 0; i + 1 < n_knots; ++i) {
        const double t = path.knots[i];
        const double dt = path.knots[i + 1] - path.knots[i];
        const Eigen::VectorXd& x = path.x[i];
        const Eigen::VectorXd& u = path.u[i];

        const Eigen::MatrixXd *Q, *S, *R;
        const std::int32_t bi = (i < path.base_knot.size()) ? path.base_knot[i] : -1;
        if (table && bi >= 0) {
            Q = &table->Q[bi];
            S = &table->S[bi];
            R = &table->R[bi];
        } else {
            weights.Q.eval_into(t, q);
            weights.S.eval_into(t, s);
            weights.R.eval_into(t, r);
            Q = &q;
            S = &s;
            R = &r;
        }

        double integrand = 0.0;
        tmp_n.noalias() = (*Q) * x;
        integrand += x.dot(tmp_n);
        if (pw) {
            const double mu = malliavin_mu(t, w_value, n_events, pw->mu);
            tmp_n.noalias() = pw->Q_dir * x;
            integrand += pw->q_coeff * mu * x.dot(tmp_n);
        }
        tmp_m.noalias() = (*S) * x;
        integrand += 2.0 * u.dot(tmp_m);
        tmp_m.noalias() = (*R) * u;
        integrand += u.dot(tmp_m);
        running += integrand * dt;

        w_value += path.dw[i];
        if (path.jump_mark[i + 1] >= 0) ++n_events;
    }

    const Eigen::VectorXd& x_T = path.x.back();
    tmp_n.noalias() = weights.G * x_T;
    double terminal = x_T.dot(tmp_n);
    if (pw) {
        const double eta = malliavin_eta(w_value, n_events, pw->mu);
        tmp_n.noalias() = pw->G_dir * x_T;
        terminal += eta * x_T.dot(tmp_n);
    }
    return terminal + running;
}

MCEstimate mc_cost(const LQProblem& problem, const ControlLaw& law, const Eigen::VectorXd& xi,
                   const TimeGrid& grid, const MCOptions& opts) {
    if (opts.n_paths < 2) throw ConfigError("mc_cost requires at least two paths");
    const CoefficientTable coeff_table = tabulate_coefficients(problem, grid);
    const WeightTable weight_table = tabulate_weights(problem.weights, grid);

    struct Workspace {
        PathDraw draw;
        SamplePath path;
    };
    const int n_workers = resolve_workers(opts.workers);
    std::vector<Workspace> workspaces(n_workers);

    std::vector<double> costs;
    mc_table(
        opts.n_paths, opts.workers, 1,
        [&](int worker, std::uint64_t index, double* row) {
            Workspace& ws = workspaces[worker];
            draw_path_into(*problem.jumps, grid, opts.seed, index, ws.draw);
            propagate(problem, &coeff_table, law, xi, ws.draw, ws.path);
            row[0] = pathwise_cost(ws.path, problem.weights, &weight_table);
        },
        costs);
    return reduce_mc(costs);
}

double value_quadratic(const RiccatiSolution& sol, double t, const Eigen::VectorXd& xi) {
    const Eigen::MatrixXd p = sol.p_at(t);  // throws TimeOutOfRange outside the grid
    return xi.dot(p * xi);
}

}  // namespace jumplq
