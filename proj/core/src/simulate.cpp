#include "jumplq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jumplq/errors.hpp"

namespace jumplq {

namespace {

// Jump times with the categorical mark drawn as an index into marks().
struct IndexedEvent {
    double time;
    std::int32_t mark_index;
};

std::vector<IndexedEvent> sample_indexed(const JumpMeasure& jm, double t0, double t1,
                                         PathRng& rng) {
    std::vector<IndexedEvent> events;
    const double total = jm.total_intensity();
    const auto& marks = jm.marks();
    double t = t0;
    for (;;) {
        t += rng.exponential(total);
        if (t > t1) break;
        if (!events.empty() && t <= events.back().time)
            t = std::nextafter(events.back().time, t1 + 1.0);  // a.s. unreachable tie guard
        if (t > t1) break;
        const double pick = rng.uniform01() * total;
        double acc = 0.0;
        std::int32_t index = static_cast<std::int32_t>(marks.size()) - 1;
        for (std::size_t k = 0; k < marks.size(); ++k) {
            acc += marks[k].intensity;
            if (pick <= acc) {
                index = static_cast<std::int32_t>(k);
                break;
            }
        }
        events.push_back({t, index});
    }
    return events;
}

}  // namespace

std::vector<JumpEvent> sample_jump_times(const JumpMeasure& jm, double t0, double t1,
                                         PathRng& rng) {
    if (!(t0 < t1)) throw InvalidHorizon("sample_jump_times requires t0 < t1");
    std::vector<JumpEvent> events;
    for (const auto& e : sample_indexed(jm, t0, t1, rng))
        events.push_back({e.time, jm.marks()[e.mark_index].id});
    return events;
}

void draw_path_into(const JumpMeasure& jm, const TimeGrid& base, std::uint64_t seed,
                    std::uint64_t path_index, PathDraw& out) {
    PathRng rng(seed, path_index);
    const auto events = sample_indexed(jm, base.t0(), base.t1(), rng);

    out.seed = seed;
    out.path_index = path_index;
    out.knots.clear();
    out.jump_mark.clear();
    out.base_knot.clear();
    out.events.clear();
    out.knots.reserve(base.n_knots() + events.size());
    out.jump_mark.reserve(base.n_knots() + events.size());
    out.base_knot.reserve(base.n_knots() + events.size());

    std::size_t next_event = 0;
    for (std::size_t i = 0; i < base.n_knots(); ++i) {
        const double knot = base.knots[i];
        while (next_event < events.size() && events[next_event].time < knot) {
            out.knots.push_back(events[next_event].time);
            out.jump_mark.push_back(events[next_event].mark_index);
            out.base_knot.push_back(-1);
            ++next_event;
        }
        if (next_event < events.size() && events[next_event].time == knot) {
            // Jump landing exactly on a knot (probability zero, still exact).
            out.knots.push_back(knot);
            out.jump_mark.push_back(events[next_event].mark_index);
            out.base_knot.push_back(static_cast<std::int32_t>(i));
            ++next_event;
        } else {
            out.knots.push_back(knot);
            out.jump_mark.push_back(-1);
            out.base_knot.push_back(static_cast<std::int32_t>(i));
        }
    }

    for (const auto& e : events)
        out.events.push_back({e.time, jm.marks()[e.mark_index].id});

    const std::size_t n_intervals = out.knots.size() - 1;
    out.dw.resize(n_intervals);
    for (std::size_t i = 0; i < n_intervals; ++i) {
        const double dt = out.knots[i + 1] - out.knots[i];
        out.dw[i] = rng.normal() * std::sqrt(dt);
    }
}

PathDraw draw_path(const JumpMeasure& jm, const TimeGrid& base, std::uint64_t seed,
                   std::uint64_t path_index) {
    PathDraw out;
    draw_path_into(jm, base, seed, path_index, out);
    return out;
}

CoefficientTable tabulate_coefficients(const LQProblem& problem, const TimeGrid& base) {
    CoefficientTable table;
    const std::size_t n = base.n_knots();
    table.A.resize(n);
    table.B.resize(n);
    table.C.resize(n);
    table.D.resize(n);
    table.comp_E.resize(n);
    table.comp_F.resize(n);
    const auto& c = problem.coefficients;
    const auto& marks = problem.jumps->marks();
    Eigen::MatrixXd scratch;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = base.knots[i];
        c.A.eval_into(t, table.A[i]);
        c.B.eval_into(t, table.B[i]);
        c.C.eval_into(t, table.C[i]);
        c.D.eval_into(t, table.D[i]);
        table.comp_E[i].setZero(problem.n, problem.n);
        table.comp_F[i].setZero(problem.n, problem.m);
        for (std::size_t k = 0; k < marks.size(); ++k) {
            c.E[k].eval_into(t, scratch);
            table.comp_E[i] += marks[k].intensity * scratch;
            c.F[k].eval_into(t, scratch);
            table.comp_F[i] += marks[k].intensity * scratch;
        }
    }
    return table;
}

void propagate(const LQProblem& problem, const CoefficientTable* table, const ControlLaw& law,
               const Eigen::VectorXd& xi, const PathDraw& draw, SamplePath& out) {
    if (xi.size() != problem.n)
        throw DimensionMismatch("initial state has size " + std::to_string(xi.size()) +
                                ", expected " + std::to_string(problem.n));
    if (law.dim() != problem.m)
        throw DimensionMismatch("control law dimension mismatch");

    const std::size_t n_knots = draw.knots.size();
    out.knots = draw.knots;
    out.jump_mark = draw.jump_mark;
    out.base_knot = draw.base_knot;
    out.events = draw.events;
    out.dw = draw.dw;
    out.seed = draw.seed;
    out.path_index = draw.path_index;
    out.x.resize(n_knots);
    out.x_pre.resize(n_knots);
    out.u.resize(n_knots - 1);

    const auto& coeffs = problem.coefficients;
    const auto& marks = problem.jumps->marks();

    Eigen::MatrixXd a, b, c, d, comp_e, comp_f, ek, fk;
    Eigen::VectorXd u(problem.m), u_jump(problem.m), drift(problem.n), diffusion(problem.n),
        xp(problem.n);

    out.x[0] = xi;
    out.x_pre[0] = xi;

    for (std::size_t i = 0; i + 1 < n_knots; ++i) {
        const double t = draw.knots[i];
        const double dt = draw.knots[i + 1] - draw.knots[i];
        const Eigen::VectorXd& x = out.x[i];

        law.value_into(t, x, u);
        out.u[i] = u;

        const std::int32_t bi = draw.base_knot[i];
        const Eigen::MatrixXd *A, *B, *C, *D, *CompE, *CompF;
        if (table && bi >= 0) {
            A = &table->A[bi];
            B = &table->B[bi];
            C = &table->C[bi];
            D = &table->D[bi];
            CompE = &table->comp_E[bi];
            CompF = &table->comp_F[bi];
        } else {
            coeffs.A.eval_into(t, a);
            coeffs.B.eval_into(t, b);
            coeffs.C.eval_into(t, c);
            coeffs.D.eval_into(t, d);
            comp_e.setZero(problem.n, problem.n);
            comp_f.setZero(problem.n, problem.m);
            for (std::size_t k = 0; k < marks.size(); ++k) {
                coeffs.E[k].eval_into(t, ek);
                comp_e += marks[k].intensity * ek;
                coeffs.F[k].eval_into(t, fk);
                comp_f += marks[k].intensity * fk;
            }
            A = &a;
            B = &b;
            C = &c;
            D = &d;
            CompE = &comp_e;
            CompF = &comp_f;
        }

        // Compensated Euler step: the sum_k lambda_k (E X + F u) drift is the
        // compensator of the jump integral.
        drift.noalias() = (*A) * x;
        drift.noalias() += (*B) * u;
        drift.noalias() -= (*CompE) * x;
        drift.noalias() -= (*CompF) * u;
        diffusion.noalias() = (*C) * x;
        diffusion.noalias() += (*D) * u;
        xp = x + dt * drift + draw.dw[i] * diffusion;

        const double amax = xp.array().abs().maxCoeff();
        if (!(amax <= kStateGuard))
            throw StateBlowUp("state exceeded the overflow guard at t=" +
                                  std::to_string(draw.knots[i + 1]),
                              draw.knots[i + 1], static_cast<std::int64_t>(draw.path_index));

        out.x_pre[i + 1] = xp;
        const std::int32_t mark = draw.jump_mark[i + 1];
        if (mark >= 0) {
            const double t_jump = draw.knots[i + 1];
            law.value_into(t_jump, xp, u_jump);  // u(s) = Theta(s) X(s-) at the jump
            coeffs.E[mark].eval_into(t_jump, ek);
            coeffs.F[mark].eval_into(t_jump, fk);
            out.x[i + 1] = xp;
            out.x[i + 1].noalias() += ek * xp;
            out.x[i + 1].noalias() += fk * u_jump;
        } else {
            out.x[i + 1] = xp;
        }
    }
}

SamplePath simulate_state(const LQProblem& problem, const ControlLaw& law,
                          const Eigen::VectorXd& xi, const TimeGrid& grid, std::uint64_t seed,
                          std::uint64_t path_index) {
    const CoefficientTable table = tabulate_coefficients(problem, grid);
    const PathDraw draw = draw_path(*problem.jumps, grid, seed, path_index);
    SamplePath path;
    propagate(problem, &table, law, xi, draw, path);
    return path;
}

std::vector<double> brownian_values(const SamplePath& path) {
    std::vector<double> w(path.knots.size(), 0.0);
    for (std::size_t i = 0; i + 1 < path.knots.size(); ++i) w[i + 1] = w[i] + path.dw[i];
    return w;
}

std::vector<std::int64_t> jump_counts(const SamplePath& path) {
    std::vector<std::int64_t> counts(path.knots.size(), 0);
    for (std::size_t i = 1; i < path.knots.size(); ++i)
        counts[i] = counts[i - 1] + (path.jump_mark[i] >= 0 ? 1 : 0);
    return counts;
}

}  // namespace jumplq
