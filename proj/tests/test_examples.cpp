#include <doctest.h>

#include <cmath>

#include "jumplq/builtin.hpp"
#include "jumplq/costs.hpp"
#include "jumplq/errors.hpp"
#include "jumplq/malliavin.hpp"
#include "jumplq/philox.hpp"

using namespace jumplq;

TEST_CASE("builtin registry") {
    CHECK(builtin_names().size() == 5);
    CHECK(is_builtin("example_9_3"));
    CHECK_FALSE(is_builtin("example_0"));
    CHECK_THROWS_AS(builtin_problem("nope"), UnknownExample);
    const LQProblem p = builtin_problem("counterexample_6_2");
    CHECK(p.jumps->total_intensity() == 0.5);
    BuiltinOverrides ov;
    ov.horizon = 2.0;
    ov.intensity = 0.25;
    const LQProblem q = builtin_problem("counterexample_6_1", ov);
    CHECK(q.horizon == 2.0);
    CHECK(q.jumps->total_intensity() == 0.25);
}

TEST_CASE("mu at the horizon reproduces eta exactly") {
    MuParams params;
    params.horizon = 1.0;
    params.total_intensity = 1.0;
    for (double w : {-2.0, 0.0, 0.7, 3.1}) {
        CHECK(malliavin_mu(1.0, w, 0, params) ==
              doctest::Approx(std::sin(w * w) / 16.0).epsilon(1e-12));
        CHECK(malliavin_mu(1.0, w, 2, params) ==
              doctest::Approx(std::sin(w * w) / 16.0 + 0.125).epsilon(1e-12));
        CHECK(malliavin_eta(w, 1, params) == std::sin(w * w) / 16.0 + 0.125);
    }
    CHECK_THROWS_AS(malliavin_mu(1.5, 0.0, 0, params), TimeOutOfRange);
}

TEST_CASE("mu jump part saturates at 1/8 once a jump happened") {
    MuParams params;
    params.horizon = 1.0;
    params.total_intensity = 1.0;
    // brownian part of mu(t, 0) plus the saturated jump part
    const double t = 0.4;
    const double brownian = gaussian_sin_square_mean(0.0, params.horizon - t) / 16.0;
    CHECK(malliavin_mu(t, 0.0, 1, params) == doctest::Approx(brownian + 0.125).epsilon(1e-12));
    CHECK(malliavin_mu(t, 0.0, 3, params) == doctest::Approx(brownian + 0.125).epsilon(1e-12));
}

TEST_CASE("mu(0) closed form vs nested Monte Carlo") {
    MuParams params;
    params.horizon = 1.0;
    params.total_intensity = 1.0;
    PathRng rng(777ull, 0ull);
    const int n = 200000;
    std::vector<double> samples(n);
    for (auto& s : samples) {
        const double x = rng.normal();  // W(1) ~ N(0, 1)
        s = std::sin(x * x);
    }
    const MCEstimate mc = reduce_mc(samples);
    const double closed = gaussian_sin_square_mean(0.0, 1.0);
    CHECK(std::abs(closed - mc.mean) <= 3.0 * mc.stderr_);

    const double mu0 = malliavin_mu(0.0, 0.0, 0, params);
    CHECK(mu0 == doctest::Approx(closed / 16.0 + (1.0 - std::exp(-1.0)) / 8.0).epsilon(1e-12));
    // |mu| is bounded by the terminal bound 3/16
    CHECK(std::abs(mu0) <= 3.0 / 16.0);
}

TEST_CASE("gaussian_sin_square_mean degenerates to sin(w^2) at zero variance") {
    CHECK(gaussian_sin_square_mean(1.3, 0.0) == doctest::Approx(std::sin(1.69)).epsilon(1e-14));
}

TEST_CASE("manifest checks pass for the scalar golden examples") {
    RunOptions opts;
    opts.riccati_knots = 1000;
    opts.sim_steps = 400;
    opts.n_paths = 4000;
    opts.nested_mc_samples = 50000;
    for (const auto& name : {"example_9_1", "counterexample_6_1"}) {
        const auto rows = run_builtin_checks(name, opts);
        for (const auto& row : rows) {
            INFO(name, ": ", row.quantity, " measured ", row.measured, " expected ",
                 row.expected);
            CHECK(row.pass);
        }
    }
}

TEST_CASE("manifest checks pass for the remaining examples") {
    RunOptions opts;
    opts.riccati_knots = 1000;
    opts.sim_steps = 400;
    opts.n_paths = 4000;
    opts.nested_mc_samples = 50000;
    for (const auto& name : {"example_9_2", "example_9_3", "counterexample_6_2"}) {
        const auto rows = run_builtin_checks(name, opts);
        for (const auto& row : rows) {
            INFO(name, ": ", row.quantity, " measured ", row.measured, " expected ",
                 row.expected);
            CHECK(row.pass);
        }
    }
}

TEST_CASE("mu(T/2) bound |mu| <= 3/16 holds along simulated paths") {
    const LQProblem p = builtin_problem("example_9_3");
    const auto& params = p.weights.pathwise->mu;
    for (int i = 0; i < 200; ++i) {
        PathRng rng(4242ull, static_cast<std::uint64_t>(i));
        const double w = rng.normal() * std::sqrt(0.5);
        for (std::int64_t count : {0, 1, 2})
            CHECK(std::abs(malliavin_mu(0.5, w, count, params)) <= 3.0 / 16.0 + 1e-12);
    }
}
