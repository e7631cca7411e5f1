#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumplq/problem.hpp"

namespace jumplq {

/// Shared tolerances; every acceptance-style check reads from here.
namespace tol {
inline constexpr double riccati_golden = 1e-8;       // |P - closed form|
inline constexpr double theta_zero = 1e-10;          // |Theta| where the gain vanishes
inline constexpr double multiplier_singular = 1e-12; // |det(I+E+F Theta)| flagged singular
inline constexpr double rhat_formula = 1e-12;        // algebraic R_hat identities
inline constexpr double stderr_sigmas = 3.0;         // Monte-Carlo bands
inline constexpr double exact = 1e-12;               // "exact" floating-point checks
}  // namespace tol

/// Names: example_9_1, example_9_2, example_9_3, counterexample_6_1,
/// counterexample_6_2.
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);

struct BuiltinOverrides {
    std::optional<double> horizon;
    std::optional<double> intensity;  // lambda(Z)
};

/// Validated problem for a built-in example. Throws UnknownExample.
LQProblem builtin_problem(const std::string& name, const BuiltinOverrides& overrides = {});

/// Named coefficient/weight providers, so config files can reference the
/// built-in data with a different horizon or intensity.
CoefficientSet builtin_coefficients(const std::string& name, double horizon, double intensity);
WeightSet builtin_weights(const std::string& name, double horizon, double intensity);

/// One row of an example's expected-vs-measured manifest.
struct ManifestEntry {
    std::string quantity;
    double expected = 0.0;
    double measured = 0.0;
    double tolerance = 0.0;   // for statistical rows: 3 * stderr
    bool statistical = false;
    bool pass = false;
    std::string note;
};

struct RunOptions {
    std::size_t riccati_knots = 4000;
    std::size_t sim_steps = 2000;
    std::size_t n_paths = 20000;
    std::size_t nested_mc_samples = 200000;  // for the closed-form-vs-MC probe
    std::uint64_t seed = 20260801;
    int workers = 0;
};

/// Reproduces every quantity the example pins down, using only the generic
/// solvers, and reports measured-vs-expected rows.
std::vector<ManifestEntry> run_builtin_checks(const std::string& name, const RunOptions& opts);

}  // namespace jumplq
