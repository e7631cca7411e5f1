#pragma once

#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "jumplq/builtin.hpp"
#include "jumplq/costs.hpp"
#include "jumplq/problem.hpp"
#include "jumplq/riccati.hpp"
#include "jumplq/simulate.hpp"
#include "jumplq/verify.hpp"

namespace jumplq {

/// Problem config schema (JSON):
///   {
///     "n": 1, "m": 1, "T": 1.0,
///     "jump_measure": [{"id": 0, "intensity": 1.0}],
///     "coefficients": {"kind": "builtin", "name": "example_9_1"}
///                   | {"kind": "constant", "A": [[..]], "B": .., "C": ..,
///                      "D": .., "E": [per-mark matrix], "F": [per-mark matrix]}
///                   | {"kind": "grid", "times": [..], "A": [per-time matrix], ...},
///     "weights": {"kind": "builtin"|"constant"|"grid", ...}  // Q, S, R, G
///   }
/// Matrices are row-major arrays of arrays.
LQProblem problem_from_json(const nlohmann::json& config);
LQProblem load_problem_file(const std::string& path);

nlohmann::json to_json(const MCEstimate& estimate);
nlohmann::json to_json(const ManifestEntry& entry);
nlohmann::json to_json(const ResidualReport& report);
nlohmann::json to_json(const GapReport& report);
nlohmann::json to_json(const GramReport& report);
nlohmann::json to_json(const UnifConvexReport& report);
nlohmann::json to_json(const StandardConditionReport& report);

/// CSV: t, P_11..P_nn (row major), Theta_11..Theta_mn, min_eig_R_hat,
/// min_abs_det_jump_multiplier; full double precision so reruns are
/// byte-identical.
void write_riccati_csv(std::ostream& os, const RiccatiSolution& sol);

/// CSV: t, X_1..X_n, u_1..u_m, is_jump, mark_id. The control column holds
/// the value applied on the interval starting at each knot (repeated on the
/// final row).
void write_path_csv(std::ostream& os, const SamplePath& path);

}  // namespace jumplq
