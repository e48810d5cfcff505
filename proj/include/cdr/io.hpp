// On-disk formats. Scenario and solution files are JSON in nmi / knots /
// hours; angles are written in degrees.
//
// scenario: {"sector": {"width", "height", "levels", "t_start", "t_end"},
//            "flights": [{"id", "entry": [x, y], "exit": [x, y], "release", "speed"}]}
// solution: {"flights": [{"id", "level", "theta_deg", "path_length", "extension"}],
//            "unresolved": [id, ...],
//            "iterations": [{"i", "conflicting_flights", "violating_pairs"}]}

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "cdr/model.hpp"

namespace cdr {

using json = nlohmann::json;

json scenario_to_json(const Scenario& scenario);
/// Throws ScenarioError on malformed or invalid content.
Scenario scenario_from_json(const json& j);

json solution_to_json(const Scenario& scenario, const SolutionReport& report);

/// Levels and angles from a solution file, indexed like the scenario.
/// Throws ScenarioError when ids do not match the scenario one-to-one.
Assignment assignment_from_solution(const Scenario& scenario, const json& solution);

/// Overrides fields of `base` from a flat JSON object. Keys: separation,
/// margin, v0, dt_seconds, iterations, big_r, r, theta_low_deg,
/// theta_high_deg, eta0_deg, t_gd, t_gd_prime, w_u, w_d, gd_max_steps,
/// fd_step_deg, seed. Unknown keys are rejected.
SolverParams params_from_json(const json& j, SolverParams base = {});
json params_to_json(const SolverParams& params);

json read_json(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);

}  // namespace cdr
