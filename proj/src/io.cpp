#include "cdr/io.hpp"

#include <fstream>
#include <unordered_set>

namespace cdr {

namespace fs = std::filesystem;

namespace {

Vec2 point_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(std::string(what) + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json scenario_to_json(const Scenario& scenario) {
  const Sector& s = scenario.sector();
  json flights = json::array();
  for (const auto& f : scenario.flights()) {
    flights.push_back({{"id", f.id},
                       {"entry", {f.entry.x, f.entry.y}},
                       {"exit", {f.exit.x, f.exit.y}},
                       {"release", f.release_time},
                       {"speed", f.speed}});
  }
  return {{"sector",
           {{"width", s.width}, {"height", s.height}, {"levels", s.level_count},
            {"t_start", s.t_start}, {"t_end", s.t_end}}},
          {"flights", std::move(flights)}};
}

Scenario scenario_from_json(const json& j) {
  try {
    const json& js = j.at("sector");
    Sector sector{js.at("width").get<double>(), js.at("height").get<double>(),
                  js.at("levels").get<int>(), js.at("t_start").get<double>(),
                  js.at("t_end").get<double>()};
    std::vector<FlightSpec> flights;
    for (const json& jf : j.at("flights")) {
      FlightSpec f;
      f.id = jf.at("id").get<std::string>();
      f.entry = point_from_json(jf.at("entry"), "entry");
      f.exit = point_from_json(jf.at("exit"), "exit");
      f.release_time = jf.at("release").get<double>();
      f.speed = jf.at("speed").get<double>();
      flights.push_back(std::move(f));
    }
    return validate_scenario(sector, std::move(flights));
  } catch (const json::exception& ex) {
    throw ScenarioError(std::string("malformed scenario: ") + ex.what());
  }
}

json solution_to_json(const Scenario& scenario, const SolutionReport& report) {
  json flights = json::array();
  for (FlightIndex f = 0; f < scenario.size(); ++f) {
    const auto& o = report.per_flight.at(f);
    flights.push_back({{"id", scenario.flight(f).id},
                       {"level", o.level},
                       {"theta_deg", rad_to_deg(o.theta)},
                       {"path_length", o.path_length},
                       {"extension", o.extension_ratio}});
  }
  json unresolved = json::array();
  for (FlightIndex f : report.unresolved_flights) unresolved.push_back(scenario.flight(f).id);
  json iterations = json::array();
  for (const auto& m : report.per_iteration)
    iterations.push_back({{"i", m.iteration},
                          {"conflicting_flights", m.conflicting_flights},
                          {"violating_pairs", m.violating_pairs}});
  return {{"flights", std::move(flights)},
          {"unresolved", std::move(unresolved)},
          {"iterations", std::move(iterations)}};
}

Assignment assignment_from_solution(const Scenario& scenario, const json& solution) {
  Assignment a(scenario.size());
  std::vector<bool> seen(scenario.size(), false);
  try {
    for (const json& jf : solution.at("flights")) {
      const FlightIndex f = scenario.index_of(jf.at("id").get<std::string>());
      if (seen[f]) throw ScenarioError("solution lists flight '" + scenario.flight(f).id + "' twice");
      seen[f] = true;
      a.level[f] = jf.at("level").get<int>();
      a.theta[f] = deg_to_rad(jf.at("theta_deg").get<double>());
      if (a.level[f] < 0 || a.level[f] >= scenario.level_count())
        throw ScenarioError("solution level out of range for '" + scenario.flight(f).id + "'");
    }
  } catch (const json::exception& ex) {
    throw ScenarioError(std::string("malformed solution: ") + ex.what());
  }
  for (FlightIndex f = 0; f < scenario.size(); ++f)
    if (!seen[f]) throw ScenarioError("solution is missing flight '" + scenario.flight(f).id + "'");
  return a;
}

SolverParams params_from_json(const json& j, SolverParams p) {
  if (!j.is_object()) throw std::invalid_argument("parameter file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "separation") p.separation = v.get<double>();
    else if (key == "margin") p.margin = v.get<double>();
    else if (key == "v0") p.v0 = v.get<double>();
    else if (key == "dt_seconds") p.dt = v.get<double>() / kSecondsPerHour;
    else if (key == "iterations") p.max_iterations = v.get<int>();
    else if (key == "big_r") p.max_dispersed_per_level = v.get<int>();
    else if (key == "r") p.per_cluster_quota = v.get<int>();
    else if (key == "theta_low_deg") p.theta_low = deg_to_rad(v.get<double>());
    else if (key == "theta_high_deg") p.theta_high = deg_to_rad(v.get<double>());
    else if (key == "eta0_deg") p.eta0 = deg_to_rad(v.get<double>());
    else if (key == "t_gd") p.gd_terminate_threshold = v.get<double>();
    else if (key == "t_gd_prime") p.gd_speedup_threshold = v.get<double>();
    else if (key == "w_u") p.eta_increase = v.get<double>();
    else if (key == "w_d") p.eta_decrease = v.get<double>();
    else if (key == "gd_max_steps") p.gd_max_steps = v.get<int>();
    else if (key == "fd_step_deg") p.fd_step = deg_to_rad(v.get<double>());
    else if (key == "seed") p.rng_seed = v.get<std::uint64_t>();
    else throw std::invalid_argument("unknown parameter '" + key + "'");
  }
  return p;
}

json params_to_json(const SolverParams& p) {
  return {{"separation", p.separation},
          {"margin", p.margin},
          {"v0", p.v0},
          {"dt_seconds", p.dt * kSecondsPerHour},
          {"iterations", p.max_iterations},
          {"big_r", p.max_dispersed_per_level},
          {"r", p.per_cluster_quota},
          {"theta_low_deg", rad_to_deg(p.theta_low)},
          {"theta_high_deg", rad_to_deg(p.theta_high)},
          {"eta0_deg", rad_to_deg(p.eta0)},
          {"t_gd", p.gd_terminate_threshold},
          {"t_gd_prime", p.gd_speedup_threshold},
          {"w_u", p.eta_increase},
          {"w_d", p.eta_decrease},
          {"gd_max_steps", p.gd_max_steps},
          {"fd_step_deg", rad_to_deg(p.fd_step)},
          {"seed", p.rng_seed}};
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    throw ScenarioError(path.string() + ": " + ex.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

}  // namespace cdr
