#include "cdr/model.hpp"

#include <unordered_set>

namespace cdr {

FlightIndex Scenario::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ScenarioError("unknown flight id '" + id + "'");
  return it->second;
}

bool on_boundary(const Sector& sector, Vec2 p, double tol) {
  const bool in_x = p.x >= -tol && p.x <= sector.width + tol;
  const bool in_y = p.y >= -tol && p.y <= sector.height + tol;
  if (!in_x || !in_y) return false;
  return std::abs(p.x) <= tol || std::abs(p.x - sector.width) <= tol || std::abs(p.y) <= tol ||
         std::abs(p.y - sector.height) <= tol;
}

Scenario validate_scenario(const Sector& sector, std::vector<FlightSpec> flights) {
  if (!(sector.width > 0.0) || !(sector.height > 0.0))
    throw ScenarioError("sector dimensions must be positive");
  if (sector.level_count < 1) throw ScenarioError("sector needs at least one flight level");
  if (!(sector.t_start < sector.t_end)) throw ScenarioError("sector time window is empty");

  Scenario sc;
  sc.sector_ = sector;
  for (std::size_t i = 0; i < flights.size(); ++i) {
    const FlightSpec& f = flights[i];
    const std::string tag = "flight '" + f.id + "': ";
    if (f.id.empty()) throw ScenarioError("flight #" + std::to_string(i) + ": empty id");
    if (!sc.index_.emplace(f.id, i).second) throw ScenarioError(tag + "duplicate id");
    if (f.entry == f.exit) throw ScenarioError(tag + "degenerate flight (entry equals exit)");
    if (!(f.speed > 0.0)) throw ScenarioError(tag + "nonpositive speed");
    if (!(f.release_time >= 0.0)) throw ScenarioError(tag + "negative release time");
    if (!on_boundary(sector, f.entry)) throw ScenarioError(tag + "entry off sector boundary");
    if (!on_boundary(sector, f.exit)) throw ScenarioError(tag + "exit off sector boundary");
  }
  sc.flights_ = std::move(flights);
  return sc;
}

void SolverParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid solver parameter: ") + what);
  };
  require(separation > 0.0, "separation must be > 0");
  require(margin >= 0.0, "margin must be >= 0");
  require(v0 > 0.0, "v0 must be > 0");
  require(dt > 0.0, "dt must be > 0");
  require(max_iterations >= 0, "iterations must be >= 0");
  require(max_dispersed_per_level >= 0, "R must be >= 0");
  require(per_cluster_quota >= 1, "r must be >= 1");
  require(theta_low < 0.0 && 0.0 < theta_high, "theta bounds must straddle 0");
  require(theta_high <= std::numbers::pi / 2 && theta_low >= -std::numbers::pi / 2,
          "theta bounds must lie within [-90, 90] degrees");
  require(eta0 > 0.0, "eta0 must be > 0");
  require(0.0 < gd_terminate_threshold && gd_terminate_threshold < gd_speedup_threshold,
          "need 0 < T_GD < T'_GD");
  require(0.0 < eta_decrease && eta_decrease < 1.0 && eta_increase > 1.0,
          "need 0 < W_D < 1 < W_U");
  require(gd_max_steps >= 1, "gd_max_steps must be >= 1");
  require(fd_step > 0.0, "fd_step must be > 0");
}

}  // namespace cdr
