// Domain types shared by every part of the resolver.
//
// Units are fixed across the library: distances in nautical miles, speeds
// in knots, times in hours, angles in radians. Conversions to seconds or
// degrees happen only at the file/CLI boundary.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cdr {

using FlightIndex = std::size_t;

inline constexpr double kSecondsPerHour = 3600.0;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Thrown for any structural problem with scenario input.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlightSpec {
  std::string id;
  Vec2 entry;
  Vec2 exit;
  double release_time = 0.0;  // hours
  double speed = 0.0;         // knots

  friend bool operator==(const FlightSpec&, const FlightSpec&) = default;
};

struct Sector {
  double width = 0.0;
  double height = 0.0;
  int level_count = 1;
  double t_start = 0.0;
  double t_end = 1.0;

  friend bool operator==(const Sector&, const Sector&) = default;
};

/// 4D event coordinate: planar position, flight-level index, time.
struct PosTime {
  double x = 0.0;
  double y = 0.0;
  int level = 0;
  double t = 0.0;

  friend bool operator==(const PosTime&, const PosTime&) = default;
};

/// Closest approach of two same-level flights on the sampled timeline.
struct MinDistanceEvent {
  FlightIndex flight_a = 0;
  FlightIndex flight_b = 0;
  double distance = 0.0;
  double time = 0.0;
  PosTime event_a;
  PosTime event_b;
};

/// A validated, immutable scenario. Flight ids are strings on disk and
/// dense indices everywhere else.
class Scenario {
 public:
  Scenario() = default;

  const Sector& sector() const { return sector_; }
  const std::vector<FlightSpec>& flights() const { return flights_; }
  const FlightSpec& flight(FlightIndex i) const { return flights_.at(i); }
  std::size_t size() const { return flights_.size(); }
  int level_count() const { return sector_.level_count; }

  /// Throws ScenarioError when the id is unknown.
  FlightIndex index_of(const std::string& id) const;

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.sector_ == b.sector_ && a.flights_ == b.flights_;
  }

 private:
  friend Scenario validate_scenario(const Sector& sector, std::vector<FlightSpec> flights);

  Sector sector_;
  std::vector<FlightSpec> flights_;
  std::unordered_map<std::string, FlightIndex> index_;
};

/// Checks every FlightSpec and Sector invariant and returns the scenario.
/// Throws ScenarioError naming the first violation found.
Scenario validate_scenario(const Sector& sector, std::vector<FlightSpec> flights);

/// True when the point lies on the sector rectangle's boundary.
bool on_boundary(const Sector& sector, Vec2 p, double tol = 1e-9);

/// Per-flight decision variables: level index and signed arc half-angle.
struct Assignment {
  std::vector<int> level;
  std::vector<double> theta;

  Assignment() = default;
  explicit Assignment(std::size_t n) : level(n, 0), theta(n, 0.0) {}

  std::size_t size() const { return level.size(); }
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct SolverParams {
  double separation = 5.0;                          // s, nmi
  double margin = 0.625;                            // s0, nmi
  double v0 = 533.0;                                // knots
  double dt = 2.5 / kSecondsPerHour;                // hours
  int max_iterations = 10;                          // N
  int max_dispersed_per_level = 2;                  // R
  int per_cluster_quota = 1;                        // r
  double theta_low = deg_to_rad(-25.0);
  double theta_high = deg_to_rad(25.0);
  double eta0 = deg_to_rad(2.0);
  double gd_terminate_threshold = 1e-7;             // T_GD
  double gd_speedup_threshold = 1e-3;               // T'_GD
  double eta_increase = 1.5;                        // W_U
  double eta_decrease = 0.5;                        // W_D
  int gd_max_steps = 500;
  double fd_step = deg_to_rad(0.25);
  std::uint64_t rng_seed = 0;

  /// s' = s + s0, the radius inside which events accrue score.
  double scoring_radius() const { return separation + margin; }

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

struct IterationMetrics {
  int iteration = 0;
  std::size_t conflicting_flights = 0;
  std::size_t violating_pairs = 0;

  friend bool operator==(const IterationMetrics&, const IterationMetrics&) = default;
};

struct FlightOutcome {
  int level = 0;
  double theta = 0.0;
  double path_length = 0.0;
  double extension_ratio = 1.0;
};

struct SolutionReport {
  Assignment final_assignment;
  // Entry 0 is the post-initialization state; entry h (h >= 1) is the
  // post-solve state of Cluster & Disperse iteration h.
  std::vector<IterationMetrics> per_iteration;
  std::vector<FlightIndex> unresolved_flights;  // ascending
  std::vector<FlightOutcome> per_flight;
  int peak_simultaneous = 0;
  int iterations_run = 0;
  bool converged = false;
};

}  // namespace cdr
