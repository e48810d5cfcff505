// Scenario builders and brute-force checks shared by the unit tests and the
// acceptance runner.

#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cdr/conflict.hpp"
#include "cdr/geometry.hpp"
#include "cdr/rfleg_solver.hpp"
#include "oracles.hpp"

namespace cdr::testing {

/// Two flights of equal speed crossing at the centre of a square sector at
/// the same instant, on perpendicular headings.
inline Scenario crossing_pair(double half = 20.0, double speed = 533.0, int levels = 1) {
  const Sector sector{2 * half, 2 * half, levels, 0.0, 1.0};
  return validate_scenario(sector, {{"X", {0, half}, {2 * half, half}, 0.0, speed},
                                    {"Y", {half, 0}, {half, 2 * half}, 0.0, speed}});
}

/// A random point on the boundary of a width x height rectangle.
template <class Gen>
Vec2 boundary_point(Gen& gen, double width, double height) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double per = 2 * (width + height);
  double s = u(gen) * per;
  if (s < width) return {s, 0.0};
  s -= width;
  if (s < height) return {width, s};
  s -= height;
  if (s < width) return {width - s, height};
  s -= width;
  return {0.0, height - s};
}

struct MicroCase {
  Scenario scenario;
  Assignment assignment;
};

/// Up to five flights in a 20 x 20 sector over a short window, with random
/// speeds, releases, levels and arc angles; built to produce near misses.
template <class Gen>
MicroCase random_micro_case(Gen& gen) {
  std::uniform_int_distribution<int> count(2, 5), levels(1, 2);
  std::uniform_real_distribution<double> speed(200.0, 600.0), release(0.0, 0.03),
      theta(-std::numbers::pi / 7, std::numbers::pi / 7), coin(0.0, 1.0), t_end(0.04, 0.12);
  const int n = count(gen);
  const Sector sector{20.0, 20.0, levels(gen), 0.0, t_end(gen)};
  std::vector<FlightSpec> flights;
  while (static_cast<int>(flights.size()) < n) {
    const Vec2 a = boundary_point(gen, sector.width, sector.height);
    const Vec2 b = boundary_point(gen, sector.width, sector.height);
    if (distance(a, b) < 1.0) continue;
    flights.push_back({"M" + std::to_string(flights.size()), a, b, release(gen), speed(gen)});
  }
  MicroCase mc{validate_scenario(sector, std::move(flights)), Assignment(static_cast<std::size_t>(n))};
  std::uniform_int_distribution<int> level(0, sector.level_count - 1);
  for (int i = 0; i < n; ++i) {
    mc.assignment.level[i] = level(gen);
    mc.assignment.theta[i] = coin(gen) < 0.3 ? 0.0 : theta(gen);
  }
  return mc;
}

/// Brute-force closest sample of flights a and b under the assignment.
inline std::optional<oracle::BruteEvent> brute_pair(const Scenario& sc, const Assignment& asg,
                                                    FlightIndex a, FlightIndex b,
                                                    const SolverParams& params) {
  const FlightIndex ids[2] = {a, b};
  auto airborne = [&](int i, double t) {
    const auto& f = sc.flight(ids[i]);
    return t >= f.release_time && t <= exit_time(f, asg.theta[ids[i]]);
  };
  auto pos = [&](int i, double t) { return arc_position(sc.flight(ids[i]), asg.theta[ids[i]], t); };
  return oracle::brute_min_distance(sc.sector().t_start, sc.sector().t_end, params.dt, pos, airborne);
}

struct OracleMismatch {
  std::size_t checked_pairs = 0;
  std::size_t mismatches = 0;
  std::string first;
};

/// Compares min_distance_event and detect_conflicts against the brute-force
/// scan on every same-level pair. Equality is exact: both are grid based.
inline OracleMismatch compare_with_oracle(const Scenario& sc, const Assignment& asg,
                                          const SolverParams& params) {
  OracleMismatch out;
  const ConflictReport report = detect_conflicts(sc, asg, params);
  auto note = [&](const std::string& what) {
    if (out.mismatches++ == 0) out.first = what;
  };
  for (FlightIndex a = 0; a < sc.size(); ++a) {
    for (FlightIndex b = a + 1; b < sc.size(); ++b) {
      if (asg.level[a] != asg.level[b]) continue;
      ++out.checked_pairs;
      const auto brute = brute_pair(sc, asg, a, b, params);
      const auto ev = min_distance_event(sc, asg, a, b, params);
      const std::string tag = std::to_string(a) + "-" + std::to_string(b);
      if (brute.has_value() != ev.has_value()) {
        note("presence " + tag);
        continue;
      }
      bool reported = false;
      for (const auto& v : report.levels[static_cast<std::size_t>(asg.level[a])].violating)
        reported |= (v.flight_a == a && v.flight_b == b);
      const bool violates = brute && brute->distance < params.separation;
      if (reported != violates) note("violation flag " + tag);
      if (!brute) continue;
      if (ev->distance != brute->distance || ev->time != brute->time) note("event " + tag);
      if (ev->event_a.x != brute->pa.x || ev->event_a.y != brute->pa.y ||
          ev->event_b.x != brute->pb.x || ev->event_b.y != brute->pb.y)
        note("positions " + tag);
    }
  }
  return out;
}

/// n flights on one level all crossing the centre of a 40 x 40 sector at
/// t = 0.06 h, fanned over 180 degrees of heading. Beyond a handful of
/// flights no arc within the default bounds can separate them.
inline Scenario funnel(int n, double speed = 533.0) {
  const double half = 20.0;
  std::vector<FlightSpec> flights;
  for (int i = 0; i < n; ++i) {
    const double phi = std::numbers::pi * i / n;
    const Vec2 dir{std::cos(phi), std::sin(phi)};
    // distance from the centre to the square's edge along dir
    const double reach = half / std::max(std::abs(dir.x), std::abs(dir.y));
    const Vec2 entry{half - reach * dir.x, half - reach * dir.y};
    const Vec2 exit{half + reach * dir.x, half + reach * dir.y};
    flights.push_back({"U" + std::to_string(i), entry, exit, 0.06 - reach / speed, speed});
  }
  return validate_scenario({2 * half, 2 * half, 1, 0.0, 1.0}, std::move(flights));
}

/// A single-level scenario of 6 to 10 flights in a 30 x 30 sector released
/// within two minutes of one another, retried until it has a violation.
template <class Gen>
Scenario random_dense_level(Gen& gen, const SolverParams& params) {
  std::uniform_int_distribution<int> count(6, 10);
  std::uniform_real_distribution<double> release(0.0, 0.035);
  for (;;) {
    const int n = count(gen);
    std::vector<FlightSpec> flights;
    while (static_cast<int>(flights.size()) < n) {
      const Vec2 a = boundary_point(gen, 30.0, 30.0), b = boundary_point(gen, 30.0, 30.0);
      if (distance(a, b) < 15.0) continue;
      flights.push_back({"D" + std::to_string(flights.size()), a, b, release(gen), 533.0});
    }
    Scenario sc = validate_scenario({30.0, 30.0, 1, 0.0, 1.0}, std::move(flights));
    if (!detect_conflicts(sc, Assignment(sc.size()), params).clear()) return sc;
  }
}

struct DescentCheck {
  bool monotone = true;      // accepted tcs never rises
  bool in_bounds = true;     // every trial within [theta_low, theta_high]
  int trials = 0;
  double tcs_start = 0.0;
  double tcs_end = 0.0;
  StopReason stop = StopReason::converged;
};

/// Descends one cluster made of every violating pair of a single-level
/// scenario, with all of its flights free, starting straight.
inline DescentCheck check_descent(const Scenario& sc, const SolverParams& params) {
  const std::vector<double> zero(sc.size(), 0.0);
  std::vector<FlightIndex> all(sc.size());
  for (FlightIndex f = 0; f < sc.size(); ++f) all[f] = f;
  const LevelConflicts lc = detect_level_conflicts(sc, all, zero, 0, params);
  std::vector<std::pair<FlightIndex, FlightIndex>> pairs;
  for (const auto& ev : lc.violating) pairs.emplace_back(ev.flight_a, ev.flight_b);
  const auto free_flights = lc.violating_flights();

  ClusterObjective objective(sc, params, 0, pairs, free_flights, zero);
  std::vector<double> theta(free_flights.size(), 0.0);
  const DescentTrace trace = optimize_cluster(std::ref(objective), theta, params);

  DescentCheck out;
  out.trials = trace.trial_evaluations;
  out.stop = trace.stop_reason;
  out.tcs_start = trace.steps.front().tcs;
  double last = out.tcs_start;
  for (const auto& step : trace.steps) {
    for (double t : step.theta) out.in_bounds &= (t >= params.theta_low && t <= params.theta_high);
    if (!step.accepted) continue;
    out.monotone &= step.tcs <= last;
    last = step.tcs;
  }
  out.tcs_end = last;
  return out;
}

}  // namespace cdr::testing
