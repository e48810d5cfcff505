#include "cdr/engine.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "cdr/geometry.hpp"

namespace cdr {

namespace {

enum SeedPurpose : std::uint64_t { kInitClusters = 1, kLevelClusters = 2, kLevelSolve = 3, kDisperse = 4 };

std::uint64_t stream(std::uint64_t seed, int iteration, int level, SeedPurpose purpose) {
  return derive_seed(seed, {static_cast<std::uint64_t>(iteration), static_cast<std::uint64_t>(level),
                            static_cast<std::uint64_t>(purpose)});
}

bool within_bounds(std::span<const double> theta, const SolverParams& params) {
  return std::all_of(theta.begin(), theta.end(), [&](double t) {
    return t >= params.theta_low && t <= params.theta_high;
  });
}

}  // namespace

std::vector<std::vector<FlightIndex>> flights_by_level(const Assignment& assignment, int level_count) {
  std::vector<std::vector<FlightIndex>> out(static_cast<std::size_t>(level_count));
  for (FlightIndex f = 0; f < assignment.size(); ++f) {
    const int l = assignment.level[f];
    if (l < 0 || l >= level_count) throw std::out_of_range("level index out of range");
    out[static_cast<std::size_t>(l)].push_back(f);
  }
  return out;
}

void assign_round_robin(std::span<const std::vector<FlightIndex>> lists, int level_count,
                        Assignment& assignment) {
  std::size_t offset = 0;
  for (const auto& list : lists) {
    for (std::size_t j = 0; j < list.size(); ++j)
      assignment.level.at(list[j]) = static_cast<int>((j + offset) % static_cast<std::size_t>(level_count));
    offset += list.size();
  }
}

Assignment initialize_levels(const Scenario& scenario, const SolverParams& params,
                             std::uint64_t seed) {
  Assignment assignment(scenario.size());
  std::vector<FlightIndex> all(scenario.size());
  for (FlightIndex f = 0; f < all.size(); ++f) all[f] = f;

  const LevelConflicts ground = detect_level_conflicts(scenario, all, assignment.theta, 0, params);
  if (ground.violating.empty()) return assignment;

  const auto points = event_points(ground.violating);
  const auto clusters =
      cluster_level_events(points, ground.distances, params, stream(seed, 0, 0, kInitClusters));
  std::vector<std::vector<FlightIndex>> lists;
  lists.reserve(clusters.size());
  for (const auto& c : clusters) lists.push_back(c.exclusive);
  assign_round_robin(lists, scenario.level_count(), assignment);
  spdlog::info("initialization: {} violating pairs on one level, {} clusters",
               ground.violating.size(), clusters.size());
  return assignment;
}

std::vector<FlightIndex> select_dispersal(std::span<const std::vector<FlightIndex>> cluster_flights,
                                          const std::unordered_map<FlightIndex, double>& scores,
                                          int quota, int total) {
  std::vector<std::vector<FlightIndex>> ranked;
  for (const auto& list : cluster_flights) {
    std::vector<FlightIndex> r;
    for (FlightIndex f : list)
      if (scores.contains(f)) r.push_back(f);
    std::stable_sort(r.begin(), r.end(),
                     [&](FlightIndex a, FlightIndex b) { return scores.at(a) > scores.at(b); });
    ranked.push_back(std::move(r));
  }

  std::vector<FlightIndex> picked;
  std::vector<std::size_t> cursor(ranked.size(), 0);
  const auto want = static_cast<std::size_t>(std::max(total, 0));
  bool progress = true;
  while (picked.size() < want && progress) {
    progress = false;
    for (std::size_t c = 0; c < ranked.size() && picked.size() < want; ++c) {
      for (int q = 0; q < quota && cursor[c] < ranked[c].size() && picked.size() < want; ++q) {
        const FlightIndex f = ranked[c][cursor[c]++];
        if (std::find(picked.begin(), picked.end(), f) != picked.end()) continue;
        picked.push_back(f);
        progress = true;
      }
    }
  }
  return picked;
}

std::unordered_map<FlightIndex, double> flight_scores(const LevelConflicts& level,
                                                      const SolverParams& params) {
  const auto points = event_points(level.violating);
  const auto scores = ccs_scores(points, level.distances, params);
  std::unordered_map<FlightIndex, double> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto [it, fresh] = out.try_emplace(points[i].flight, scores[i]);
    if (!fresh) it->second = std::max(it->second, scores[i]);
  }
  return out;
}

Assignment disperse(const Assignment& assignment,
                    std::span<const std::vector<EventCluster>> level_clusters,
                    const ConflictReport& post_solve, const SolverParams& params, Rng& rng,
                    std::vector<FlightIndex>* moved) {
  Assignment next = assignment;
  const int levels = static_cast<int>(post_solve.levels.size());
  if (levels <= 1) return next;

  for (int e = 0; e < levels; ++e) {
    const auto& lc = post_solve.levels[static_cast<std::size_t>(e)];
    if (lc.violating.empty()) continue;
    const auto scores = flight_scores(lc, params);

    std::vector<std::vector<FlightIndex>> lists;
    if (static_cast<std::size_t>(e) < level_clusters.size())
      for (const auto& c : level_clusters[static_cast<std::size_t>(e)]) lists.push_back(c.exclusive);

    for (FlightIndex f : select_dispersal(lists, scores, params.per_cluster_quota,
                                          params.max_dispersed_per_level)) {
      auto target = static_cast<int>(rng.index(static_cast<std::uint64_t>(levels - 1)));
      if (target >= e) ++target;
      next.level[f] = target;
      next.theta[f] = 0.0;
      if (moved) moved->push_back(f);
    }
  }
  return next;
}

IterationState make_initial_state(const Scenario& scenario, Assignment assignment,
                                  const SolverParams& params) {
  IterationState state;
  state.level_flights = flights_by_level(assignment, scenario.level_count());
  const auto report = detect_conflicts(scenario, assignment, params);
  state.metrics = report.metrics(0);
  state.converged = report.clear();
  state.assignment = std::move(assignment);
  return state;
}

IterationState run_iteration(const Scenario& scenario, const IterationState& state,
                             const PlanarSolver& solver, const SolverParams& params,
                             std::uint64_t seed, bool allow_disperse) {
  IterationState next;
  next.iteration = state.iteration + 1;
  next.assignment = state.assignment;
  const int levels = scenario.level_count();
  const auto by_level = flights_by_level(state.assignment, levels);

  // Cluster the events present at the start of the round.
  const auto current = detect_conflicts(scenario, state.assignment, params);
  next.level_clusters.resize(static_cast<std::size_t>(levels));
  for (int e = 0; e < levels; ++e) {
    const auto& lc = current.levels[static_cast<std::size_t>(e)];
    const auto points = event_points(lc.violating);
    next.level_clusters[static_cast<std::size_t>(e)] = cluster_level_events(
        points, lc.distances, params, stream(seed, next.iteration, e, kLevelClusters));
  }

  for (int e = 0; e < levels; ++e) {
    const auto& flights = by_level[static_cast<std::size_t>(e)];
    if (flights.empty()) continue;
    try {
      LevelSolution sol = solver.solve(scenario, flights, e, params,
                                       stream(seed, next.iteration, e, kLevelSolve));
      if (sol.theta.size() != flights.size() || !within_bounds(sol.theta, params))
        throw std::runtime_error("solver returned an invalid angle vector");
      for (std::size_t i = 0; i < flights.size(); ++i) next.assignment.theta[flights[i]] = sol.theta[i];
    } catch (const std::exception& ex) {
      spdlog::warn("iteration {} level {}: {} failed ({}); keeping previous trajectories",
                   next.iteration, e, solver.name(), ex.what());
    }
  }

  const auto post = detect_conflicts(scenario, next.assignment, params);
  next.metrics = post.metrics(next.iteration);
  next.converged = post.clear();
  if (!next.converged && allow_disperse) {
    Rng rng(stream(seed, next.iteration, 0, kDisperse));
    next.assignment = disperse(next.assignment, next.level_clusters, post, params, rng, &next.dispersed);
  }
  next.level_flights = flights_by_level(next.assignment, levels);
  spdlog::info("iteration {}: {} conflicting flights, {} violating pairs, {} dispersed",
               next.iteration, next.metrics.conflicting_flights, next.metrics.violating_pairs,
               next.dispersed.size());
  return next;
}

SolutionReport solve(const Scenario& scenario, const SolverParams& params,
                     const PlanarSolver& solver, std::uint64_t seed) {
  params.validate();
  SolutionReport report;
  IterationState state = make_initial_state(scenario, initialize_levels(scenario, params, seed), params);
  report.per_iteration.push_back(state.metrics);

  while (!state.converged && state.iteration < params.max_iterations) {
    const bool last = state.iteration + 1 == params.max_iterations;
    state = run_iteration(scenario, state, solver, params, seed, !last);
    report.per_iteration.push_back(state.metrics);
  }

  report.final_assignment = state.assignment;
  report.iterations_run = state.iteration;
  const auto final_conflicts = detect_conflicts(scenario, report.final_assignment, params);
  report.unresolved_flights = final_conflicts.violating_flights;
  report.converged = final_conflicts.clear();

  report.per_flight.reserve(scenario.size());
  for (FlightIndex f = 0; f < scenario.size(); ++f) {
    const auto& fl = scenario.flight(f);
    FlightOutcome out;
    out.level = report.final_assignment.level[f];
    out.theta = report.final_assignment.theta[f];
    out.path_length = path_length(fl.entry, fl.exit, out.theta);
    out.extension_ratio = out.path_length / distance(fl.entry, fl.exit);
    report.per_flight.push_back(out);
  }
  report.peak_simultaneous = peak_simultaneous(scenario, report.final_assignment.theta, params);
  return report;
}

}  // namespace cdr
