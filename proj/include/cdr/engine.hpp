// Cluster & Disperse: spread conflict clusters across flight levels, solve
// each level with a planar solver, then move the worst offenders of every
// remaining cluster to random other levels and repeat.

#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "cdr/clustering.hpp"
#include "cdr/conflict.hpp"
#include "cdr/planar_solver.hpp"
#include "cdr/rng.hpp"

namespace cdr {

struct IterationState {
  int iteration = 0;
  Assignment assignment;
  std::vector<std::vector<FlightIndex>> level_flights;    // A_e, ascending
  std::vector<std::vector<EventCluster>> level_clusters;  // clusters found this iteration
  IterationMetrics metrics;
  bool converged = false;
  std::vector<FlightIndex> dispersed;                     // flights moved by this iteration
};

/// Flights of each level, ascending.
std::vector<std::vector<FlightIndex>> flights_by_level(const Assignment& assignment, int level_count);

/// Cyclic level assignment: the j-th flight (0-based) of the i-th list goes
/// to (j + sum of earlier list sizes) mod level_count.
void assign_round_robin(std::span<const std::vector<FlightIndex>> lists, int level_count,
                        Assignment& assignment);

/// Everyone straight on level 0, violating events clustered, then clusters
/// spread over the levels round robin. Conflict-free flights stay on level 0.
Assignment initialize_levels(const Scenario& scenario, const SolverParams& params,
                             std::uint64_t seed);

/// Sweeps the clusters in order; each sweep takes up to `quota` of the
/// highest-scoring not-yet-taken flights from each cluster, stopping once
/// `total` flights are picked. Flights without a score are not candidates.
std::vector<FlightIndex> select_dispersal(std::span<const std::vector<FlightIndex>> cluster_flights,
                                          const std::unordered_map<FlightIndex, double>& scores,
                                          int quota, int total);

/// S^a for every flight owning a violating event of the level.
std::unordered_map<FlightIndex, double> flight_scores(const LevelConflicts& level,
                                                      const SolverParams& params);

/// Moves the selected flights of every level to a uniformly chosen other
/// level with theta reset to 0. No-op for a single-level sector.
Assignment disperse(const Assignment& assignment,
                    std::span<const std::vector<EventCluster>> level_clusters,
                    const ConflictReport& post_solve, const SolverParams& params, Rng& rng,
                    std::vector<FlightIndex>* moved = nullptr);

IterationState make_initial_state(const Scenario& scenario, Assignment assignment,
                                  const SolverParams& params);

/// One cluster / solve / disperse round. Disperse runs only when conflicts
/// remain after the solve and `allow_disperse` is set. A level whose solver
/// throws or returns out-of-bounds angles keeps its previous trajectories.
IterationState run_iteration(const Scenario& scenario, const IterationState& state,
                             const PlanarSolver& solver, const SolverParams& params,
                             std::uint64_t seed, bool allow_disperse = true);

/// Full run: initialization, then up to max_iterations rounds, stopping as
/// soon as a round leaves no conflict. The final round never disperses, so
/// the reported assignment is always a solver output.
SolutionReport solve(const Scenario& scenario, const SolverParams& params,
                     const PlanarSolver& solver, std::uint64_t seed);

}  // namespace cdr
