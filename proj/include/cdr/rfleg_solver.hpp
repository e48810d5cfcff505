// RF-leg planar resolver: bends flights onto constant-radius arcs and runs a
// normalized-gradient descent on the arc half-angles of each conflict
// cluster, minimizing the cluster's total conflict score.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cdr/conflict.hpp"
#include "cdr/planar_solver.hpp"

namespace cdr {

enum class StepAction { backtrack, accept_and_stop, accept_speed_up, accept_hold };

struct StepDecision {
  StepAction action;
  double eta;  // learning rate to use next

  bool accepted() const { return action != StepAction::backtrack; }
};

/// The four adaptive rules, keyed on improvement = tcs_before - tcs_after:
///   improvement < 0             -> backtrack, eta * W_D
///   0 <= improvement <= T_GD    -> accept and stop
///   T_GD < improvement <= T'_GD -> accept, eta * W_U
///   improvement > T'_GD         -> accept, eta unchanged
StepDecision descent_step_rules(double improvement, double eta, const SolverParams& params);

/// Componentwise clamp into [theta_low, theta_high] (no angular wraparound).
std::vector<double> clip_theta(std::vector<double> theta, const SolverParams& params);

using ScalarObjective = std::function<double(std::span<const double>)>;

/// Central differences with step fd_step; one-sided where the symmetric
/// probe would leave the bounds.
std::vector<double> numerical_gradient(const ScalarObjective& f, std::span<const double> theta,
                                       const SolverParams& params);

enum class StopReason { converged, step_cap, all_resolved };

struct DescentStep {
  std::vector<double> theta;
  double tcs = 0.0;
  double eta = 0.0;
  bool accepted = false;
};

struct DescentTrace {
  std::vector<DescentStep> steps;  // steps[0] is the starting point
  StopReason stop_reason = StopReason::converged;
  int trial_evaluations = 0;
};

struct ObjectiveValue {
  double tcs = 0.0;
  bool resolved = false;  // every tracked pair at or beyond the separation
};

using ClusterObjectiveFn = std::function<ObjectiveValue(std::span<const double>)>;

/// Descent on `theta` in place. Stops on the T_GD rule, on a zero gradient,
/// when eta falls below 1e-12, when the objective reports resolved, or after
/// gd_max_steps trial evaluations.
DescentTrace optimize_cluster(const ClusterObjectiveFn& objective, std::vector<double>& theta,
                              const SolverParams& params);

/// tcs of one cluster as a function of its free flights' angles. The pair
/// set is fixed at construction; positions and closest approaches are
/// re-evaluated for every call.
class ClusterObjective {
 public:
  ClusterObjective(const Scenario& scenario, const SolverParams& params, int level,
                   std::span<const std::pair<FlightIndex, FlightIndex>> pairs,
                   std::span<const FlightIndex> free_flights, std::span<const double> theta);

  ObjectiveValue operator()(std::span<const double> free_theta);

  std::size_t dimension() const { return free_slot_.size(); }

 private:
  const Scenario& scenario_;
  const SolverParams& params_;
  TimeGrid grid_;
  int level_;
  std::vector<FlightIndex> context_;                         // all flights touched
  std::vector<bool> is_free_;                                // per context slot
  std::vector<std::size_t> free_slot_;                       // free index -> context slot
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;   // context slots
  std::vector<SampledTrack> tracks_;
  PairDistances fixed_distances_;                            // frozen-frozen pairs
};

class RfLegSolver final : public PlanarSolver {
 public:
  std::string_view name() const override { return "rf-leg"; }

  /// Starts every flight straight, clusters the level's violating events
  /// once, then descends cluster by cluster in descending score order. A
  /// flight is optimized only in the first cluster that lists it. A cluster
  /// left unresolved is retried from small same-sign and alternating-sign
  /// offsets, keeping the lowest score.
  LevelSolution solve(const Scenario& scenario, std::span<const FlightIndex> flights, int level,
                      const SolverParams& params, std::uint64_t seed) const override;
};

}  // namespace cdr
