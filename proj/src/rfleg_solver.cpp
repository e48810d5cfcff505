#include "cdr/rfleg_solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <spdlog/spdlog.h>

#include "cdr/clustering.hpp"

namespace cdr {

namespace {
constexpr double kMinEta = 1e-12;

struct RestartPattern {
  bool alternate;
  double base;
  double sign(std::size_t k) const { return alternate && (k % 2 == 1) ? -base : base; }
};
constexpr RestartPattern kRestartPatterns[] = {{false, 1.0}, {false, -1.0}, {true, 1.0}, {true, -1.0}};
}

StepDecision descent_step_rules(double improvement, double eta, const SolverParams& params) {
  if (improvement < 0.0) return {StepAction::backtrack, eta * params.eta_decrease};
  if (improvement <= params.gd_terminate_threshold) return {StepAction::accept_and_stop, eta};
  if (improvement <= params.gd_speedup_threshold)
    return {StepAction::accept_speed_up, eta * params.eta_increase};
  return {StepAction::accept_hold, eta};
}

std::vector<double> clip_theta(std::vector<double> theta, const SolverParams& params) {
  for (double& t : theta) t = std::clamp(t, params.theta_low, params.theta_high);
  return theta;
}

std::vector<double> numerical_gradient(const ScalarObjective& f, std::span<const double> theta,
                                       const SolverParams& params) {
  std::vector<double> probe(theta.begin(), theta.end());
  std::vector<double> grad(theta.size(), 0.0);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double hi = std::min(theta[i] + params.fd_step, params.theta_high);
    const double lo = std::max(theta[i] - params.fd_step, params.theta_low);
    if (!(hi > lo)) continue;
    probe[i] = hi;
    const double f_hi = f(probe);
    probe[i] = lo;
    const double f_lo = f(probe);
    probe[i] = theta[i];
    grad[i] = (f_hi - f_lo) / (hi - lo);
  }
  return grad;
}

DescentTrace optimize_cluster(const ClusterObjectiveFn& objective, std::vector<double>& theta,
                              const SolverParams& params) {
  DescentTrace trace;
  double eta = params.eta0;
  ObjectiveValue current = objective(theta);
  trace.steps.push_back({theta, current.tcs, eta, true});
  if (current.tcs <= 0.0) return trace;
  if (current.resolved) {
    trace.stop_reason = StopReason::all_resolved;
    return trace;
  }

  const ScalarObjective scalar = [&](std::span<const double> t) { return objective(t).tcs; };
  for (;;) {
    if (trace.trial_evaluations >= params.gd_max_steps) {
      trace.stop_reason = StopReason::step_cap;
      return trace;
    }
    const auto grad = numerical_gradient(scalar, theta, params);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      trace.stop_reason = StopReason::converged;
      return trace;
    }

    for (;;) {
      if (trace.trial_evaluations >= params.gd_max_steps) {
        trace.stop_reason = StopReason::step_cap;
        return trace;
      }
      std::vector<double> trial(theta.size());
      for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] - eta * grad[i] / norm;
      trial = clip_theta(std::move(trial), params);
      const ObjectiveValue next = objective(trial);
      ++trace.trial_evaluations;

      const StepDecision rule = descent_step_rules(current.tcs - next.tcs, eta, params);
      trace.steps.push_back({trial, next.tcs, rule.eta, rule.accepted()});
      eta = rule.eta;
      if (!rule.accepted()) {
        if (eta < kMinEta) {
          trace.stop_reason = StopReason::converged;
          return trace;
        }
        continue;
      }
      theta = std::move(trial);
      current = next;
      if (rule.action == StepAction::accept_and_stop) {
        trace.stop_reason = StopReason::converged;
        return trace;
      }
      if (current.resolved) {
        trace.stop_reason = StopReason::all_resolved;
        return trace;
      }
      break;
    }
  }
}

ClusterObjective::ClusterObjective(const Scenario& scenario, const SolverParams& params, int level,
                                   std::span<const std::pair<FlightIndex, FlightIndex>> pairs,
                                   std::span<const FlightIndex> free_flights,
                                   std::span<const double> theta)
    : scenario_(scenario), params_(params), grid_(scenario.sector(), params), level_(level) {
  std::set<FlightIndex> touched;
  for (const auto& [a, b] : pairs) {
    touched.insert(a);
    touched.insert(b);
  }
  touched.insert(free_flights.begin(), free_flights.end());
  context_.assign(touched.begin(), touched.end());

  auto slot_of = [&](FlightIndex f) {
    return static_cast<std::size_t>(std::lower_bound(context_.begin(), context_.end(), f) -
                                    context_.begin());
  };
  is_free_.assign(context_.size(), false);
  for (FlightIndex f : free_flights) {
    free_slot_.push_back(slot_of(f));
    is_free_[free_slot_.back()] = true;
  }
  for (const auto& [a, b] : pairs) pairs_.emplace_back(slot_of(a), slot_of(b));

  tracks_.reserve(context_.size());
  for (FlightIndex f : context_) tracks_.push_back(sample_track(scenario_.flight(f), theta[f], grid_));
  for (std::size_t i = 0; i < context_.size(); ++i)
    for (std::size_t j = i + 1; j < context_.size(); ++j)
      if (!is_free_[i] && !is_free_[j])
        if (auto ev = min_distance_event(context_[i], tracks_[i], context_[j], tracks_[j], level_, grid_))
          fixed_distances_.set(context_[i], context_[j], ev->distance);
}

ObjectiveValue ClusterObjective::operator()(std::span<const double> free_theta) {
  for (std::size_t k = 0; k < free_slot_.size(); ++k) {
    const std::size_t slot = free_slot_[k];
    tracks_[slot] = sample_track(scenario_.flight(context_[slot]), free_theta[k], grid_);
  }

  PairDistances distances = fixed_distances_;
  for (std::size_t i = 0; i < context_.size(); ++i)
    for (std::size_t j = i + 1; j < context_.size(); ++j)
      if (is_free_[i] || is_free_[j])
        if (auto ev = min_distance_event(context_[i], tracks_[i], context_[j], tracks_[j], level_, grid_))
          distances.set(context_[i], context_[j], ev->distance);

  ObjectiveValue value;
  value.resolved = true;
  std::vector<EventPoint> points;
  points.reserve(pairs_.size() * 2);
  for (const auto& [i, j] : pairs_) {
    auto ev = min_distance_event(context_[i], tracks_[i], context_[j], tracks_[j], level_, grid_);
    if (!ev) continue;
    if (ev->distance < params_.separation) value.resolved = false;
    points.push_back({ev->event_a, ev->flight_a, ev->flight_b});
    points.push_back({ev->event_b, ev->flight_b, ev->flight_a});
  }
  value.tcs = tcs(points, distances, params_);
  return value;
}

LevelSolution RfLegSolver::solve(const Scenario& scenario, std::span<const FlightIndex> flights,
                                 int level, const SolverParams& params, std::uint64_t seed) const {
  std::vector<double> theta(scenario.size(), 0.0);
  const LevelConflicts initial = detect_level_conflicts(scenario, flights, theta, level, params);

  LevelSolution out;
  out.theta.assign(flights.size(), 0.0);
  if (initial.violating.empty()) return out;

  const auto points = event_points(initial.violating);
  const auto clusters = cluster_level_events(points, initial.distances, params, seed);

  for (const auto& cluster : clusters) {
    if (cluster.exclusive.empty()) continue;
    // Both halves of every event touching the cluster, so each pair keeps
    // its mutual repulsion even when k-means split its two pos-times.
    std::set<std::pair<FlightIndex, FlightIndex>> pair_set;
    for (const auto& m : cluster.members)
      pair_set.emplace(std::min(m.point.flight, m.point.partner),
                       std::max(m.point.flight, m.point.partner));
    const std::vector<std::pair<FlightIndex, FlightIndex>> pairs(pair_set.begin(), pair_set.end());

    ClusterObjective objective(scenario, params, level, pairs, cluster.exclusive, theta);
    std::vector<double> local(cluster.exclusive.size(), 0.0);
    for (std::size_t k = 0; k < local.size(); ++k) local[k] = theta[cluster.exclusive[k]];
    const auto trace = optimize_cluster(std::ref(objective), local, params);
    ObjectiveValue best = objective(local);
    int restarts = 0;
    // A descent from all zeros can stall where the crossing flights stay
    // mirror images of each other. Retry from a nudge that breaks the tie.
    for (const auto& pattern : kRestartPatterns) {
      if (best.resolved || best.tcs <= 0.0) break;
      std::vector<double> start(local.size());
      for (std::size_t k = 0; k < start.size(); ++k)
        start[k] = params.eta0 * pattern.sign(k);
      start = clip_theta(std::move(start), params);
      optimize_cluster(std::ref(objective), start, params);
      ++restarts;
      const ObjectiveValue v = objective(start);
      if (v.tcs < best.tcs || (v.resolved && !best.resolved)) {
        best = v;
        local = std::move(start);
      }
    }
    for (std::size_t k = 0; k < local.size(); ++k) theta[cluster.exclusive[k]] = local[k];
    if (spdlog::should_log(spdlog::level::debug))
      spdlog::debug("level {} cluster of {} flights: {} trials, {} restarts, tcs {:.4f} -> {:.4f}",
                    level, cluster.exclusive.size(), trace.trial_evaluations, restarts,
                    trace.steps.front().tcs, best.tcs);
  }

  for (std::size_t i = 0; i < flights.size(); ++i) out.theta[i] = theta[flights[i]];
  out.residual = detect_level_conflicts(scenario, flights, theta, level, params).violating;
  return out;
}

}  // namespace cdr
