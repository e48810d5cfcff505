// Metrics derived from solutions: angle and path-extension histograms,
// per-run summaries, and multi-instance batch aggregation.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cdr/io.hpp"
#include "cdr/planar_solver.hpp"
#include "cdr/scengen.hpp"

namespace cdr {

struct Histogram {
  std::vector<double> bin_start;
  std::vector<std::size_t> count;

  std::size_t total() const;
};

/// 5-degree bins spanning [-bound, bound] (degrees); values at the upper
/// bound land in the last bin.
Histogram angle_histogram(std::span<const FlightOutcome> flights, double bound_deg);

/// Path extension in percent, 0.25-point bins from 0 to the largest
/// extension the angle bound permits.
Histogram extension_histogram(std::span<const FlightOutcome> flights, double bound_deg);

/// "bin_start,count" header plus one row per bin.
std::string histogram_csv(const Histogram& h);

/// "iteration,conflicting_flights,violating_pairs" rows.
std::string metrics_csv(std::span<const IterationMetrics> metrics);

struct RunSummary {
  std::size_t flights = 0;
  int iterations_used = 0;
  bool converged = false;
  std::size_t unresolved_count = 0;
  std::size_t initial_conflicting = 0;   // after level initialization
  double straight_share = 1.0;           // fraction with theta == 0
  double mean_extension = 1.0;
  double max_extension = 1.0;
  int peak_simultaneous = 0;             // final trajectories
  int peak_simultaneous_straight = 0;    // everyone on the direct path
};

RunSummary summarize(const Scenario& scenario, const SolutionReport& report,
                     const SolverParams& params);
json summary_to_json(const RunSummary& s);

/// Writes solution.json, metrics.csv, angles.csv, extension.csv and
/// summary.json under `dir`.
void write_solution_outputs(const std::filesystem::path& dir, const Scenario& scenario,
                            const SolutionReport& report, const SolverParams& params);

struct BatchConfig {
  GenConfig gen;
  SolverParams params;
  int instances = 20;
  std::uint64_t seed = 0;  // instance i uses seed + i for generation and solving
  int jobs = 1;
};

struct InstanceResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  Scenario scenario;
  SolutionReport report;
  RunSummary summary;
  double wall_seconds = 0.0;
};

struct BatchResult {
  std::vector<InstanceResult> instances;
  int max_iterations = 0;

  /// Instances still holding conflicts after each iteration 0..N (failed
  /// instances count as unresolved).
  std::vector<int> unresolved_curve() const;
  /// Mean conflicting-flight count after each iteration 0..N over the
  /// successful instances; finished runs contribute their final value.
  std::vector<double> mean_conflicting_curve() const;
  int resolved_by(int iteration) const;
};

InstanceResult run_instance(const GenConfig& gen, const SolverParams& params, std::uint64_t seed,
                            const PlanarSolver& solver);

/// Runs every instance (on `jobs` threads); results are ordered by index and
/// do not depend on scheduling.
BatchResult run_batch(const BatchConfig& config, const PlanarSolver& solver);

/// instance_NNN/{scenario.json, solution.json, ...} plus batch_unresolved.csv,
/// batch_conflicting.csv, batch_instances.csv and batch_summary.json.
void write_batch_outputs(const std::filesystem::path& dir, const BatchResult& batch,
                         const SolverParams& params);

}  // namespace cdr
