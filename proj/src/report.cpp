#include "cdr/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "cdr/engine.hpp"
#include "cdr/geometry.hpp"

namespace cdr {

namespace fs = std::filesystem;

namespace {

constexpr double kAngleBinDeg = 5.0;
constexpr double kExtensionBinPct = 0.25;

std::size_t bin_count(double span, double width) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / width - 1e-9)));
}

std::size_t bin_index(double value, double start, double width, std::size_t bins) {
  const double raw = std::floor((value - start) / width);
  if (raw < 0.0) return 0;
  return std::min(bins - 1, static_cast<std::size_t>(raw));
}

}  // namespace

std::size_t Histogram::total() const { return std::accumulate(count.begin(), count.end(), std::size_t{0}); }

Histogram angle_histogram(std::span<const FlightOutcome> flights, double bound_deg) {
  const std::size_t bins = bin_count(2.0 * bound_deg, kAngleBinDeg);
  Histogram h;
  for (std::size_t i = 0; i < bins; ++i) h.bin_start.push_back(-bound_deg + kAngleBinDeg * static_cast<double>(i));
  h.count.assign(bins, 0);
  for (const auto& f : flights) ++h.count[bin_index(rad_to_deg(f.theta), -bound_deg, kAngleBinDeg, bins)];
  return h;
}

Histogram extension_histogram(std::span<const FlightOutcome> flights, double bound_deg) {
  const double max_pct = (path_length({0.0, 0.0}, {1.0, 0.0}, deg_to_rad(bound_deg)) - 1.0) * 100.0;
  const std::size_t bins = bin_count(max_pct, kExtensionBinPct);
  Histogram h;
  for (std::size_t i = 0; i < bins; ++i) h.bin_start.push_back(kExtensionBinPct * static_cast<double>(i));
  h.count.assign(bins, 0);
  for (const auto& f : flights)
    ++h.count[bin_index((f.extension_ratio - 1.0) * 100.0, 0.0, kExtensionBinPct, bins)];
  return h;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bin_start,count\n";
  for (std::size_t i = 0; i < h.count.size(); ++i) out += fmt::format("{},{}\n", h.bin_start[i], h.count[i]);
  return out;
}

std::string metrics_csv(std::span<const IterationMetrics> metrics) {
  std::string out = "iteration,conflicting_flights,violating_pairs\n";
  for (const auto& m : metrics)
    out += fmt::format("{},{},{}\n", m.iteration, m.conflicting_flights, m.violating_pairs);
  return out;
}

RunSummary summarize(const Scenario& scenario, const SolutionReport& report,
                     const SolverParams& params) {
  RunSummary s;
  s.flights = scenario.size();
  s.iterations_used = report.iterations_run;
  s.converged = report.converged;
  s.unresolved_count = report.unresolved_flights.size();
  s.initial_conflicting = report.per_iteration.empty() ? 0 : report.per_iteration.front().conflicting_flights;
  s.peak_simultaneous = report.peak_simultaneous;
  s.peak_simultaneous_straight =
      peak_simultaneous(scenario, std::vector<double>(scenario.size(), 0.0), params);
  if (report.per_flight.empty()) return s;

  std::size_t straight = 0;
  double ext_sum = 0.0;
  s.max_extension = 0.0;
  for (const auto& f : report.per_flight) {
    if (f.theta == 0.0) ++straight;
    ext_sum += f.extension_ratio;
    s.max_extension = std::max(s.max_extension, f.extension_ratio);
  }
  const auto n = static_cast<double>(report.per_flight.size());
  s.straight_share = static_cast<double>(straight) / n;
  s.mean_extension = ext_sum / n;
  return s;
}

json summary_to_json(const RunSummary& s) {
  return {{"flights", s.flights},
          {"iterations_used", s.iterations_used},
          {"converged", s.converged},
          {"unresolved_count", s.unresolved_count},
          {"initial_conflicting", s.initial_conflicting},
          {"straight_share", s.straight_share},
          {"mean_extension", s.mean_extension},
          {"max_extension", s.max_extension},
          {"peak_simultaneous", s.peak_simultaneous},
          {"peak_simultaneous_straight", s.peak_simultaneous_straight}};
}

void write_solution_outputs(const fs::path& dir, const Scenario& scenario,
                            const SolutionReport& report, const SolverParams& params) {
  const double bound = rad_to_deg(std::max(-params.theta_low, params.theta_high));
  write_json(dir / "solution.json", solution_to_json(scenario, report));
  write_text_atomic(dir / "metrics.csv", metrics_csv(report.per_iteration));
  write_text_atomic(dir / "angles.csv", histogram_csv(angle_histogram(report.per_flight, bound)));
  write_text_atomic(dir / "extension.csv", histogram_csv(extension_histogram(report.per_flight, bound)));
  write_json(dir / "summary.json", summary_to_json(summarize(scenario, report, params)));
}

std::vector<int> BatchResult::unresolved_curve() const {
  std::vector<int> curve(static_cast<std::size_t>(max_iterations) + 1, 0);
  for (const auto& inst : instances) {
    for (std::size_t h = 0; h < curve.size(); ++h) {
      if (!inst.ok) {
        ++curve[h];
        continue;
      }
      const auto& it = inst.report.per_iteration;
      const auto& m = h < it.size() ? it[h] : it.back();
      if (m.violating_pairs > 0) ++curve[h];
    }
  }
  return curve;
}

std::vector<double> BatchResult::mean_conflicting_curve() const {
  std::vector<double> curve(static_cast<std::size_t>(max_iterations) + 1, 0.0);
  int ok = 0;
  for (const auto& inst : instances) {
    if (!inst.ok) continue;
    ++ok;
    const auto& it = inst.report.per_iteration;
    for (std::size_t h = 0; h < curve.size(); ++h)
      curve[h] += static_cast<double>((h < it.size() ? it[h] : it.back()).conflicting_flights);
  }
  if (ok > 0)
    for (double& v : curve) v /= ok;
  return curve;
}

int BatchResult::resolved_by(int iteration) const {
  const auto curve = unresolved_curve();
  const auto h = static_cast<std::size_t>(std::clamp(iteration, 0, max_iterations));
  return static_cast<int>(instances.size()) - curve[h];
}

InstanceResult run_instance(const GenConfig& gen, const SolverParams& params, std::uint64_t seed,
                            const PlanarSolver& solver) {
  InstanceResult r;
  r.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    GenConfig g = gen;
    g.seed = seed;
    SolverParams p = params;
    p.rng_seed = seed;
    r.scenario = generate(g);
    r.report = solve(r.scenario, p, solver, seed);
    r.summary = summarize(r.scenario, r.report, p);
    r.ok = true;
  } catch (const std::exception& ex) {
    r.error = ex.what();
    spdlog::error("instance seed {} failed: {}", seed, ex.what());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

BatchResult run_batch(const BatchConfig& config, const PlanarSolver& solver) {
  if (config.instances < 1) throw std::invalid_argument("batch needs at least one instance");
  BatchResult batch;
  batch.max_iterations = config.params.max_iterations;
  batch.instances.resize(static_cast<std::size_t>(config.instances));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.instances; i = next++) {
      auto& slot = batch.instances[static_cast<std::size_t>(i)];
      slot = run_instance(config.gen, config.params, config.seed + static_cast<std::uint64_t>(i), solver);
      slot.index = i;
      spdlog::info("instance {} (seed {}): {} in {:.1f}s", i, slot.seed,
                   slot.ok ? (slot.report.converged ? "resolved" : "partial") : "failed",
                   slot.wall_seconds);
    }
  };
  const int jobs = std::clamp(config.jobs, 1, config.instances);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return batch;
}

void write_batch_outputs(const fs::path& dir, const BatchResult& batch, const SolverParams& params) {
  std::string rows =
      "instance,seed,status,flights,peak_simultaneous,initial_conflicting,iterations_used,"
      "unresolved,straight_share,mean_extension,max_extension\n";
  std::vector<double> peaks;
  double initial_fraction = 0.0;
  int ok = 0;
  for (const auto& inst : batch.instances) {
    const fs::path sub = dir / fmt::format("instance_{:03d}", inst.index);
    if (!inst.ok) {
      write_text_atomic(sub / "error.txt", inst.error + "\n");
      rows += fmt::format("{},{},failed,,,,,,,,\n", inst.index, inst.seed);
      continue;
    }
    SolverParams p = params;
    p.rng_seed = inst.seed;
    write_json(sub / "scenario.json", scenario_to_json(inst.scenario));
    write_solution_outputs(sub, inst.scenario, inst.report, p);
    const auto& s = inst.summary;
    rows += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", inst.index, inst.seed,
                        s.converged ? "resolved" : "partial", s.flights, s.peak_simultaneous_straight,
                        s.initial_conflicting, s.iterations_used, s.unresolved_count, s.straight_share,
                        s.mean_extension, s.max_extension);
    peaks.push_back(s.peak_simultaneous_straight);
    if (s.flights > 0) initial_fraction += static_cast<double>(s.initial_conflicting) / static_cast<double>(s.flights);
    ++ok;
  }
  write_text_atomic(dir / "batch_instances.csv", rows);

  std::string unresolved = "iteration,unresolved_instances\n";
  const auto ucurve = batch.unresolved_curve();
  for (std::size_t h = 0; h < ucurve.size(); ++h) unresolved += fmt::format("{},{}\n", h, ucurve[h]);
  write_text_atomic(dir / "batch_unresolved.csv", unresolved);

  std::string conflicting = "iteration,mean_conflicting_flights\n";
  const auto ccurve = batch.mean_conflicting_curve();
  for (std::size_t h = 0; h < ccurve.size(); ++h) conflicting += fmt::format("{},{}\n", h, ccurve[h]);
  write_text_atomic(dir / "batch_conflicting.csv", conflicting);

  json summary = {{"instances", batch.instances.size()},
                  {"succeeded", ok},
                  {"resolved", batch.resolved_by(batch.max_iterations)},
                  {"resolved_by_iteration_5", batch.resolved_by(5)},
                  {"max_iterations", batch.max_iterations}};
  if (!peaks.empty()) {
    const double mean = std::accumulate(peaks.begin(), peaks.end(), 0.0) / static_cast<double>(peaks.size());
    double var = 0.0;
    for (double v : peaks) var += (v - mean) * (v - mean);
    summary["peak_simultaneous"] = {{"mean", mean},
                                    {"std", std::sqrt(var / static_cast<double>(peaks.size()))},
                                    {"min", *std::min_element(peaks.begin(), peaks.end())},
                                    {"max", *std::max_element(peaks.begin(), peaks.end())}};
    summary["mean_initial_conflicting_fraction"] = initial_fraction / ok;
  }
  write_json(dir / "batch_summary.json", summary);
}

}  // namespace cdr
