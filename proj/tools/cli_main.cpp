// cluster-disperse: generate scenarios, resolve them, and aggregate batches.
//
// Exit status: 0 when every conflict is resolved, 2 when a solution still
// has violating flights, 1 on any error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "cdr/conflict.hpp"
#include "cdr/engine.hpp"
#include "cdr/geometry.hpp"
#include "cdr/io.hpp"
#include "cdr/log.hpp"
#include "cdr/report.hpp"
#include "cdr/rfleg_solver.hpp"
#include "cdr/scengen.hpp"

namespace fs = std::filesystem;
using namespace cdr;

namespace {

constexpr int kExitResolved = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

struct ParamFlags {
  std::string params_file;
  std::optional<int> iterations;
  std::optional<double> dt_seconds;
  std::optional<double> separation;
  std::optional<double> margin;
  std::optional<double> theta_bound_deg;
  std::optional<int> r;
  std::optional<int> big_r;

  void attach(CLI::App* cmd) {
    cmd->add_option("--params", params_file, "JSON file with solver parameter overrides");
    cmd->add_option("--iterations", iterations, "Max Cluster & Disperse iterations (N)");
    cmd->add_option("--dt-seconds", dt_seconds, "Sampling step in seconds");
    cmd->add_option("--separation", separation, "Separation distance s in nmi");
    cmd->add_option("--margin", margin, "Score margin s0 in nmi");
    cmd->add_option("--theta-bound-deg", theta_bound_deg, "Symmetric arc half-angle bound in degrees");
    cmd->add_option("--r", r, "Flights dispersed per cluster per sweep");
    cmd->add_option("--big-r", big_r, "Flights dispersed per level per iteration");
  }

  SolverParams resolve() const {
    SolverParams p;
    if (!params_file.empty()) p = params_from_json(read_json(params_file), p);
    if (iterations) p.max_iterations = *iterations;
    if (dt_seconds) p.dt = *dt_seconds / kSecondsPerHour;
    if (separation) p.separation = *separation;
    if (margin) p.margin = *margin;
    if (theta_bound_deg) {
      p.theta_low = -deg_to_rad(*theta_bound_deg);
      p.theta_high = deg_to_rad(*theta_bound_deg);
    }
    if (r) p.per_cluster_quota = *r;
    if (big_r) p.max_dispersed_per_level = *big_r;
    p.validate();
    return p;
  }
};

void attach_gen_flags(CLI::App* cmd, GenConfig& gen) {
  cmd->add_option("--flights", gen.flight_count, "Number of flights")->capture_default_str();
  cmd->add_option("--levels", gen.level_count, "Number of flight levels")->capture_default_str();
  cmd->add_option("--width", gen.width, "Sector width in nmi")->capture_default_str();
  cmd->add_option("--height", gen.height, "Sector height in nmi")->capture_default_str();
  cmd->add_option("--spacing", gen.spacing, "Boundary fix spacing in nmi")->capture_default_str();
  cmd->add_option("--horizon", gen.release_horizon, "Release horizon in hours")->capture_default_str();
  cmd->add_option("--slot", gen.slot, "Release slot length in hours")->capture_default_str();
  cmd->add_option("--speed", gen.speed, "Ground speed in knots")->capture_default_str();
}

int cmd_generate(GenConfig gen, std::uint64_t seed, const fs::path& out) {
  gen.seed = seed;
  const Scenario sc = generate(gen);
  write_json(out, scenario_to_json(sc));
  const std::size_t capacity = boundary_points(gen).size() * static_cast<std::size_t>(slot_count(gen));
  const int peak = peak_simultaneous(sc, std::vector<double>(sc.size(), 0.0), SolverParams{});
  fmt::print("wrote {}: {} flights, {} levels, capacity {}, peak simultaneous (straight) {}\n",
             out.string(), sc.size(), sc.level_count(), capacity, peak);
  return kExitResolved;
}

int cmd_solve(const fs::path& scenario_path, SolverParams params, std::uint64_t seed,
              const fs::path& out) {
  const Scenario sc = scenario_from_json(read_json(scenario_path));
  params.rng_seed = seed;
  const RfLegSolver solver;
  const auto t0 = std::chrono::steady_clock::now();
  const SolutionReport report = solve(sc, params, solver, seed);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_solution_outputs(out, sc, report, params);
  const RunSummary s = summarize(sc, report, params);
  fmt::print("flights {}  iterations {}  unresolved {}  straight {:.1f}%  mean extension {:.5f}  "
             "peak {}  wall {:.1f}s\n",
             s.flights, s.iterations_used, s.unresolved_count, 100.0 * s.straight_share,
             s.mean_extension, s.peak_simultaneous, wall);
  return report.converged ? kExitResolved : kExitPartial;
}

int cmd_batch(const BatchConfig& config, const fs::path& out) {
  const RfLegSolver solver;
  const auto t0 = std::chrono::steady_clock::now();
  const BatchResult batch = run_batch(config, solver);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_batch_outputs(out, batch, config.params);
  for (const auto& inst : batch.instances)
    fmt::print("instance {:3d} seed {:<8} {:8} iterations {:2d} unresolved {:3d} wall {:.1f}s\n",
               inst.index, inst.seed, inst.ok ? (inst.report.converged ? "resolved" : "partial") : "failed",
               inst.ok ? inst.report.iterations_run : 0,
               inst.ok ? inst.report.unresolved_flights.size() : 0, inst.wall_seconds);
  const int resolved = batch.resolved_by(batch.max_iterations);
  fmt::print("resolved {}/{} (by iteration 5: {}), total wall {:.1f}s\n", resolved,
             batch.instances.size(), batch.resolved_by(5), wall);
  return resolved == static_cast<int>(batch.instances.size()) ? kExitResolved : kExitPartial;
}

int cmd_report(const fs::path& scenario_path, const fs::path& solution_path, SolverParams params,
               const fs::path& out) {
  const Scenario sc = scenario_from_json(read_json(scenario_path));
  const json sol = read_json(solution_path);
  const Assignment a = assignment_from_solution(sc, sol);

  SolutionReport report;
  report.final_assignment = a;
  const auto conflicts = detect_conflicts(sc, a, params);
  report.unresolved_flights = conflicts.violating_flights;
  report.converged = conflicts.clear();
  for (const auto& m : sol.value("iterations", json::array()))
    report.per_iteration.push_back({m.at("i").get<int>(), m.at("conflicting_flights").get<std::size_t>(),
                                    m.at("violating_pairs").get<std::size_t>()});
  report.iterations_run = report.per_iteration.empty() ? 0 : report.per_iteration.back().iteration;
  for (FlightIndex f = 0; f < sc.size(); ++f) {
    const auto& fl = sc.flight(f);
    const double len = path_length(fl.entry, fl.exit, a.theta[f]);
    report.per_flight.push_back({a.level[f], a.theta[f], len, len / distance(fl.entry, fl.exit)});
  }
  report.peak_simultaneous = peak_simultaneous(sc, a.theta, params);
  write_solution_outputs(out, sc, report, params);

  const std::size_t listed = sol.value("unresolved", json::array()).size();
  const RunSummary s = summarize(sc, report, params);
  fmt::print("flights {}  unresolved {} (file lists {})  straight {:.1f}%  mean extension {:.5f}  peak {}\n",
             s.flights, s.unresolved_count, listed, 100.0 * s.straight_share, s.mean_extension,
             s.peak_simultaneous);
  return report.converged ? kExitResolved : kExitPartial;
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Cluster & Disperse conflict resolution for multi-level sectors"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  GenConfig gen;
  ParamFlags pflags;
  std::string out;
  std::string scenario_path;
  std::string solution_path;
  int instances = 20;
  int jobs = 1;

  auto* g = app.add_subcommand("generate", "Write a random case-study scenario");
  g->add_option("--seed", seed, "Random seed")->capture_default_str();
  attach_gen_flags(g, gen);
  g->add_option("--out", out, "Scenario file to write")->default_val("scenario.json");

  auto* s = app.add_subcommand("solve", "Resolve a scenario file");
  s->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  s->add_option("--seed", seed, "Random seed")->capture_default_str();
  pflags.attach(s);
  s->add_option("--out", out, "Output directory")->default_val("out");

  auto* b = app.add_subcommand("batch", "Generate and resolve seeded instances");
  b->add_option("--seed", seed, "Seed of the first instance; instance i uses seed + i")->capture_default_str();
  b->add_option("--instances", instances, "Instance count")->capture_default_str()->check(CLI::PositiveNumber);
  b->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  attach_gen_flags(b, gen);
  pflags.attach(b);
  b->add_option("--out", out, "Output directory")->default_val("batch_out");

  auto* r = app.add_subcommand("report", "Recompute metrics for an existing solution file");
  r->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  r->add_option("solution", solution_path, "Solution JSON")->required()->check(CLI::ExistingFile);
  pflags.attach(r);
  r->add_option("--out", out, "Output directory")->default_val("report_out");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitResolved : kExitError;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, seed, out);
    if (s->parsed()) return cmd_solve(scenario_path, pflags.resolve(), seed, out);
    if (b->parsed()) {
      BatchConfig config;
      config.gen = gen;
      config.params = pflags.resolve();
      config.instances = instances;
      config.seed = seed;
      config.jobs = jobs;
      return cmd_batch(config, out);
    }
    if (r->parsed()) return cmd_report(scenario_path, solution_path, pflags.resolve(), out);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitError;
  }
  return kExitError;
}
