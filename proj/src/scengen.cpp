#include "cdr/scengen.hpp"

#include <cmath>
#include <set>
#include <string>

#include <spdlog/fmt/fmt.h>

#include "cdr/rng.hpp"

namespace cdr {

namespace {

constexpr int kMaxAttemptsPerFlight = 1000;

// Number of spacing-long segments along an edge; throws unless exact.
int segments(double edge, double spacing, const char* name) {
  const double ratio = edge / spacing;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio))
    throw std::invalid_argument(fmt::format("spacing {} does not divide the {} edge ({})", spacing, name, edge));
  if (n < 2.0)
    throw std::invalid_argument(fmt::format("spacing {} leaves no fixes on the {} edge", spacing, name));
  return static_cast<int>(n);
}

}  // namespace

void GenConfig::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) throw std::invalid_argument("sector dimensions must be positive");
  if (!(spacing > 0.0)) throw std::invalid_argument("spacing must be positive");
  if (flight_count < 0) throw std::invalid_argument("flight count must be >= 0");
  if (!(release_horizon > 0.0) || !(slot > 0.0)) throw std::invalid_argument("horizon and slot must be positive");
  if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
  if (level_count < 1) throw std::invalid_argument("need at least one level");
  segments(width, spacing, "horizontal");
  segments(height, spacing, "vertical");
}

std::vector<BoundaryPoint> boundary_points(const GenConfig& config) {
  const int nx = segments(config.width, config.spacing, "horizontal");
  const int ny = segments(config.height, config.spacing, "vertical");
  const double s = config.spacing;
  std::vector<BoundaryPoint> pts;
  for (int k = 1; k < nx; ++k) pts.push_back({{k * s, 0.0}, Edge::bottom});
  for (int k = 1; k < ny; ++k) pts.push_back({{config.width, k * s}, Edge::right});
  for (int k = 1; k < nx; ++k) pts.push_back({{k * s, config.height}, Edge::top});
  for (int k = 1; k < ny; ++k) pts.push_back({{0.0, k * s}, Edge::left});
  return pts;
}

int slot_count(const GenConfig& config) {
  return static_cast<int>(std::ceil(config.release_horizon / config.slot - 1e-9));
}

Scenario generate(const GenConfig& config) {
  config.validate();
  const auto pts = boundary_points(config);
  const int slots = slot_count(config);
  Rng rng(config.seed);

  std::set<std::pair<std::size_t, int>> used;  // (entry fix, release slot)
  std::vector<FlightSpec> flights;
  flights.reserve(static_cast<std::size_t>(config.flight_count));
  for (int i = 0; i < config.flight_count; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttemptsPerFlight && !placed; ++attempt) {
      const std::size_t entry = rng.index(pts.size());
      std::vector<std::size_t> exits;
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (pts[j].edge != pts[entry].edge) exits.push_back(j);
      const std::size_t exit = exits[rng.index(exits.size())];
      const int slot = static_cast<int>(rng.index(static_cast<std::uint64_t>(slots)));
      if (!used.emplace(entry, slot).second) continue;

      FlightSpec f;
      f.id = fmt::format("F{:04d}", i);
      f.entry = pts[entry].position;
      f.exit = pts[exit].position;
      f.release_time = slot * config.slot;
      f.speed = config.speed;
      flights.push_back(std::move(f));
      placed = true;
    }
    if (!placed)
      throw std::runtime_error(fmt::format(
          "generate: no free (fix, slot) for flight {} after {} attempts; capacity is {} fixes x {} slots = {}",
          i, kMaxAttemptsPerFlight, pts.size(), slots, pts.size() * static_cast<std::size_t>(slots)));
  }

  Sector sector{config.width, config.height, config.level_count, 0.0, config.release_horizon};
  return validate_scenario(sector, std::move(flights));
}

}  // namespace cdr
