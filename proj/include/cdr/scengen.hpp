// Seeded generator for rectangular-sector traffic: flights enter and leave
// at designated boundary fixes on different edges, released on a fixed
// slot grid with at most one release per fix per slot.

#pragma once

#include <cstdint>
#include <vector>

#include "cdr/model.hpp"

namespace cdr {

enum class Edge { bottom, right, top, left };

struct BoundaryPoint {
  Vec2 position;
  Edge edge;
};

struct GenConfig {
  double width = 54.0;           // nmi
  double height = 64.8;          // nmi
  double spacing = 5.4;          // nmi between designated fixes
  int flight_count = 320;
  double release_horizon = 1.0;  // hours
  double slot = 0.02;            // hours
  double speed = 533.0;          // knots
  int level_count = 12;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when the config is unusable.
  void validate() const;
};

/// Fixes every `spacing` nmi along each edge, corners excluded, listed edge
/// by edge (bottom, right, top, left). Throws std::invalid_argument when the
/// spacing does not divide an edge or leaves an edge without fixes.
std::vector<BoundaryPoint> boundary_points(const GenConfig& config);

/// Number of release slots in [0, horizon).
int slot_count(const GenConfig& config);

/// Throws std::runtime_error when 1000 consecutive draws fail to find a
/// free (fix, slot) combination for some flight.
Scenario generate(const GenConfig& config);

}  // namespace cdr
