#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cdr/model.hpp"

namespace cdr {

struct LevelSolution {
  std::vector<double> theta;                  // aligned with the input flight list
  std::vector<MinDistanceEvent> residual;     // violating events left over
};

/// Any single-level conflict resolver usable inside Cluster & Disperse.
/// Implementations must return a best-effort partial solution rather than
/// fail when they cannot clear every conflict, and must be safe to call
/// concurrently for disjoint flight sets.
class PlanarSolver {
 public:
  virtual ~PlanarSolver() = default;
  virtual std::string_view name() const = 0;
  virtual LevelSolution solve(const Scenario& scenario, std::span<const FlightIndex> flights,
                              int level, const SolverParams& params, std::uint64_t seed) const = 0;
};

}  // namespace cdr
