// Separation checking on the sampled timeline and the conflict-contribution
// scoring used both for dispersal ranking and as the descent objective.

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cdr/model.hpp"

namespace cdr {

/// Sample times t_k = t_start + k * dt for k = 0..last, all <= t_end.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double dt);
  TimeGrid(const Sector& sector, const SolverParams& params)
      : TimeGrid(sector.t_start, sector.t_end, params.dt) {}

  double time(std::int64_t k) const { return t_start_ + static_cast<double>(k) * dt_; }
  std::int64_t last() const { return last_; }
  double dt() const { return dt_; }

  /// Inclusive sample-index range covering [t0, t1]; first > second when empty.
  std::pair<std::int64_t, std::int64_t> range(double t0, double t1) const;

 private:
  double t_start_;
  double dt_;
  std::int64_t last_;
};

/// A flight's positions at consecutive grid samples while airborne.
struct SampledTrack {
  std::int64_t first = 0;
  std::vector<Vec2> points;

  bool empty() const { return points.empty(); }
  std::int64_t last() const { return first + static_cast<std::int64_t>(points.size()) - 1; }
  Vec2 at(std::int64_t k) const { return points[static_cast<std::size_t>(k - first)]; }
};

SampledTrack sample_track(const FlightSpec& flight, double theta, const TimeGrid& grid);

/// Closest sampled approach of two tracks on the same level; earliest sample
/// wins ties. Empty when the tracks share no sample.
std::optional<MinDistanceEvent> min_distance_event(FlightIndex a, const SampledTrack& track_a,
                                                   FlightIndex b, const SampledTrack& track_b,
                                                   int level, const TimeGrid& grid);

/// Convenience overload sampling both flights first. Throws
/// std::invalid_argument when the flights sit on different levels.
std::optional<MinDistanceEvent> min_distance_event(const Scenario& scenario,
                                                   const Assignment& assignment, FlightIndex a,
                                                   FlightIndex b, const SolverParams& params);

/// Position-time distance: Euclidean over (x, y, v0 * t) on a shared level,
/// +inf across levels.
double ptd(const PosTime& p, const PosTime& q, double v0);

/// Planar minimum distance d^{a,b} per unordered flight pair. Pairs that
/// were never evaluated (or never overlap in time) read as +inf.
class PairDistances {
 public:
  void set(FlightIndex a, FlightIndex b, double d) { map_[key(a, b)] = d; }
  double get(FlightIndex a, FlightIndex b) const {
    auto it = map_.find(key(a, b));
    return it == map_.end() ? std::numeric_limits<double>::infinity() : it->second;
  }
  std::size_t size() const { return map_.size(); }
  void clear() { map_.clear(); }

 private:
  static std::uint64_t key(FlightIndex a, FlightIndex b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
  }
  std::unordered_map<std::uint64_t, double> map_;
};

/// One half of a min-distance event: the owning flight's pos-time.
struct EventPoint {
  PosTime pos;
  FlightIndex flight = 0;
  FlightIndex partner = 0;
};

struct ScoredEvent {
  EventPoint point;
  double score = 0.0;
};

/// Flattens events into their two pos-times each (a's first, then b's).
std::vector<EventPoint> event_points(std::span<const MinDistanceEvent> events);

/// max(0, s' - ptd(p, q)) when the owning flights differ and come within s'
/// of each other; 0 otherwise.
double ccs_pair(const EventPoint& p, const EventPoint& q, const PairDistances& distances,
                const SolverParams& params);

/// Sum of ccs_pair of points[index] against every other element.
double ccs_event(std::size_t index, std::span<const EventPoint> points,
                 const PairDistances& distances, const SolverParams& params);

/// ccs_event for every element at once (symmetric half-matrix pass).
std::vector<double> ccs_scores(std::span<const EventPoint> points, const PairDistances& distances,
                               const SolverParams& params);

/// Total conflict score: the sum of ccs_event over the whole set.
double tcs(std::span<const EventPoint> points, const PairDistances& distances,
           const SolverParams& params);

/// Max ccs over the flight's own points. Throws std::invalid_argument when
/// the flight owns no point in the set.
double flight_score(FlightIndex flight, std::span<const EventPoint> points,
                    const PairDistances& distances, const SolverParams& params);

struct LevelConflicts {
  int level = 0;
  std::vector<FlightIndex> flights;             // flights assigned to the level
  std::vector<MinDistanceEvent> violating;      // pairs with distance < s
  PairDistances distances;                      // every overlapping pair

  std::vector<FlightIndex> violating_flights() const;
};

struct ConflictReport {
  std::vector<LevelConflicts> levels;           // indexed by level
  std::vector<FlightIndex> violating_flights;   // ascending, all levels
  std::size_t violating_pairs = 0;

  bool clear() const { return violating_pairs == 0; }
  IterationMetrics metrics(int iteration) const {
    return {iteration, violating_flights.size(), violating_pairs};
  }
};

/// All same-level pairwise scans for the given flights, which must all sit
/// on `level` under `theta` (indexed by global flight index).
LevelConflicts detect_level_conflicts(const Scenario& scenario, std::span<const FlightIndex> flights,
                                      std::span<const double> theta, int level,
                                      const SolverParams& params);

ConflictReport detect_conflicts(const Scenario& scenario, const Assignment& assignment,
                                const SolverParams& params);

/// Maximum number of flights airborne at one grid sample.
int peak_simultaneous(const Scenario& scenario, std::span<const double> theta,
                      const SolverParams& params);

}  // namespace cdr
