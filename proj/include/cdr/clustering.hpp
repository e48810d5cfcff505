// k-means over min-distance events. Within one flight level ptd is exactly
// the Euclidean distance between (x, y, v0 * t) embeddings, so clustering
// runs on those 3D points.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cdr/conflict.hpp"

namespace cdr {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

Point3 embed(const PosTime& p, double v0);

/// floor(n / 5), but at least 1 for nonempty input.
std::size_t choose_k(std::size_t event_count);

struct KMeansResult {
  std::vector<std::size_t> labels;
  std::vector<Point3> centroids;
  int iterations = 0;
  bool converged = false;
};

/// Lloyd's algorithm from k-means++ seeding. k is clamped to the point
/// count. Labels always point at the nearest returned centroid (ties to the
/// lower index). Throws std::invalid_argument for empty input or k == 0.
KMeansResult kmeans(std::span<const Point3> points, std::size_t k, std::uint64_t seed,
                    int max_iterations = 100);

/// Within-cluster sum of squared distances.
double kmeans_objective(std::span<const Point3> points, const KMeansResult& result);

struct EventCluster {
  std::vector<ScoredEvent> members;   // non-increasing score
  Point3 centroid;
  double total_score = 0.0;
  std::vector<FlightIndex> flights;   // A(C): owners, ordered by best member score
  std::vector<FlightIndex> exclusive; // A(C) minus flights of earlier clusters
};

/// Clusters one level's violating event points with k = choose_k(count).
/// Members are scored against the whole input set; clusters come back in
/// descending total score and `exclusive` is deduplicated in that order.
std::vector<EventCluster> cluster_level_events(std::span<const EventPoint> events,
                                               const PairDistances& distances,
                                               const SolverParams& params, std::uint64_t seed);

}  // namespace cdr
