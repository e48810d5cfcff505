#include "cdr/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "cdr/rng.hpp"

namespace cdr {

namespace {

std::size_t nearest(const Point3& p, std::span<const Point3> centroids) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    const double d = squared_distance(p, centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

std::vector<std::size_t> assign(std::span<const Point3> points, std::span<const Point3> centroids) {
  std::vector<std::size_t> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest(points[i], centroids);
  return labels;
}

std::vector<Point3> seed_centroids(std::span<const Point3> points, std::size_t k, Rng& rng) {
  std::vector<Point3> centroids;
  centroids.reserve(k);
  centroids.push_back(points[rng.index(points.size())]);
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centroids[0]);

  while (centroids.size() < k) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = rng.unit() * total;
      double acc = 0.0;
      pick = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0.0) --pick;  // guard against rounding at the tail
    } else {
      pick = rng.index(points.size());
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
  }
  return centroids;
}

// Recomputes means; an empty cluster takes over the point lying farthest from
// its own centroid among clusters that can spare one.
void update_centroids(std::span<const Point3> points, std::vector<std::size_t>& labels,
                      std::vector<Point3>& centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t l : labels) ++counts[l];

  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] != 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) break;
    --counts[labels[far]];
    labels[far] = j;
    counts[j] = 1;
  }

  std::vector<Point3> sums(k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    Point3& s = sums[labels[i]];
    s.x += points[i].x;
    s.y += points[i].y;
    s.z += points[i].z;
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] == 0) continue;
    const double n = static_cast<double>(counts[j]);
    centroids[j] = {sums[j].x / n, sums[j].y / n, sums[j].z / n};
  }
}

}  // namespace

Point3 embed(const PosTime& p, double v0) { return {p.x, p.y, v0 * p.t}; }

std::size_t choose_k(std::size_t event_count) {
  if (event_count == 0) return 0;
  return std::max<std::size_t>(1, event_count / 5);
}

KMeansResult kmeans(std::span<const Point3> points, std::size_t k, std::uint64_t seed,
                    int max_iterations) {
  if (points.empty()) throw std::invalid_argument("kmeans: no points");
  if (k == 0) throw std::invalid_argument("kmeans: k must be >= 1");
  k = std::min(k, points.size());

  Rng rng(seed);
  KMeansResult res;
  res.centroids = seed_centroids(points, k, rng);
  res.labels = assign(points, res.centroids);
  for (int it = 1; it <= max_iterations; ++it) {
    res.iterations = it;
    update_centroids(points, res.labels, res.centroids);
    auto next = assign(points, res.centroids);
    if (next == res.labels) {
      res.converged = true;
      break;
    }
    res.labels = std::move(next);
  }
  return res;
}

double kmeans_objective(std::span<const Point3> points, const KMeansResult& result) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    sum += squared_distance(points[i], result.centroids[result.labels[i]]);
  return sum;
}

std::vector<EventCluster> cluster_level_events(std::span<const EventPoint> events,
                                               const PairDistances& distances,
                                               const SolverParams& params, std::uint64_t seed) {
  if (events.empty()) return {};

  std::vector<Point3> points;
  points.reserve(events.size());
  for (const auto& e : events) points.push_back(embed(e.pos, params.v0));
  const auto km = kmeans(points, choose_k(events.size()), seed);
  const auto scores = ccs_scores(events, distances, params);

  std::vector<EventCluster> clusters(km.centroids.size());
  for (std::size_t j = 0; j < clusters.size(); ++j) clusters[j].centroid = km.centroids[j];
  for (std::size_t i = 0; i < events.size(); ++i) {
    auto& c = clusters[km.labels[i]];
    c.members.push_back({events[i], scores[i]});
    c.total_score += scores[i];
  }
  std::erase_if(clusters, [](const EventCluster& c) { return c.members.empty(); });

  for (auto& c : clusters) {
    std::stable_sort(c.members.begin(), c.members.end(),
                     [](const ScoredEvent& a, const ScoredEvent& b) { return a.score > b.score; });
    // Sorted members put each flight's best event first.
    for (const auto& m : c.members)
      if (std::find(c.flights.begin(), c.flights.end(), m.point.flight) == c.flights.end())
        c.flights.push_back(m.point.flight);
  }
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const EventCluster& a, const EventCluster& b) {
                     return a.total_score > b.total_score;
                   });

  std::unordered_set<FlightIndex> taken;
  for (auto& c : clusters)
    for (FlightIndex f : c.flights)
      if (taken.insert(f).second) c.exclusive.push_back(f);
  return clusters;
}

}  // namespace cdr
