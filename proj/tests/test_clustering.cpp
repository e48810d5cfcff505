#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cdr/clustering.hpp"

using namespace cdr;
using doctest::Approx;

namespace {

std::vector<Point3> random_points(std::mt19937_64& gen, std::size_t n, double spread = 20.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = {u(gen), u(gen), u(gen)};
  return pts;
}

bool nearest_own_centroid(std::span<const Point3> pts, const KMeansResult& r) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double own = squared_distance(pts[i], r.centroids[r.labels[i]]);
    for (std::size_t j = 0; j < r.centroids.size(); ++j) {
      const double d = squared_distance(pts[i], r.centroids[j]);
      if (d < own || (d == own && j < r.labels[i])) return false;
    }
  }
  return true;
}

// Events of `pairs` flight pairs near one another, one event per flight.
struct LevelEvents {
  std::vector<EventPoint> points;
  PairDistances distances;
};

LevelEvents clustered_events(std::mt19937_64& gen, std::size_t pairs) {
  std::uniform_real_distribution<double> spot(0, 50), jitter(-1, 1), when(0, 0.5);
  LevelEvents le;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto a = static_cast<FlightIndex>(2 * i), b = a + 1;
    const double x = spot(gen), y = spot(gen), t = when(gen);
    le.points.push_back({{x + jitter(gen), y + jitter(gen), 0, t}, a, b});
    le.points.push_back({{x + jitter(gen), y + jitter(gen), 0, t}, b, a});
    le.distances.set(a, b, 2.0);
  }
  return le;
}

}  // namespace

TEST_CASE("embed") {
  CHECK(embed({0, 0, 4, 0}, 533) == Point3{0, 0, 0});
  const Point3 e = embed({1, 2, 4, 0.01}, 533);
  CHECK(e.x == 1);
  CHECK(e.y == 2);
  CHECK(e.z == Approx(5.33));

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> c(-40, 40), t(0, 1);
  for (int i = 0; i < 300; ++i) {
    const PosTime p{c(gen), c(gen), 2, t(gen)}, q{c(gen), c(gen), 2, t(gen)};
    CHECK(std::sqrt(squared_distance(embed(p, 533), embed(q, 533))) ==
          Approx(ptd(p, q, 533)).epsilon(1e-12));
  }
}

TEST_CASE("choose_k") {
  CHECK(choose_k(12) == 2);
  CHECK(choose_k(4) == 1);
  CHECK(choose_k(0) == 0);
  CHECK(choose_k(5) == 1);
  CHECK(choose_k(100) == 20);
}

TEST_CASE("kmeans examples") {
  SUBCASE("two separated pairs") {
    const std::vector<Point3> pts{{0, 0, 0}, {1, 0, 0}, {100, 100, 0}, {101, 100, 0}};
    const auto r = kmeans(pts, 2, 7);
    CHECK(r.converged);
    CHECK(r.labels[0] == r.labels[1]);
    CHECK(r.labels[2] == r.labels[3]);
    CHECK(r.labels[0] != r.labels[2]);
  }
  SUBCASE("k equal to the point count gives singletons") {
    std::mt19937_64 gen(1);
    const auto pts = random_points(gen, 9);
    const auto r = kmeans(pts, 9, 4);
    CHECK(std::set<std::size_t>(r.labels.begin(), r.labels.end()).size() == 9);
    CHECK(kmeans_objective(pts, r) == Approx(0.0));
  }
  SUBCASE("20 random points, k = 3") {
    std::mt19937_64 gen(20);
    const auto pts = random_points(gen, 20);
    const auto r = kmeans(pts, 3, 11);
    CHECK(nearest_own_centroid(pts, r));
    double worst = 0.0;
    for (std::uint64_t s = 100; s < 150; ++s) worst = std::max(worst, kmeans_objective(pts, kmeans(pts, 3, s)));
    CHECK(kmeans_objective(pts, r) <= worst + 1e-9);
  }
  SUBCASE("k larger than the point count is clamped") {
    const std::vector<Point3> pts{{0, 0, 0}, {1, 1, 1}};
    CHECK(kmeans(pts, 5, 0).centroids.size() == 2);
  }
  SUBCASE("duplicate points do not leave clusters empty") {
    const std::vector<Point3> pts(6, Point3{1, 2, 3});
    const auto r = kmeans(pts, 3, 2);
    CHECK(r.labels.size() == 6);
    CHECK(nearest_own_centroid(pts, r));
  }
  CHECK_THROWS_AS(kmeans(std::vector<Point3>{}, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(kmeans(std::vector<Point3>{{0, 0, 0}}, 0, 0), std::invalid_argument);
}

TEST_CASE("kmeans properties on random inputs") {
  std::mt19937_64 gen(44);
  std::uniform_int_distribution<std::size_t> n(1, 60), k(1, 12);
  for (int i = 0; i < 100; ++i) {
    const auto pts = random_points(gen, n(gen));
    const std::size_t kk = k(gen);
    const auto r = kmeans(pts, kk, static_cast<std::uint64_t>(i));
    CHECK(r.labels.size() == pts.size());
    CHECK(nearest_own_centroid(pts, r));
    const auto again = kmeans(pts, kk, static_cast<std::uint64_t>(i));
    CHECK(again.labels == r.labels);
    CHECK(again.centroids == r.centroids);
  }
}

TEST_CASE("cluster_level_events examples") {
  const SolverParams params;
  SUBCASE("no events") {
    CHECK(cluster_level_events({}, PairDistances{}, params, 0).empty());
  }
  SUBCASE("five events form one cluster sorted by score") {
    PairDistances d;
    d.set(0, 1, 1.0);
    d.set(0, 2, 1.0);
    d.set(1, 2, 1.0);
    const std::vector<EventPoint> ev{{{0, 0, 0, 0.1}, 0, 1},
                                     {{1, 0, 0, 0.1}, 1, 0},
                                     {{3, 0, 0, 0.1}, 0, 2},
                                     {{0.5, 0.5, 0, 0.1}, 2, 0},
                                     {{5, 5, 0, 0.1}, 1, 2}};
    const auto clusters = cluster_level_events(ev, d, params, 9);
    REQUIRE(clusters.size() == 1);
    const auto& c = clusters[0];
    CHECK(c.members.size() == 5);
    const auto scores = ccs_scores(ev, d, params);
    double total = 0.0;
    for (double s : scores) total += s;
    CHECK(c.total_score == Approx(total));
    for (std::size_t i = 1; i < c.members.size(); ++i) CHECK(c.members[i - 1].score >= c.members[i].score);
    CHECK(c.flights.front() == c.members.front().point.flight);
    CHECK(std::set<FlightIndex>(c.flights.begin(), c.flights.end()) == std::set<FlightIndex>{0, 1, 2});
    CHECK(c.exclusive == c.flights);
  }
  SUBCASE("a flight in two clusters is exclusive to the earlier one") {
    // flight 0 meets 1 at one place and 2 far away; 12 events give k = 2
    PairDistances d;
    d.set(0, 1, 0.1);
    d.set(0, 2, 0.1);
    std::vector<EventPoint> ev;
    for (int i = 0; i < 3; ++i) {
      ev.push_back({{0.01 * i, 0, 0, 0.1}, 0, 1});
      ev.push_back({{0.01 * i, 0.1, 0, 0.1}, 1, 0});
    }
    for (int i = 0; i < 3; ++i) {
      ev.push_back({{80 + 0.01 * i, 0, 0, 0.5}, 0, 2});
      ev.push_back({{80 + 0.01 * i, 1, 0, 0.5}, 2, 0});
    }
    const auto clusters = cluster_level_events(ev, d, params, 5);
    REQUIRE(clusters.size() == 2);
    const int owner = std::count(clusters[0].exclusive.begin(), clusters[0].exclusive.end(), FlightIndex{0});
    CHECK(owner == 1);
    CHECK(std::count(clusters[1].flights.begin(), clusters[1].flights.end(), FlightIndex{0}) == 1);
    CHECK(std::count(clusters[1].exclusive.begin(), clusters[1].exclusive.end(), FlightIndex{0}) == 0);
    CHECK(clusters[0].total_score >= clusters[1].total_score);
  }
}

TEST_CASE("cluster_level_events partition and determinism") {
  const SolverParams params;
  std::mt19937_64 gen(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto le = clustered_events(gen, 3 + static_cast<std::size_t>(trial));
    const auto clusters = cluster_level_events(le.points, le.distances, params, 1000 + trial);
    std::size_t members = 0;
    std::vector<FlightIndex> exclusive;
    std::set<FlightIndex> owners;
    for (const auto& c : clusters) {
      CHECK_FALSE(c.members.empty());
      members += c.members.size();
      exclusive.insert(exclusive.end(), c.exclusive.begin(), c.exclusive.end());
      for (const auto& m : c.members) owners.insert(m.point.flight);
    }
    for (std::size_t i = 1; i < clusters.size(); ++i)
      CHECK(clusters[i - 1].total_score >= clusters[i].total_score);
    CHECK(members == le.points.size());
    std::sort(exclusive.begin(), exclusive.end());
    CHECK(std::adjacent_find(exclusive.begin(), exclusive.end()) == exclusive.end());
    CHECK(std::set<FlightIndex>(exclusive.begin(), exclusive.end()) == owners);

    const auto again = cluster_level_events(le.points, le.distances, params, 1000 + trial);
    REQUIRE(again.size() == clusters.size());
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      CHECK(again[i].flights == clusters[i].flights);
      CHECK(again[i].exclusive == clusters[i].exclusive);
      CHECK(again[i].total_score == clusters[i].total_score);
    }
  }
}
