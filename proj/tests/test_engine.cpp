#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cdr/engine.hpp"
#include "cdr/rfleg_solver.hpp"
#include "cdr/scengen.hpp"
#include "support.hpp"

using namespace cdr;

namespace {

// Leaves every flight straight.
class StraightSolver final : public PlanarSolver {
 public:
  std::string_view name() const override { return "straight"; }
  LevelSolution solve(const Scenario&, std::span<const FlightIndex> flights, int, const SolverParams&,
                      std::uint64_t) const override {
    return {std::vector<double>(flights.size(), 0.0), {}};
  }
};

class ThrowingSolver final : public PlanarSolver {
 public:
  std::string_view name() const override { return "throwing"; }
  LevelSolution solve(const Scenario&, std::span<const FlightIndex>, int, const SolverParams&,
                      std::uint64_t) const override {
    throw std::runtime_error("boom");
  }
};

class OutOfBoundsSolver final : public PlanarSolver {
 public:
  std::string_view name() const override { return "wild"; }
  LevelSolution solve(const Scenario&, std::span<const FlightIndex> flights, int, const SolverParams&,
                      std::uint64_t) const override {
    return {std::vector<double>(flights.size(), 1.0), {}};
  }
};

Scenario small_generated(std::uint64_t seed, int flights = 80, int levels = 4) {
  GenConfig g;
  g.flight_count = flights;
  g.level_count = levels;
  g.release_horizon = 0.5;
  g.seed = seed;
  return generate(g);
}

}  // namespace

TEST_CASE("assign_round_robin") {
  SUBCASE("two clusters over three levels") {
    Assignment a(6);
    const std::vector<std::vector<FlightIndex>> lists{{0, 1, 2, 3}, {4, 5}};
    assign_round_robin(lists, 3, a);
    CHECK(a.level == std::vector<int>{0, 1, 2, 0, 1, 2});
  }
  SUBCASE("one cluster of two flights over twelve levels") {
    Assignment a(2);
    const std::vector<std::vector<FlightIndex>> lists{{1, 0}};
    assign_round_robin(lists, 12, a);
    CHECK(a.level[1] == 0);
    CHECK(a.level[0] == 1);
  }
}

TEST_CASE("initialize_levels") {
  const SolverParams p;
  SUBCASE("no conflicts keeps everyone on level 0") {
    const Scenario sc = validate_scenario({40, 40, 5, 0, 1}, {{"P", {0, 10}, {40, 10}, 0, 533},
                                                               {"Q", {0, 30}, {40, 30}, 0, 533}});
    const Assignment a = initialize_levels(sc, p, 1);
    CHECK(a.level == std::vector<int>{0, 0});
    CHECK(a.theta == std::vector<double>{0, 0});
  }
  SUBCASE("a crossing pair lands on levels 0 and 1") {
    const Scenario sc = testing::crossing_pair(20, 533, 12);
    const Assignment a = initialize_levels(sc, p, 1);
    CHECK(std::set<int>(a.level.begin(), a.level.end()) == std::set<int>{0, 1});
  }
  SUBCASE("generated traffic spreads over the levels") {
    const Scenario sc = small_generated(3);
    const Assignment a = initialize_levels(sc, p, 3);
    CHECK(a.size() == sc.size());
    for (int l : a.level) CHECK((l >= 0 && l < sc.level_count()));
    CHECK(std::set<int>(a.level.begin(), a.level.end()).size() > 1);
  }
}

TEST_CASE("select_dispersal") {
  const std::vector<std::vector<FlightIndex>> clusters{{0, 1}, {2, 3}};
  const std::unordered_map<FlightIndex, double> scores{{0, 9}, {1, 4}, {2, 7}, {3, 1}};
  CHECK(select_dispersal(clusters, scores, 1, 2) == std::vector<FlightIndex>{0, 2});
  CHECK(select_dispersal(clusters, scores, 1, 3) == std::vector<FlightIndex>{0, 2, 1});
  CHECK(select_dispersal(clusters, scores, 2, 3) == std::vector<FlightIndex>{0, 1, 2});
  CHECK(select_dispersal(clusters, scores, 1, 10).size() == 4);
  CHECK(select_dispersal(clusters, scores, 1, 0).empty());
  // unscored flights are not candidates
  const std::unordered_map<FlightIndex, double> partial{{1, 4}, {3, 1}};
  CHECK(select_dispersal(clusters, partial, 1, 2) == std::vector<FlightIndex>{1, 3});
  // order within a cluster follows the scores, not the list
  const std::vector<std::vector<FlightIndex>> reversed{{1, 0}};
  CHECK(select_dispersal(reversed, scores, 1, 1) == std::vector<FlightIndex>{0});
}

TEST_CASE("disperse") {
  const SolverParams p;
  SUBCASE("levels without conflicts lose nobody") {
    const Scenario sc = validate_scenario({40, 40, 3, 0, 1}, {{"P", {0, 10}, {40, 10}, 0, 533},
                                                               {"Q", {0, 30}, {40, 30}, 0, 533}});
    const Assignment a(2);
    const auto post = detect_conflicts(sc, a, p);
    Rng rng(1);
    std::vector<FlightIndex> moved;
    CHECK(disperse(a, {}, post, p, rng, &moved) == a);
    CHECK(moved.empty());
  }
  SUBCASE("the funnel gives up at most R flights to other levels") {
    const Scenario sc = [] {
      const Scenario f = testing::funnel(8);
      return validate_scenario({40, 40, 4, 0, 1}, f.flights());
    }();
    const Assignment a(sc.size());
    const auto post = detect_conflicts(sc, a, p);
    const auto clusters = cluster_level_events(event_points(post.levels[0].violating),
                                               post.levels[0].distances, p, 4);
    const std::vector<std::vector<EventCluster>> level_clusters{clusters, {}, {}, {}};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      std::vector<FlightIndex> moved;
      const Assignment next = disperse(a, level_clusters, post, p, rng, &moved);
      CHECK(moved.size() == static_cast<std::size_t>(p.max_dispersed_per_level));
      for (FlightIndex f = 0; f < sc.size(); ++f) {
        const bool was_moved = std::find(moved.begin(), moved.end(), f) != moved.end();
        CHECK((next.level[f] != 0) == was_moved);
        CHECK((next.level[f] >= 0 && next.level[f] < 4));
        CHECK(next.theta[f] == 0.0);
      }
    }
  }
  SUBCASE("a single-level sector never disperses") {
    const Scenario sc = testing::funnel(6);
    const Assignment a(sc.size());
    const auto post = detect_conflicts(sc, a, p);
    Rng rng(1);
    CHECK(disperse(a, {}, post, p, rng) == a);
  }
}

TEST_CASE("run_iteration") {
  const SolverParams p;
  const RfLegSolver rf;
  SUBCASE("no conflicts converges without changes") {
    const Scenario sc = validate_scenario({40, 40, 2, 0, 1}, {{"P", {0, 10}, {40, 10}, 0, 533},
                                                               {"Q", {0, 30}, {40, 30}, 0, 533}});
    const IterationState s0 = make_initial_state(sc, Assignment(2), p);
    const IterationState s1 = run_iteration(sc, s0, rf, p, 1);
    CHECK(s1.converged);
    CHECK(s1.assignment == s0.assignment);
    CHECK(s1.iteration == 1);
  }
  SUBCASE("a solver that resolves everything converges") {
    const Scenario sc = testing::crossing_pair(20, 533, 2);
    const IterationState s0 = make_initial_state(sc, Assignment(2), p);
    CHECK_FALSE(s0.converged);
    const IterationState s1 = run_iteration(sc, s0, rf, p, 1);
    CHECK(s1.converged);
    CHECK(s1.metrics.violating_pairs == 0);
    CHECK(s1.dispersed.empty());
  }
  SUBCASE("residual conflicts are dispersed, at most R per level") {
    const Scenario sc = validate_scenario({40, 40, 3, 0, 1}, testing::funnel(8).flights());
    const IterationState s0 = make_initial_state(sc, Assignment(sc.size()), p);
    const StraightSolver straight;
    const IterationState s1 = run_iteration(sc, s0, straight, p, 5);
    CHECK_FALSE(s1.converged);
    CHECK(s1.metrics.violating_pairs == s0.metrics.violating_pairs);
    CHECK(s1.dispersed.size() == 2);
    CHECK(s1.level_flights[0].size() == sc.size() - 2);
    const IterationState held = run_iteration(sc, s0, straight, p, 5, false);
    CHECK(held.dispersed.empty());
    CHECK(held.assignment == s0.assignment);
  }
  SUBCASE("a failing solver keeps the previous trajectories") {
    const Scenario sc = testing::crossing_pair(20, 533, 2);
    Assignment start(2);
    start.theta = {0.1, -0.1};
    const IterationState s0 = make_initial_state(sc, start, p);
    const ThrowingSolver throwing;
    const IterationState s1 = run_iteration(sc, s0, throwing, p, 1, false);
    CHECK(s1.assignment.theta == start.theta);
    const OutOfBoundsSolver wild;
    const IterationState s2 = run_iteration(sc, s0, wild, p, 1, false);
    CHECK(s2.assignment.theta == start.theta);
  }
}

TEST_CASE("solve") {
  const SolverParams p;
  const RfLegSolver rf;
  SUBCASE("conflict-free scenario takes no iterations") {
    const Scenario sc = validate_scenario({40, 40, 2, 0, 1}, {{"P", {0, 10}, {40, 10}, 0, 533}});
    const auto r = solve(sc, p, rf, 1);
    CHECK(r.iterations_run == 0);
    CHECK(r.converged);
    CHECK(r.unresolved_flights.empty());
    CHECK(r.per_iteration.size() == 1);
    CHECK(r.per_flight[0].extension_ratio == 1.0);
  }
  SUBCASE("N = 0 reports the initialized state") {
    SolverParams q = p;
    q.max_iterations = 0;
    const Scenario sc = small_generated(9);
    const auto r = solve(sc, q, rf, 9);
    CHECK(r.iterations_run == 0);
    CHECK(r.per_iteration.size() == 1);
    CHECK(r.final_assignment == initialize_levels(sc, q, 9));
    CHECK(r.unresolved_flights.size() == r.per_iteration[0].conflicting_flights);
  }
  SUBCASE("generated traffic: invariants and determinism") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Scenario sc = small_generated(seed, 90, 3);
      const auto r = solve(sc, p, rf, seed);
      CHECK(r.final_assignment.size() == sc.size());
      CHECK(r.per_iteration.size() == static_cast<std::size_t>(r.iterations_run) + 1);
      CHECK(r.iterations_run <= p.max_iterations);
      for (std::size_t i = 0; i < r.per_iteration.size(); ++i)
        CHECK(r.per_iteration[i].iteration == static_cast<int>(i));
      if (r.converged) CHECK(r.per_iteration.back().violating_pairs == 0);
      const auto check = detect_conflicts(sc, r.final_assignment, p);
      CHECK(r.unresolved_flights == check.violating_flights);
      for (const auto& f : r.per_flight) {
        CHECK(f.extension_ratio >= 1.0);
        CHECK((f.level >= 0 && f.level < sc.level_count()));
        CHECK(std::abs(f.theta) <= p.theta_high);
      }
      const auto again = solve(sc, p, rf, seed);
      CHECK(again.final_assignment == r.final_assignment);
      CHECK(again.unresolved_flights == r.unresolved_flights);
    }
  }
  SUBCASE("per-iteration dispersal respects R on every level") {
    const Scenario sc = small_generated(4, 90, 3);
    IterationState state = make_initial_state(sc, initialize_levels(sc, p, 4), p);
    for (int i = 0; i < 4 && !state.converged; ++i) {
      const auto before = state.assignment;
      state = run_iteration(sc, state, rf, p, 4);
      std::map<int, int> left;
      for (FlightIndex f : state.dispersed) ++left[before.level[f]];
      for (const auto& [level, count] : left) CHECK(count <= p.max_dispersed_per_level);
      std::size_t total = 0;
      for (const auto& lf : state.level_flights) total += lf.size();
      CHECK(total == sc.size());
    }
  }
  CHECK_THROWS_AS(solve(testing::crossing_pair(), SolverParams{.separation = -1}, rf, 0), std::invalid_argument);
}
