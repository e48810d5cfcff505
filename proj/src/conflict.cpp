#include "cdr/conflict.hpp"

#include <algorithm>
#include <cmath>

#include "cdr/geometry.hpp"

namespace cdr {

TimeGrid::TimeGrid(double t_start, double t_end, double dt) : t_start_(t_start), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (!(t_end >= t_start)) throw std::invalid_argument("TimeGrid: empty window");
  last_ = static_cast<std::int64_t>(std::floor((t_end - t_start) / dt));
  while (last_ > 0 && time(last_) > t_end) --last_;
  while (time(last_ + 1) <= t_end) ++last_;
}

std::pair<std::int64_t, std::int64_t> TimeGrid::range(double t0, double t1) const {
  if (t1 < t0) return {1, 0};
  std::int64_t k0 = static_cast<std::int64_t>(std::ceil((t0 - t_start_) / dt_));
  k0 = std::clamp<std::int64_t>(k0, 0, last_ + 1);
  while (k0 > 0 && time(k0 - 1) >= t0) --k0;
  while (k0 <= last_ && time(k0) < t0) ++k0;

  std::int64_t k1 = static_cast<std::int64_t>(std::floor((t1 - t_start_) / dt_));
  k1 = std::clamp<std::int64_t>(k1, -1, last_);
  while (k1 >= 0 && time(k1) > t1) --k1;
  while (k1 < last_ && time(k1 + 1) <= t1) ++k1;
  return {k0, k1};
}

SampledTrack sample_track(const FlightSpec& flight, double theta, const TimeGrid& grid) {
  SampledTrack track;
  const auto [k0, k1] = grid.range(flight.release_time, exit_time(flight, theta));
  if (k0 > k1) return track;
  track.first = k0;
  track.points.reserve(static_cast<std::size_t>(k1 - k0 + 1));
  for (std::int64_t k = k0; k <= k1; ++k) {
    const double traveled = (grid.time(k) - flight.release_time) * flight.speed;
    track.points.push_back(position_along(flight.entry, flight.exit, theta, traveled));
  }
  return track;
}

std::optional<MinDistanceEvent> min_distance_event(FlightIndex a, const SampledTrack& track_a,
                                                   FlightIndex b, const SampledTrack& track_b,
                                                   int level, const TimeGrid& grid) {
  if (track_a.empty() || track_b.empty()) return std::nullopt;
  const std::int64_t lo = std::max(track_a.first, track_b.first);
  const std::int64_t hi = std::min(track_a.last(), track_b.last());
  if (lo > hi) return std::nullopt;

  const Vec2* pa = track_a.points.data() + (lo - track_a.first);
  const Vec2* pb = track_b.points.data() + (lo - track_b.first);
  double best = std::numeric_limits<double>::infinity();
  std::int64_t best_k = lo;
  for (std::int64_t i = 0, n = hi - lo + 1; i < n; ++i) {
    const double dx = pa[i].x - pb[i].x;
    const double dy = pa[i].y - pb[i].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      best_k = lo + i;
    }
  }

  MinDistanceEvent ev;
  ev.flight_a = a;
  ev.flight_b = b;
  ev.distance = std::sqrt(best);
  ev.time = grid.time(best_k);
  const Vec2 qa = track_a.at(best_k);
  const Vec2 qb = track_b.at(best_k);
  ev.event_a = {qa.x, qa.y, level, ev.time};
  ev.event_b = {qb.x, qb.y, level, ev.time};
  return ev;
}

std::optional<MinDistanceEvent> min_distance_event(const Scenario& scenario,
                                                   const Assignment& assignment, FlightIndex a,
                                                   FlightIndex b, const SolverParams& params) {
  if (assignment.level.at(a) != assignment.level.at(b))
    throw std::invalid_argument("min_distance_event: flights are on different levels");
  const TimeGrid grid(scenario.sector(), params);
  const SampledTrack ta = sample_track(scenario.flight(a), assignment.theta.at(a), grid);
  const SampledTrack tb = sample_track(scenario.flight(b), assignment.theta.at(b), grid);
  return min_distance_event(a, ta, b, tb, assignment.level[a], grid);
}

double ptd(const PosTime& p, const PosTime& q, double v0) {
  if (p.level != q.level) return std::numeric_limits<double>::infinity();
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  const double dz = v0 * (p.t - q.t);
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<EventPoint> event_points(std::span<const MinDistanceEvent> events) {
  std::vector<EventPoint> out;
  out.reserve(events.size() * 2);
  for (const auto& ev : events) {
    out.push_back({ev.event_a, ev.flight_a, ev.flight_b});
    out.push_back({ev.event_b, ev.flight_b, ev.flight_a});
  }
  return out;
}

double ccs_pair(const EventPoint& p, const EventPoint& q, const PairDistances& distances,
                const SolverParams& params) {
  if (p.flight == q.flight) return 0.0;
  const double radius = params.scoring_radius();
  if (!(distances.get(p.flight, q.flight) <= radius)) return 0.0;
  return std::max(0.0, radius - ptd(p.pos, q.pos, params.v0));
}

double ccs_event(std::size_t index, std::span<const EventPoint> points,
                 const PairDistances& distances, const SolverParams& params) {
  double sum = 0.0;
  for (std::size_t j = 0; j < points.size(); ++j)
    if (j != index) sum += ccs_pair(points[index], points[j], distances, params);
  return sum;
}

std::vector<double> ccs_scores(std::span<const EventPoint> points, const PairDistances& distances,
                               const SolverParams& params) {
  std::vector<double> scores(points.size(), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double v = ccs_pair(points[i], points[j], distances, params);
      scores[i] += v;
      scores[j] += v;
    }
  }
  return scores;
}

double tcs(std::span<const EventPoint> points, const PairDistances& distances,
           const SolverParams& params) {
  double total = 0.0;
  for (double s : ccs_scores(points, distances, params)) total += s;
  return total;
}

double flight_score(FlightIndex flight, std::span<const EventPoint> points,
                    const PairDistances& distances, const SolverParams& params) {
  double best = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].flight == flight) best = std::max(best, ccs_event(i, points, distances, params));
  if (best < 0.0) throw std::invalid_argument("flight_score: flight owns no event in the set");
  return best;
}

std::vector<FlightIndex> LevelConflicts::violating_flights() const {
  std::vector<FlightIndex> out;
  for (const auto& ev : violating) {
    out.push_back(ev.flight_a);
    out.push_back(ev.flight_b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LevelConflicts detect_level_conflicts(const Scenario& scenario, std::span<const FlightIndex> flights,
                                      std::span<const double> theta, int level,
                                      const SolverParams& params) {
  const TimeGrid grid(scenario.sector(), params);
  LevelConflicts out;
  out.level = level;
  out.flights.assign(flights.begin(), flights.end());

  std::vector<SampledTrack> tracks;
  tracks.reserve(flights.size());
  for (FlightIndex f : flights) tracks.push_back(sample_track(scenario.flight(f), theta[f], grid));

  for (std::size_t i = 0; i < flights.size(); ++i) {
    if (tracks[i].empty()) continue;
    for (std::size_t j = i + 1; j < flights.size(); ++j) {
      if (tracks[j].empty() || tracks[j].first > tracks[i].last() ||
          tracks[i].first > tracks[j].last())
        continue;
      auto ev = min_distance_event(flights[i], tracks[i], flights[j], tracks[j], level, grid);
      if (!ev) continue;
      out.distances.set(flights[i], flights[j], ev->distance);
      if (ev->distance < params.separation) out.violating.push_back(*ev);
    }
  }
  return out;
}

ConflictReport detect_conflicts(const Scenario& scenario, const Assignment& assignment,
                                const SolverParams& params) {
  const int levels = scenario.level_count();
  std::vector<std::vector<FlightIndex>> by_level(static_cast<std::size_t>(levels));
  for (FlightIndex f = 0; f < scenario.size(); ++f) {
    const int l = assignment.level.at(f);
    if (l < 0 || l >= levels) throw std::out_of_range("assignment level out of range");
    by_level[static_cast<std::size_t>(l)].push_back(f);
  }

  ConflictReport report;
  for (int l = 0; l < levels; ++l) {
    report.levels.push_back(detect_level_conflicts(
        scenario, by_level[static_cast<std::size_t>(l)], assignment.theta, l, params));
    const auto& lc = report.levels.back();
    report.violating_pairs += lc.violating.size();
    const auto vf = lc.violating_flights();
    report.violating_flights.insert(report.violating_flights.end(), vf.begin(), vf.end());
  }
  std::sort(report.violating_flights.begin(), report.violating_flights.end());
  return report;
}

int peak_simultaneous(const Scenario& scenario, std::span<const double> theta,
                      const SolverParams& params) {
  const TimeGrid grid(scenario.sector(), params);
  std::vector<int> delta(static_cast<std::size_t>(grid.last() + 2), 0);
  for (FlightIndex f = 0; f < scenario.size(); ++f) {
    const auto& fl = scenario.flight(f);
    const auto [k0, k1] = grid.range(fl.release_time, exit_time(fl, theta[f]));
    if (k0 > k1) continue;
    ++delta[static_cast<std::size_t>(k0)];
    --delta[static_cast<std::size_t>(k1 + 1)];
  }
  int running = 0;
  int peak = 0;
  for (int d : delta) {
    running += d;
    peak = std::max(peak, running);
  }
  return peak;
}

}  // namespace cdr
