#include "cdr/geometry.hpp"

#include <cmath>
#include <numbers>

namespace cdr {

namespace {

// Below this the arc is indistinguishable from the chord in double precision
// (sagitta ~ chord * theta / 4).
constexpr double kStraightTheta = 1e-12;

// theta / sin(theta) with a series below 1e-4 to avoid cancellation.
double arc_stretch(double theta) {
  const double a = std::abs(theta);
  if (a < 1e-4) {
    const double a2 = a * a;
    return 1.0 + a2 / 6.0 + 7.0 * a2 * a2 / 360.0;
  }
  return a / std::sin(a);
}

double travel_time(double length, double speed) { return length / speed; }

}  // namespace

ArcSpec arc_spec(Vec2 entry, Vec2 exit, double theta) {
  if (entry == exit) throw std::invalid_argument("arc_spec: entry and exit coincide");
  if (theta == 0.0) throw std::invalid_argument("arc_spec: theta = 0 is the straight path");
  if (std::abs(theta) > std::numbers::pi / 2)
    throw std::invalid_argument("arc_spec: |theta| exceeds pi/2");

  const Vec2 d = exit - entry;
  const double chord = d.norm();
  const Vec2 along = (1.0 / chord) * d;
  const Vec2 left{-along.y, along.x};
  const double a = std::abs(theta);
  const double side = theta > 0.0 ? 1.0 : -1.0;

  ArcSpec arc;
  arc.chord = chord;
  arc.radius = chord / (2.0 * std::sin(a));
  const Vec2 mid = 0.5 * (entry + exit);
  // The centre sits on the side opposite the bulge.
  arc.center = mid - (side * arc.radius * std::cos(a)) * left;
  const Vec2 r0 = entry - arc.center;
  arc.start_angle = std::atan2(r0.y, r0.x);
  arc.sweep = -2.0 * theta;
  return arc;
}

double path_length(Vec2 entry, Vec2 exit, double theta) {
  return distance(entry, exit) * arc_stretch(theta);
}

double exit_time(const FlightSpec& flight, double theta) {
  return flight.release_time + travel_time(path_length(flight.entry, flight.exit, theta), flight.speed);
}

Vec2 position_along(Vec2 entry, Vec2 exit, double theta, double traveled) {
  const Vec2 d = exit - entry;
  const double chord = d.norm();
  const Vec2 along = (1.0 / chord) * d;
  if (std::abs(theta) < kStraightTheta) return entry + traveled * along;

  const Vec2 left{-along.y, along.x};
  const double a = std::abs(theta);
  const double two_r = chord / std::sin(a);
  // Rotating the entry point about the centre by phi = traveled / R, written
  // in the chord frame with half-angle identities so it stays exact as R grows.
  const double half_phi = traveled * std::sin(a) / chord;
  const double s = std::sin(half_phi);
  const double u = two_r * std::cos(a - half_phi) * s;
  const double w = two_r * std::sin(a - half_phi) * s * (theta > 0.0 ? 1.0 : -1.0);
  return entry + u * along + w * left;
}

Vec2 straight_position(const FlightSpec& flight, double t) {
  return arc_position(flight, 0.0, t);
}

Vec2 arc_position(const FlightSpec& flight, double theta, double t) {
  const double length = path_length(flight.entry, flight.exit, theta);
  const double t_out = flight.release_time + travel_time(length, flight.speed);
  if (t < flight.release_time || t > t_out)
    throw std::out_of_range("flight '" + flight.id + "' is not airborne at t=" + std::to_string(t));
  return position_along(flight.entry, flight.exit, theta, (t - flight.release_time) * flight.speed);
}

}  // namespace cdr
