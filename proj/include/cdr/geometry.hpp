// Straight and RF-leg (constant-radius arc) trajectories between a flight's
// entry and exit fixes, flown at constant ground speed.
//
// An arc is parameterized by its signed half arc angle theta: the chord
// subtends 2|theta| at the centre, radius = chord / (2 sin|theta|), and a
// positive theta bulges to the left of the entry->exit direction.

#pragma once

#include "cdr/model.hpp"

namespace cdr {

struct ArcSpec {
  Vec2 center;
  double radius = 0.0;
  double start_angle = 0.0;  // polar angle of the entry point about center
  double sweep = 0.0;        // counter-clockwise signed sweep; equals -2*theta
  double chord = 0.0;
};

/// Unique arc through entry and exit with half angle |theta|.
/// Throws std::invalid_argument for entry == exit, theta == 0 or |theta| > pi/2.
ArcSpec arc_spec(Vec2 entry, Vec2 exit, double theta);

/// chord * theta / sin(theta); continuous through theta = 0.
double path_length(Vec2 entry, Vec2 exit, double theta);

/// Release time plus travel time along the (possibly curved) path.
double exit_time(const FlightSpec& flight, double theta);

/// Point reached after flying `traveled` nmi along the path. No range check;
/// callers pass traveled in [0, path_length].
Vec2 position_along(Vec2 entry, Vec2 exit, double theta, double traveled);

/// Position on the straight path. Throws std::out_of_range outside the
/// airborne interval [release, exit_time(flight, 0)].
Vec2 straight_position(const FlightSpec& flight, double t);

/// Position on the arc path. Throws std::out_of_range outside the airborne
/// interval [release, exit_time(flight, theta)].
Vec2 arc_position(const FlightSpec& flight, double theta, double t);

}  // namespace cdr
