#pragma once

// Adaptive Dormand-Prince 5(4) propagation of either chart with terminal
// events: coordinate crossings, K-curve contact, equilibrium capture and
// escape.

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qhlc/core.hpp"

namespace qhlc {

enum class Chart { xy, vz };

/// A vector field of the family, in one of the two charts.
struct Field {
  Chart chart;
  Alpha alpha;

  Vec2 operator()(const Vec2& s) const noexcept {
    return chart == Chart::xy ? field_xy(s[0], s[1], alpha) : field_vz(s[0], s[1], alpha);
  }
};

enum class Direction { forward, backward };

/// Sign change of an event function, in the order the integration visits it.
enum class Crossing { rising, falling, either };

struct EventSpec {
  enum class Kind {
    coordinate_crossing,  // state[axis] - value changes sign
    k_curve_contact,      // v f(v) + z^2 changes sign (vz chart only)
    norm_exceeds,         // |state| > radius
    ball_entry,           // |state - center| <= radius and |field| <= max_speed
  };

  Kind kind = Kind::coordinate_crossing;
  std::string id;
  int axis = 0;
  double value = 0.0;
  Crossing crossing = Crossing::either;
  Vec2 center{};
  double radius = 0.0;
  double max_speed = std::numeric_limits<double>::infinity();
  int equilibrium_index = -1;

  static EventSpec coordinate(std::string id, int axis, double value, Crossing crossing);
  static EventSpec k_curve(std::string id, Crossing crossing);
  static EventSpec escape(double radius);
  static EventSpec capture(int equilibrium_index, Vec2 center, double radius = 1e-8,
                           double max_speed = 1e-10);
};

struct Sample {
  double t;
  Vec2 state;
};

enum class Termination { event_hit, equilibrium_captured, escaped, max_steps };

struct Trajectory {
  std::vector<Sample> samples;
  Termination termination = Termination::max_steps;
  std::string event_id;         // set for event_hit
  int equilibrium_index = -1;   // set for equilibrium_captured
  Direction direction = Direction::forward;
  std::size_t steps = 0;        // accepted steps
  std::size_t rejected = 0;

  const Sample& last() const { return samples.back(); }
};

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  std::size_t max_steps = 10'000'000;
  /// Largest |h|; infinity means unbounded.
  double max_step = std::numeric_limits<double>::infinity();
  /// Store a sample only once the state moved this far from the last stored
  /// one (0 keeps every accepted step). First and last states are always kept.
  double sample_spacing = 0.0;
  /// Report exhaustion as Termination::max_steps instead of throwing.
  bool report_max_steps = false;
};

/// Integrates `field` from `start` until the first event triggers.
///
/// Crossing events are located by re-stepping from the start of the bracketing
/// step and refined until |g| <= 1e-12 * max(1, scale). Throws StiffnessError
/// when the step size underflows and MaxStepsExceeded on exhaustion (unless
/// `report_max_steps`).
Trajectory integrate(const Field& field, const Vec2& start, Direction direction,
                     std::span<const EventSpec> events, const IntegrateOptions& options = {});

/// z at v_target on the solution of dz/dv = z f / (v f + z^2) through (v0, z0).
/// Throws LeftGraphRegionError if v f + z^2 <= 0 is met on the way.
double integrate_graph(double v0, double z0, Alpha alpha, double v_target, double rtol = 1e-10);

}  // namespace qhlc
