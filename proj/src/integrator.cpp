#include "qhlc/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "dopri.hpp"

namespace qhlc {

namespace {

using detail::dopri_step;
using detail::error_norm;
using detail::step_factor;

constexpr double kEventTol = 1e-12;

double norm(const Vec2& s) { return std::hypot(s[0], s[1]); }

double event_value(const EventSpec& e, const Field& field, const Vec2& s) {
  if (e.kind == EventSpec::Kind::coordinate_crossing) return s[e.axis] - e.value;
  // k_curve_contact
  return s[0] * eval_f(s[0], field.alpha) + s[1] * s[1];
}

double event_scale(const EventSpec& e, const Field& field, const Vec2& s) {
  if (e.kind == EventSpec::Kind::coordinate_crossing) return std::max(1.0, std::abs(e.value));
  return std::max({1.0, std::abs(s[0] * eval_f(s[0], field.alpha)), s[1] * s[1]});
}

bool sign_change(Crossing c, double g0, double g1) {
  const bool rising = g0 < 0.0 && g1 >= 0.0;
  const bool falling = g0 > 0.0 && g1 <= 0.0;
  switch (c) {
    case Crossing::rising: return rising;
    case Crossing::falling: return falling;
    case Crossing::either: return rising || falling;
  }
  return false;
}

bool is_crossing(const EventSpec& e) {
  return e.kind == EventSpec::Kind::coordinate_crossing || e.kind == EventSpec::Kind::k_curve_contact;
}

struct Located {
  double theta;
  Vec2 state;
};

// Illinois iteration on the step fraction theta in (0, 1]; each trial state is a
// fresh Dormand-Prince step of size theta * h from the start of the step.
template <class F>
Located locate(const EventSpec& e, const Field& field, const F& rhs, double t, const Vec2& y,
               const Vec2& k1, double h, double g0, double g1, const Vec2& y1) {
  const double tol = kEventTol * event_scale(e, field, y1);
  if (std::abs(g1) <= tol) return {1.0, y1};

  double lo = 0.0, hi = 1.0, glo = g0, ghi = g1;
  Located best{1.0, y1};
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double theta = (lo * ghi - hi * glo) / (ghi - glo);
    if (!(theta > lo && theta < hi)) theta = 0.5 * (lo + hi);
    const Vec2 s = dopri_step<2>(rhs, t, y, k1, theta * h).y;
    const double g = event_value(e, field, s);
    best = {theta, s};
    if (std::abs(g) <= tol || hi - lo <= 1e-16) break;
    if ((g < 0.0) == (glo < 0.0)) {
      lo = theta;
      glo = g;
      if (side == -1) ghi *= 0.5;
      side = -1;
    } else {
      hi = theta;
      ghi = g;
      if (side == 1) glo *= 0.5;
      side = 1;
    }
  }
  return best;
}

}  // namespace

EventSpec EventSpec::coordinate(std::string id, int axis, double value, Crossing crossing) {
  EventSpec e;
  e.kind = Kind::coordinate_crossing;
  e.id = std::move(id);
  e.axis = axis;
  e.value = value;
  e.crossing = crossing;
  return e;
}

EventSpec EventSpec::k_curve(std::string id, Crossing crossing) {
  EventSpec e;
  e.kind = Kind::k_curve_contact;
  e.id = std::move(id);
  e.crossing = crossing;
  return e;
}

EventSpec EventSpec::escape(double radius) {
  EventSpec e;
  e.kind = Kind::norm_exceeds;
  e.id = "escape";
  e.radius = radius;
  return e;
}

EventSpec EventSpec::capture(int equilibrium_index, Vec2 center, double radius, double max_speed) {
  EventSpec e;
  e.kind = Kind::ball_entry;
  e.id = "P" + std::to_string(equilibrium_index);
  e.center = center;
  e.radius = radius;
  e.max_speed = max_speed;
  e.equilibrium_index = equilibrium_index;
  return e;
}

Trajectory integrate(const Field& field, const Vec2& start, Direction direction,
                     std::span<const EventSpec> events, const IntegrateOptions& options) {
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) {
    throw DomainError("integrate requires rtol > 0 and atol > 0");
  }
  if (!std::isfinite(start[0]) || !std::isfinite(start[1])) {
    throw DomainError("integrate requires a finite start state");
  }
  for (const EventSpec& e : events) {
    if (e.kind == EventSpec::Kind::k_curve_contact && field.chart != Chart::vz) {
      throw DomainError("K-curve contact events only exist in the vz chart");
    }
  }

  const double sgn = direction == Direction::forward ? 1.0 : -1.0;
  const auto rhs = [&](double, const Vec2& s) {
    const Vec2 d = field(s);
    return Vec2{sgn * d[0], sgn * d[1]};
  };

  Trajectory traj;
  traj.direction = direction;

  // `t` below runs forward; samples store the signed parameter.
  double t = 0.0;
  Vec2 y = start;
  Vec2 k1 = rhs(t, y);
  traj.samples.push_back({0.0, y});
  Vec2 last_stored = y;

  const auto finish = [&](Termination term, std::string id, int eq) {
    if (traj.samples.back().t != sgn * t || traj.samples.back().state != y) {
      traj.samples.push_back({sgn * t, y});
    }
    traj.termination = term;
    traj.event_id = std::move(id);
    traj.equilibrium_index = eq;
  };

  const auto check_state_events = [&]() {
    for (const EventSpec& e : events) {
      if (e.kind == EventSpec::Kind::norm_exceeds && norm(y) > e.radius) {
        finish(Termination::escaped, e.id, -1);
        return true;
      }
      if (e.kind == EventSpec::Kind::ball_entry) {
        const Vec2 d{y[0] - e.center[0], y[1] - e.center[1]};
        if (norm(d) <= e.radius && norm(k1) <= e.max_speed) {
          finish(Termination::equilibrium_captured, e.id, e.equilibrium_index);
          return true;
        }
      }
    }
    return false;
  };
  if (check_state_events()) return traj;

  // Initial step from the ratio |y| / |y'|, capped.
  double h = 1e-3;
  {
    const double d0 = std::max(std::abs(y[0]), std::abs(y[1]));
    const double d1 = std::max(std::abs(k1[0]), std::abs(k1[1]));
    if (d0 > 1e-5 && d1 > 1e-5) h = 0.01 * d0 / d1;
    h = std::min({h, 1.0, options.max_step});
  }

  std::vector<double> g_prev(events.size(), 0.0);
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (is_crossing(events[i])) g_prev[i] = event_value(events[i], field, y);
  }

  while (true) {
    if (traj.steps >= options.max_steps) {
      if (options.report_max_steps) {
        finish(Termination::max_steps, {}, -1);
        return traj;
      }
      throw MaxStepsExceeded("integration exceeded " + std::to_string(options.max_steps) + " steps");
    }
    h = std::min(h, options.max_step);
    // Below a few ulps of t the step no longer advances the parameter.
    if (h < 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      throw StiffnessError("step size underflow at parameter " + std::to_string(sgn * t));
    }

    const auto step = dopri_step<2>(rhs, t, y, k1, h);
    const double err = error_norm<2>(y, step, options.rtol, options.atol);
    if (!(err <= 1.0)) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      ++traj.rejected;
      continue;
    }

    // Earliest crossing inside the accepted step.
    std::optional<std::pair<std::size_t, Located>> hit;
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (!is_crossing(events[i])) continue;
      const double g1 = event_value(events[i], field, step.y);
      if (sign_change(events[i].crossing, g_prev[i], g1)) {
        const Located loc = locate(events[i], field, rhs, t, y, k1, h, g_prev[i], g1, step.y);
        if (!hit || loc.theta < hit->second.theta) hit = {i, loc};
      }
      g_prev[i] = g1;
    }
    if (hit) {
      t += hit->second.theta * h;
      y = hit->second.state;
      ++traj.steps;
      finish(Termination::event_hit, events[hit->first].id, -1);
      return traj;
    }

    t += h;
    y = step.y;
    k1 = step.k7;
    ++traj.steps;

    if (check_state_events()) return traj;

    const Vec2 d{y[0] - last_stored[0], y[1] - last_stored[1]};
    if (options.sample_spacing <= 0.0 || norm(d) >= options.sample_spacing) {
      traj.samples.push_back({sgn * t, y});
      last_stored = y;
    }
    h *= step_factor(err);
  }
}

double integrate_graph(double v0, double z0, Alpha alpha, double v_target, double rtol) {
  if (!(rtol > 0.0)) throw DomainError("integrate_graph requires rtol > 0");
  if (v_target == v0) return z0;

  const auto denom = [&](double v, double z) { return v * eval_f(v, alpha) + z * z; };
  if (!(denom(v0, z0) > 0.0)) {
    throw LeftGraphRegionError("start point is not in the region v f + z^2 > 0");
  }

  bool left_region = false;
  const auto rhs = [&](double v, const std::array<double, 1>& z) {
    const double f = eval_f(v, alpha);
    const double d = v * f + z[0] * z[0];
    if (!(d > 0.0)) {
      left_region = true;
      return std::array<double, 1>{NAN};
    }
    return std::array<double, 1>{z[0] * f / d};
  };

  const double atol = rtol;
  const double span = v_target - v0;
  const double sgn = span > 0.0 ? 1.0 : -1.0;
  double v = v0;
  std::array<double, 1> z{z0};
  auto k1 = rhs(v, z);
  double h = sgn * std::min(std::abs(span), 1e-2);

  for (std::size_t steps = 0; steps < 10'000'000; ++steps) {
    const double remaining = v_target - v;
    if (std::abs(h) >= std::abs(remaining)) h = remaining;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(v))) {
      if (left_region) throw LeftGraphRegionError("graph-form solution left v f + z^2 > 0");
      throw StiffnessError("graph-form step size underflow");
    }
    left_region = false;
    const auto step = detail::dopri_step<1>(rhs, v, z, k1, h);
    const double err = error_norm<1>(z, step, rtol, atol);
    if (!(err <= 1.0)) {
      h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      continue;
    }
    const bool last = h == remaining;
    v = last ? v_target : v + h;
    z = step.y;
    k1 = step.k7;
    if (last) return z[0];
    h *= step_factor(err);
  }
  throw MaxStepsExceeded("graph-form integration exceeded its step budget");
}

}  // namespace qhlc
