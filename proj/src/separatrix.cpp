#include "qhlc/separatrix.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <string>
#include <vector>

namespace qhlc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kAlphaFloor = -50.0;

struct Shot {
  Trajectory curve;
  std::optional<double> phi;
  bool fell_into_origin = false;
};

Direction direction_of(Branch which) {
  return which == Branch::minus ? Direction::forward : Direction::backward;
}

// Seed to the first crossing of v = 0 (or whatever ends the run before it).
// No K-curve event here: near the saddle the centre manifold and the K-curve
// agree to O(z^4), below the integration tolerance, and brief numerical dips
// into A- (A+) flow back out across K- (K+) in the shooting direction.
Shot shoot_to_axis(Alpha alpha, Branch which, double z_seed, const SeparatrixOptions& opt,
                   bool keep_samples) {
  const Vec2 seed = seed_separatrix(alpha, which, z_seed);
  std::vector<EventSpec> events{
      EventSpec::coordinate("axis", 0, 0.0, Crossing::either),
      EventSpec::escape(opt.escape_radius),
  };
  if (which == Branch::minus) {
    events.push_back(EventSpec::capture(0, {0.0, 0.0}, opt.capture_radius, opt.capture_speed));
  }
  IntegrateOptions io = opt.integrate;
  if (!keep_samples) io.sample_spacing = kInf;

  Shot shot;
  shot.curve = integrate({Chart::vz, alpha}, seed, direction_of(which), events, io);
  if (shot.curve.termination == Termination::event_hit && shot.curve.event_id == "axis") {
    shot.phi = shot.curve.last().state[1];
  } else if (shot.curve.termination == Termination::equilibrium_captured) {
    shot.fell_into_origin = true;
  }
  return shot;
}

double phi_from_shot(const Shot& shot, Branch which) {
  if (shot.phi) return *shot.phi;
  if (shot.fell_into_origin) return 0.0;
  const Vec2 end = shot.curve.last().state;
  throw NumericalError(std::string(to_string(which == Branch::minus ? Endpoint::HitsKminus
                                                                     : Endpoint::HitsKplus)) +
                       ": separatrix ended at (" + std::to_string(end[0]) + ", " +
                       std::to_string(end[1]) + ") before reaching the z-axis");
}

void check_seed(double phi_coarse, double phi_fine, const SeparatrixOptions& opt) {
  if (std::abs(phi_coarse - phi_fine) > 10.0 * opt.phi_tolerance) {
    throw SeedTooCoarse("phi(0) moved by " + std::to_string(std::abs(phi_coarse - phi_fine)) +
                        " when the seed height was halved");
  }
}

void append(Trajectory& into, const Trajectory& tail) {
  const double offset = into.samples.back().t;
  for (std::size_t i = 1; i < tail.samples.size(); ++i) {
    into.samples.push_back({offset + tail.samples[i].t, tail.samples[i].state});
  }
  into.steps += tail.steps;
  into.rejected += tail.rejected;
  into.termination = tail.termination;
  into.event_id = tail.event_id;
  into.equilibrium_index = tail.equilibrium_index;
}

}  // namespace

std::string_view to_string(Branch b) { return b == Branch::minus ? "Lminus" : "Lplus"; }

std::string_view to_string(Endpoint e) {
  switch (e) {
    case Endpoint::HitsOrigin: return "HitsOrigin";
    case Endpoint::HitsKplus: return "HitsKplus";
    case Endpoint::HitsP3: return "HitsP3";
    case Endpoint::EscapesRight: return "EscapesRight";
    case Endpoint::HitsKminus: return "HitsKminus";
    case Endpoint::HitsP2: return "HitsP2";
    case Endpoint::HitsP1: return "HitsP1";
    case Endpoint::EscapesLeft: return "EscapesLeft";
  }
  return "?";
}

std::string_view to_string(Configuration c) {
  switch (c) {
    case Configuration::I: return "I";
    case Configuration::II: return "II";
    case Configuration::III: return "III";
    case Configuration::IV: return "IV";
  }
  return "?";
}

Vec2 seed_separatrix(Alpha alpha, Branch which, double z_seed) {
  require_four_equilibria(alpha);
  if (!(z_seed > 0.0 && z_seed <= 1e-2)) throw DomainError("z_seed must lie in (0, 1e-2]");
  const auto eq = equilibria(alpha)[which == Branch::minus ? 1 : 3];
  return {eq.position[0] + eq.invariant_curve_quad * z_seed * z_seed, z_seed};
}

double phi_at_zero(Alpha alpha, Branch which, const SeparatrixOptions& opt) {
  if (!opt.seed_check) {
    return phi_from_shot(shoot_to_axis(alpha, which, opt.z_seed, opt, false), which);
  }
  auto fine = std::async(std::launch::async,
                         [&] { return shoot_to_axis(alpha, which, 0.5 * opt.z_seed, opt, false); });
  const double phi = phi_from_shot(shoot_to_axis(alpha, which, opt.z_seed, opt, false), which);
  check_seed(phi, phi_from_shot(fine.get(), which), opt);
  return phi;
}

SeparatrixTrace trace_separatrix(Alpha alpha, Branch which, const SeparatrixOptions& opt) {
  require_four_equilibria(alpha);
  const auto eq = equilibria(alpha);
  const double v1 = eq[1].position[0];
  const double v2 = eq[2].position[0];
  const double v3 = eq[3].position[0];

  Shot shot = shoot_to_axis(alpha, which, opt.z_seed, opt, true);
  SeparatrixTrace trace{which, alpha, std::move(shot.curve), shot.phi, 0.0, Endpoint::HitsOrigin};

  if (opt.seed_check) {
    const Shot fine = shoot_to_axis(alpha, which, 0.5 * opt.z_seed, opt, false);
    if (shot.phi.has_value() != fine.phi.has_value()) {
      throw SeedTooCoarse("halving the seed height changed whether the separatrix meets the z-axis");
    }
    if (shot.phi) check_seed(*shot.phi, *fine.phi, opt);
  }

  const Vec2 end = trace.curve.last().state;
  if (!shot.phi) {
    // Run ended before the z-axis.
    if (shot.fell_into_origin) {
      trace.endpoint = Endpoint::HitsOrigin;
      trace.v_extreme = 0.0;
    } else if (trace.curve.termination == Termination::escaped) {
      trace.endpoint = which == Branch::minus ? Endpoint::EscapesRight : Endpoint::EscapesLeft;
      trace.v_extreme = which == Branch::minus ? kInf : -kInf;
    } else {
      trace.endpoint = end[0] < v2 ? Endpoint::HitsKminus : Endpoint::HitsKplus;
      trace.v_extreme = end[0];
    }
    return trace;
  }

  std::vector<EventSpec> events{
      EventSpec::k_curve("kcurve", Crossing::falling),
      EventSpec::escape(opt.escape_radius),
  };
  if (which == Branch::minus) {
    events.push_back(EventSpec::coordinate("right", 0, v3, Crossing::rising));
    events.push_back(EventSpec::capture(0, {0.0, 0.0}, opt.capture_radius, opt.capture_speed));
    events.push_back(EventSpec::capture(3, {v3, 0.0}, opt.capture_radius, opt.capture_speed));
  } else {
    events.push_back(EventSpec::coordinate("left", 0, v1, Crossing::falling));
    events.push_back(EventSpec::capture(1, {v1, 0.0}, opt.capture_radius, opt.capture_speed));
    events.push_back(EventSpec::capture(2, {v2, 0.0}, opt.capture_radius, opt.capture_speed));
  }
  IntegrateOptions io = opt.integrate;
  io.max_steps = opt.tail_max_steps;
  io.report_max_steps = true;
  const Trajectory tail = integrate({Chart::vz, alpha}, end, direction_of(which), events, io);
  append(trace.curve, tail);

  const Vec2 last = trace.curve.last().state;
  const Vec2 saddle = which == Branch::minus ? Vec2{v3, 0.0} : Vec2{v1, 0.0};
  switch (tail.termination) {
    case Termination::event_hit:
      if (tail.event_id == "kcurve") {
        trace.endpoint = which == Branch::minus ? Endpoint::HitsKplus : Endpoint::HitsKminus;
        trace.v_extreme = last[0];
      } else {
        trace.endpoint = which == Branch::minus ? Endpoint::EscapesRight : Endpoint::EscapesLeft;
        trace.v_extreme = which == Branch::minus ? kInf : -kInf;
      }
      break;
    case Termination::escaped:
      trace.endpoint = which == Branch::minus ? Endpoint::EscapesRight : Endpoint::EscapesLeft;
      trace.v_extreme = which == Branch::minus ? kInf : -kInf;
      break;
    case Termination::equilibrium_captured:
      switch (tail.equilibrium_index) {
        case 0: trace.endpoint = Endpoint::HitsOrigin; trace.v_extreme = 0.0; break;
        case 1: trace.endpoint = Endpoint::HitsP1; trace.v_extreme = v1; break;
        case 2: trace.endpoint = Endpoint::HitsP2; trace.v_extreme = v2; break;
        default: trace.endpoint = Endpoint::HitsP3; trace.v_extreme = v3; break;
      }
      break;
    case Termination::max_steps:
      if (std::hypot(last[0] - saddle[0], last[1] - saddle[1]) <= opt.stall_radius) {
        trace.endpoint = which == Branch::minus ? Endpoint::HitsP3 : Endpoint::HitsP1;
        trace.v_extreme = saddle[0];
      } else {
        throw MaxStepsExceeded("separatrix tail did not resolve within the step budget");
      }
      break;
  }
  return trace;
}

GapResult gap(Alpha alpha, const SeparatrixOptions& opt) {
  require_four_equilibria(alpha);
  auto plus = std::async(std::launch::async, [&] { return phi_at_zero(alpha, Branch::plus, opt); });
  const double phi_minus = phi_at_zero(alpha, Branch::minus, opt);
  const double phi_plus = plus.get();
  const double delta = phi_minus - phi_plus;

  Configuration config;
  if (phi_minus <= kCaseTolerance) {
    config = Configuration::I;
  } else if (std::abs(delta) <= kCaseTolerance) {
    config = Configuration::III;
  } else {
    config = delta < 0.0 ? Configuration::II : Configuration::IV;
  }
  return {alpha, phi_minus, phi_plus, delta, config};
}

Configuration classify_configuration(Alpha alpha, const SeparatrixOptions& opt) {
  return gap(alpha, opt).config;
}

AlphaStar find_alpha_star(double lo, double hi, double tol, const SeparatrixOptions& opt) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(tol > 0.0)) {
    throw DomainError("find_alpha_star needs finite bounds and tol > 0");
  }
  if (!(lo < hi)) throw BadBracket("bracket is empty or inverted");
  if (lo < kAlphaFloor) throw DomainError("lower bracket end below the supported floor -50");
  require_four_equilibria(Alpha{hi});

  const double d_lo = gap(Alpha{lo}, opt).delta;
  const double d_hi = gap(Alpha{hi}, opt).delta;
  if (!(d_lo > 0.0 && d_hi < 0.0)) {
    throw BadBracket("gap does not change sign from positive to negative across [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }

  int iterations = 0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double d = gap(Alpha{mid}, opt).delta;
    ++iterations;
    if (d > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), lo, hi, tol, iterations};
}

}  // namespace qhlc
