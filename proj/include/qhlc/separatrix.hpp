#pragma once

// Separatrices of the two semi-hyperbolic saddles at infinity.
//
// L- leaves P1 = (v1, 0) along its centre manifold and is shot forward in tau;
// L+ enters P3 = (v3, 0) along its centre manifold and is shot backward. In
// both cases the hyperbolic direction contracts for the chosen time direction,
// so the separatrix attracts nearby numerical solutions.
//
// phi-(0) and phi+(0) are the heights at which L- and L+ meet the z-axis. Their
// difference is the gap; it vanishes exactly at the heteroclinic parameter
// alpha*.

#include <optional>
#include <string_view>

#include "qhlc/core.hpp"
#include "qhlc/integrator.hpp"

namespace qhlc {

enum class Branch { minus, plus };

enum class Endpoint {
  HitsOrigin,
  HitsKplus,
  HitsP3,
  EscapesRight,
  HitsKminus,
  HitsP2,
  HitsP1,
  EscapesLeft,
};

enum class Configuration { I, II, III, IV };

std::string_view to_string(Branch b);
std::string_view to_string(Endpoint e);
std::string_view to_string(Configuration c);

inline constexpr double kCaseTolerance = 1e-6;

struct SeparatrixOptions {
  IntegrateOptions integrate{.rtol = 1e-11, .atol = 1e-13, .max_steps = 50'000'000,
                             .sample_spacing = 1e-3};
  double z_seed = 1e-3;
  /// Re-shoot from z_seed / 2 and compare phi(0).
  bool seed_check = true;
  /// SeedTooCoarse when the two seeds disagree by more than 10x this.
  double phi_tolerance = 1e-7;
  double escape_radius = 1e6;
  double capture_radius = 1e-8;
  double capture_speed = 1e-10;
  /// Steps allowed after the z-axis crossing. A trace that runs out of them
  /// while within `stall_radius` of the opposite saddle is classified as
  /// reaching it.
  std::size_t tail_max_steps = 2'000'000;
  double stall_radius = 1e-3;
};

struct SeparatrixTrace {
  Branch which;
  Alpha alpha;
  /// Starts at the seed; parameter tau (decreasing for L+).
  Trajectory curve;
  /// Height of the crossing with v = 0; absent when L- runs into P0 from v < 0.
  std::optional<double> phi_at_zero;
  /// v- for L- (largest v reached), v+ for L+ (smallest v reached); may be +-inf.
  double v_extreme;
  Endpoint endpoint;
};

struct GapResult {
  Alpha alpha;
  double phi_minus0;
  double phi_plus0;
  double delta;
  Configuration config;
};

struct AlphaStar {
  double value;
  double lo;
  double hi;
  double tolerance;
  int iterations;
};

/// Point (v_i + q z^2, z) on the quadratic centre-manifold approximation,
/// i = 1 for L-, i = 3 for L+. Requires alpha < -3/cbrt(4) and 0 < z_seed <= 1e-2.
Vec2 seed_separatrix(Alpha alpha, Branch which, double z_seed);

SeparatrixTrace trace_separatrix(Alpha alpha, Branch which, const SeparatrixOptions& options = {});

/// phi-(0; alpha) or phi+(0; alpha); the case-I limit value 0 is returned when
/// L- falls into P0 without crossing v = 0.
double phi_at_zero(Alpha alpha, Branch which, const SeparatrixOptions& options = {});

GapResult gap(Alpha alpha, const SeparatrixOptions& options = {});

Configuration classify_configuration(Alpha alpha, const SeparatrixOptions& options = {});

/// Bisection on the sign of the gap. Requires gap(lo) > 0 > gap(hi); throws
/// BadBracket otherwise.
AlphaStar find_alpha_star(double lo, double hi, double tol, const SeparatrixOptions& options = {});

}  // namespace qhlc
