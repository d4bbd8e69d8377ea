#pragma once

// Return map of x' = y, y' = -x^3 + alpha x^2 y + y^3 on the section
// {y = 0, x > 0}. The flow turns clockwise, so the section is crossed with
// y' = -x^3 < 0 once per revolution.

#include <optional>
#include <string_view>
#include <vector>

#include "qhlc/core.hpp"
#include "qhlc/integrator.hpp"

namespace qhlc {

struct ReturnMapOptions {
  double rtol = 1e-11;
  double atol = 1e-13;
  /// Orbits leaving this radius count as escaped (the field blows up in
  /// finite time outside the cycle).
  double escape_radius = 1e6;
  std::size_t max_steps = 10'000'000;
};

struct ReturnResult {
  double x;       // abscissa of the return, +inf when the orbit escaped
  double period;  // time of flight, +inf when escaped
};

/// First return to {y = 0, x > 0} from (x0, 0). x0 > 0.
ReturnResult return_to_section(double x0, Alpha alpha, const ReturnMapOptions& options = {});

/// return_to_section(x0).x; +inf marks an escape.
double return_map(double x0, Alpha alpha, const ReturnMapOptions& options = {});

/// First crossing of {y = 0, x < 0} from (x0, 0); returns that (negative)
/// abscissa, -inf when the orbit escaped first.
double half_return_map(double x0, Alpha alpha, const ReturnMapOptions& options = {});

enum class Verdict { UnstableHyperbolic, StableHyperbolic, NonHyperbolic, None };
std::string_view to_string(Verdict v);

struct LimitCycleResult {
  Alpha alpha;
  bool found = false;
  double x_star = 0.0;
  double period = 0.0;
  double multiplier = 0.0;
  Verdict verdict = Verdict::None;
};

struct LimitCycleOptions {
  ReturnMapOptions map;
  std::size_t grid_points = 48;  // geometric grid over [x_lo, x_hi]
  double multiplier_margin = 1e-3;
  /// Relative step of the centred difference for the multiplier.
  double multiplier_step = 1e-5;
  /// A bracket closes on a fixed point only if |P(x) - x| <= this * x there;
  /// otherwise it straddles the jump to escaping orbits.
  double fixed_point_tolerance = 1e-9;
};

inline constexpr double kDefaultSectionLo = 0.05;
inline constexpr double kDefaultSectionHi = 5.0;

/// Searches [x_lo, x_hi] for fixed points of the return map. Throws
/// AmbiguousBracket (carrying all fixed points) when more than one is found.
LimitCycleResult find_limit_cycle(Alpha alpha, double x_lo = kDefaultSectionLo,
                                  double x_hi = kDefaultSectionHi,
                                  const LimitCycleOptions& options = {});

struct ScanRow {
  double alpha;
  bool found;
  double x_star;      // NaN when not found
  double multiplier;  // NaN when not found
};

struct ScanResult {
  std::vector<ScanRow> rows;  // ascending alpha
  /// Midpoint between the last row without a cycle and the first row with
  /// one; absent when the scan never switches.
  std::optional<double> alpha_bar;
};

/// Rows alpha = from + k step up to `to`, evaluated on `threads` workers
/// (0 = hardware concurrency).
ScanResult scan_alpha(double from, double to, double step, const LimitCycleOptions& options = {},
                      unsigned threads = 0);

enum class OriginBehaviour { StableFocusLike, UnstableFocusLike };
std::string_view to_string(OriginBehaviour b);

/// Compares the return of a probe amplitude in (0, 0.5] with the probe itself.
OriginBehaviour classify_origin(Alpha alpha, double probe_amplitude,
                                const ReturnMapOptions& options = {});

}  // namespace qhlc
