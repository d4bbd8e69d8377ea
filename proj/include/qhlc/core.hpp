#pragma once

// Vector fields of the quasi-homogeneous family
//
//   x' = y,   y' = -x^3 + alpha x^2 y + y^3
//
// and of its chart at infinity (x = v/z, y = 1/z, dtau = dt/z^2)
//
//   v' = v f(v, alpha) + z^2,   z' = z f(v, alpha),   f = v^3 - alpha v^2 - 1,
//
// together with the level roots of f, the region decomposition of the upper
// half (v,z)-plane and the four equilibria on the v-axis.

#include <array>
#include <cmath>
#include <string_view>

#include "qhlc/errors.hpp"

namespace qhlc {

using Vec2 = std::array<double, 2>;

/// Below this value the chart has four equilibria P0..P3 (-3/cbrt(4)).
inline const double kFourEquilibriaBound = -3.0 / std::cbrt(4.0);

/// Half-width of the numerical band that stands in for the K-curves.
inline constexpr double kDefaultKBand = 1e-12;

/// The family parameter. Always finite.
class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!std::isfinite(value)) throw DomainError("alpha must be finite");
  }

  double value() const noexcept { return value_; }

  friend bool operator==(Alpha, Alpha) = default;

 private:
  double value_;
};

/// Throws DomainError unless alpha < -3/cbrt(4).
void require_four_equilibria(Alpha alpha);

/// Ascending real roots of f(v, alpha) = mu.
struct LevelRoots {
  double mu;
  double v1;
  double v2;
  double v3;
};

enum class RegionTag { D1, D2, D3, D4, Aminus, Aplus, Kminus, Kplus, VAxisLine, Equilibrium };

std::string_view to_string(RegionTag tag);

enum class EquilibriumKind {
  hyperbolic_stable_node,
  semihyp_saddle_unstable_center,
  semihyp_unstable_node,
  semihyp_saddle_stable_center,
  semihyp_stable_node,
};

std::string_view to_string(EquilibriumKind kind);

/// Local data of an equilibrium of the chart field.
///
/// For P1..P3, `lambda_hyp` is the nonzero eigenvalue v^2 (3v - 2 alpha),
/// `invariant_curve_quad` is q in the centre manifold v = v_i + q z^2 + O(z^4)
/// and `center_cubic` is c in the reduced dynamics z' = c z^3 + O(z^5).
/// P0 is hyperbolic with the double eigenvalue -1; its centre fields are zero.
struct EquilibriumInfo {
  int index;
  Vec2 position;
  EquilibriumKind kind;
  double lambda_hyp;
  double center_cubic;
  double invariant_curve_quad;
};

/// f(v, alpha) = v^3 - alpha v^2 - 1.
constexpr double eval_f(double v, double alpha) noexcept { return v * v * v - alpha * v * v - 1.0; }
inline double eval_f(double v, Alpha alpha) noexcept { return eval_f(v, alpha.value()); }

/// f(2 alpha / 3, alpha) = -4 alpha^3 / 27 - 1, the local maximum of f for alpha < 0.
inline double f_local_max(Alpha alpha) noexcept {
  const double a = alpha.value();
  return -4.0 * a * a * a / 27.0 - 1.0;
}

/// Three ascending roots of f(v, alpha) = mu, trigonometric method plus one
/// Newton step per root.
///
/// Requires alpha < 0 and -1 < mu < f(2 alpha/3, alpha). Throws DegenerateError
/// when mu sits on one of the endpoints (double root), DomainError otherwise.
LevelRoots level_roots(Alpha alpha, double mu);

/// (y, -x^3 + alpha x^2 y + y^3)
inline Vec2 field_xy(double x, double y, Alpha alpha) noexcept {
  return {y, -x * x * x + alpha.value() * x * x * y + y * y * y};
}

/// (v f + z^2, z f)
inline Vec2 field_vz(double v, double z, Alpha alpha) noexcept {
  const double f = eval_f(v, alpha);
  return {v * f + z * z, z * f};
}

/// Region of the closed upper half plane containing (v, z). Points with
/// |v f + z^2| <= band on the K-curve abscissa ranges are tagged Kminus/Kplus;
/// points on z = 0 are VAxisLine or, within band of a root of f or of 0,
/// Equilibrium.
RegionTag classify_region(double v, double z, Alpha alpha, double band = kDefaultKBand);

/// P0..P3 in index order. Requires alpha < -3/cbrt(4).
std::array<EquilibriumInfo, 4> equilibria(Alpha alpha);

/// Determinant of (field, d field / d alpha); equals x^2 y^2.
inline double rotated_determinant(double x, double y) noexcept {
  // | y   -x^3 + a x^2 y + y^3 |
  // | 0   x^2 y                |
  return y * (x * x * y);
}

}  // namespace qhlc
