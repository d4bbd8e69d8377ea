#include "qhlc/core.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

namespace qhlc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool near_endpoint(double mu, double endpoint) {
  return std::abs(mu - endpoint) <= 8.0 * kEps * std::max(1.0, std::abs(endpoint));
}

double newton_polish(double v, double alpha, double mu) {
  const double df = 3.0 * v * v - 2.0 * alpha * v;
  if (df == 0.0) return v;
  return v - (eval_f(v, alpha) - mu) / df;
}

}  // namespace

void require_four_equilibria(Alpha alpha) {
  if (!(alpha.value() < kFourEquilibriaBound)) {
    throw DomainError("alpha = " + std::to_string(alpha.value()) +
                      " is not below -3/cbrt(4); the chart does not have four equilibria");
  }
}

std::string_view to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::D1: return "D1";
    case RegionTag::D2: return "D2";
    case RegionTag::D3: return "D3";
    case RegionTag::D4: return "D4";
    case RegionTag::Aminus: return "Aminus";
    case RegionTag::Aplus: return "Aplus";
    case RegionTag::Kminus: return "Kminus";
    case RegionTag::Kplus: return "Kplus";
    case RegionTag::VAxisLine: return "VAxisLine";
    case RegionTag::Equilibrium: return "Equilibrium";
  }
  return "?";
}

std::string_view to_string(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::hyperbolic_stable_node: return "hyperbolic_stable_node";
    case EquilibriumKind::semihyp_saddle_unstable_center: return "semihyp_saddle_unstable_center";
    case EquilibriumKind::semihyp_unstable_node: return "semihyp_unstable_node";
    case EquilibriumKind::semihyp_saddle_stable_center: return "semihyp_saddle_stable_center";
    case EquilibriumKind::semihyp_stable_node: return "semihyp_stable_node";
  }
  return "?";
}

LevelRoots level_roots(Alpha alpha, double mu) {
  const double a = alpha.value();
  if (!(a < 0.0)) throw DomainError("level_roots requires alpha < 0");
  if (!std::isfinite(mu)) throw DomainError("mu must be finite");

  const double hi = f_local_max(alpha);
  if (near_endpoint(mu, -1.0) || near_endpoint(mu, hi)) {
    throw DegenerateError("f(v, alpha) = mu has a double root at mu = " + std::to_string(mu));
  }
  if (!(mu > -1.0 && mu < hi)) {
    throw DomainError("mu = " + std::to_string(mu) + " outside (-1, f(2 alpha/3, alpha) = " +
                      std::to_string(hi) + ")");
  }

  // v = t + alpha/3 turns v^3 - alpha v^2 - (1 + mu) into t^3 + p t + q.
  const double p = -a * a / 3.0;
  const double q = -2.0 * a * a * a / 27.0 - (1.0 + mu);
  const double m = 2.0 * std::sqrt(-p / 3.0);
  const double c = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
  const double theta = std::acos(c) / 3.0;

  std::array<double, 3> v{};
  for (int k = 0; k < 3; ++k) {
    const double t = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
    v[k] = newton_polish(t + a / 3.0, a, mu);
  }
  std::sort(v.begin(), v.end());
  return {mu, v[0], v[1], v[2]};
}

RegionTag classify_region(double v, double z, Alpha alpha, double band) {
  require_four_equilibria(alpha);
  if (!(z >= 0.0)) throw DomainError("classify_region requires z >= 0");
  if (!(band > 0.0)) throw DomainError("band tolerance must be positive");

  const LevelRoots r = level_roots(alpha, 0.0);
  if (z == 0.0) {
    if (std::abs(v) <= band) return RegionTag::Equilibrium;
    for (double root : {r.v1, r.v2, r.v3}) {
      if (std::abs(v - root) <= band * std::max(1.0, std::abs(root))) return RegionTag::Equilibrium;
    }
    return RegionTag::VAxisLine;
  }

  const double s = v * eval_f(v, alpha) + z * z;
  if (v <= r.v1) return RegionTag::D1;
  if (v >= r.v3) return RegionTag::D4;
  if (v < r.v2) {
    if (std::abs(s) <= band) return RegionTag::Kminus;
    return s > 0.0 ? RegionTag::D2 : RegionTag::Aminus;
  }
  if (v > 0.0 && std::abs(s) <= band) return RegionTag::Kplus;
  return s > 0.0 ? RegionTag::D3 : RegionTag::Aplus;
}

std::array<EquilibriumInfo, 4> equilibria(Alpha alpha) {
  require_four_equilibria(alpha);
  const double a = alpha.value();
  const LevelRoots r = level_roots(alpha, 0.0);

  std::array<EquilibriumInfo, 4> out{};
  out[0] = {0, {0.0, 0.0}, EquilibriumKind::hyperbolic_stable_node, -1.0, 0.0, 0.0};

  const std::array<double, 3> roots{r.v1, r.v2, r.v3};
  for (int i = 1; i <= 3; ++i) {
    const double v0 = roots[i - 1];
    const double lambda = v0 * v0 * (3.0 * v0 - 2.0 * a);
    const double cubic = -1.0 / v0;
    EquilibriumKind kind{};
    if (lambda < 0.0) {
      kind = cubic > 0.0 ? EquilibriumKind::semihyp_saddle_unstable_center
                         : EquilibriumKind::semihyp_stable_node;
    } else {
      kind = cubic > 0.0 ? EquilibriumKind::semihyp_unstable_node
                         : EquilibriumKind::semihyp_saddle_stable_center;
    }
    out[i] = {i, {v0, 0.0}, kind, lambda, cubic, -1.0 / lambda};
  }
  return out;
}

}  // namespace qhlc
