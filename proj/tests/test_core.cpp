#include <doctest.h>

#include <cmath>
#include <random>

#include "qhlc/core.hpp"

using namespace qhlc;

namespace {

const double kSqrt5 = std::sqrt(5.0);
const double kCbrt2 = std::cbrt(2.0);

double residual_tol(double mu) { return 1e-12 * std::max(1.0, std::abs(mu)); }

}  // namespace

TEST_CASE("eval_f examples") {
  CHECK(eval_f(0.0, -1.7) == -1.0);
  CHECK(eval_f(-1.0, -2.0) == 0.0);
  CHECK(eval_f(-2.0, -3.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(f_local_max(Alpha{-3.0}) == doctest::Approx(3.0));
}

TEST_CASE("alpha rejects non-finite values") {
  CHECK_THROWS_AS(Alpha{NAN}, DomainError);
  CHECK_THROWS_AS(Alpha{INFINITY}, DomainError);
}

TEST_CASE("golden roots at alpha = -2") {
  const LevelRoots r = level_roots(Alpha{-2.0}, 0.0);
  CHECK(std::abs(r.v1 - (-1.0 - kSqrt5) / 2.0) <= 1e-12);
  CHECK(std::abs(r.v2 + 1.0) <= 1e-12);
  CHECK(std::abs(r.v3 - (-1.0 + kSqrt5) / 2.0) <= 1e-12);
  // f = (v + 1)(v^2 + v - 1) at alpha = -2
  for (double v = -3.0; v <= 3.0; v += 0.125) {
    CHECK(std::abs(eval_f(v, -2.0) - (v + 1.0) * (v * v + v - 1.0)) <= 1e-12 * std::max(1.0, std::abs(v * v * v)));
  }
}

TEST_CASE("closed-form roots at alpha = -3/cbrt(2)") {
  const Alpha a{-3.0 / kCbrt2};
  const LevelRoots r0 = level_roots(a, 0.0);
  CHECK(r0.v1 == doctest::Approx(-(std::sqrt(3.0) + 1.0) / kCbrt2).epsilon(1e-13));
  CHECK(r0.v2 == doctest::Approx(-1.0 / kCbrt2).epsilon(1e-13));
  CHECK(r0.v3 == doctest::Approx((std::sqrt(3.0) - 1.0) / kCbrt2).epsilon(1e-13));
  const LevelRoots rm = level_roots(a, 11.0 / 16.0);
  CHECK(rm.v1 == doctest::Approx(-(3.0 * kSqrt5 + 3.0) / (4.0 * kCbrt2)).epsilon(1e-13));
  CHECK(rm.v2 == doctest::Approx(-3.0 / (2.0 * kCbrt2)).epsilon(1e-13));
}

TEST_CASE("level_roots errors") {
  CHECK_THROWS_AS(level_roots(Alpha{0.0}, 0.0), DomainError);
  CHECK_THROWS_AS(level_roots(Alpha{1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(level_roots(Alpha{-2.0}, -1.5), DomainError);
  CHECK_THROWS_AS(level_roots(Alpha{-2.0}, 5.0), DomainError);
  CHECK_THROWS_AS(level_roots(Alpha{-2.0}, -1.0), DegenerateError);
  CHECK_THROWS_AS(level_roots(Alpha{-3.0}, 3.0), DegenerateError);
}

TEST_CASE("root accuracy and ordering") {
  for (double a : {-2.0, -2.5, -3.0, -4.0}) {
    const double top = f_local_max(Alpha{a});
    for (int k = 1; k < 20; ++k) {
      const double mu = -1.0 + (top + 1.0) * k / 20.0;
      const LevelRoots r = level_roots(Alpha{a}, mu);
      CAPTURE(a);
      CAPTURE(mu);
      for (double v : {r.v1, r.v2, r.v3}) CHECK(std::abs(eval_f(v, a) - mu) <= residual_tol(mu));
      CHECK(r.v1 < 2.0 * a / 3.0);
      CHECK(2.0 * a / 3.0 < r.v2);
      CHECK(r.v2 < 0.0);
      CHECK(0.0 < r.v3);
    }
  }
}

TEST_CASE("root monotonicity in alpha") {
  const double grid[] = {-2.0, -2.5, -3.0, -4.0};
  for (double mu : {-0.5, 0.0, 0.1}) {
    for (int i = 0; i + 1 < 4; ++i) {
      const LevelRoots hi = level_roots(Alpha{grid[i]}, mu);
      const LevelRoots lo = level_roots(Alpha{grid[i + 1]}, mu);
      CAPTURE(mu);
      CAPTURE(grid[i + 1]);
      CHECK(lo.v1 < hi.v1);
      CHECK(lo.v2 > hi.v2);
      CHECK(lo.v3 < hi.v3);
      CHECK(lo.v3 > 0.0);
    }
  }
}

TEST_CASE("field examples") {
  const Alpha a{-1.3};
  CHECK(field_xy(1, 0, a) == Vec2{0, -1});
  CHECK(field_xy(0, 1, a) == Vec2{1, 1});
  CHECK(field_vz(0, 1, a) == Vec2{1, -1});
  const LevelRoots r = level_roots(Alpha{-2.0}, 0.0);
  for (double v : {r.v1, r.v2, r.v3}) {
    const Vec2 w = field_vz(v, 0.0, Alpha{-2.0});
    CHECK(std::abs(w[0]) <= 1e-14);
    CHECK(w[1] == 0.0);
  }
}

TEST_CASE("rotated_determinant") {
  CHECK(rotated_determinant(1, 1) == 1);
  CHECK(rotated_determinant(7.5, 0) == 0);
  CHECK(rotated_determinant(2, 3) == 36);
}

TEST_CASE("central symmetry and chart consistency on random samples") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coord(-5.0, 5.0), alpha(-5.0, 1.0), height(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const Alpha a{alpha(rng)};
    const double x = coord(rng), y = coord(rng);
    const Vec2 w = field_xy(x, y, a), m = field_xy(-x, -y, a);
    CHECK(m[0] == -w[0]);
    CHECK(std::abs(m[1] + w[1]) <= 1e-10 * std::max(1.0, std::abs(w[1])));

    // Pushforward of field_xy under x = v/z, y = 1/z, rescaled by dtau = dt/z^2.
    const double v = coord(rng), z = height(rng);
    const Vec2 xy = field_xy(v / z, 1.0 / z, a);
    const double yy = 1.0 / z;
    const double dv = z * z * (xy[0] * yy - (v / z) * xy[1]) / (yy * yy);
    const double dz = z * z * (-xy[1] / (yy * yy));
    const Vec2 c = field_vz(v, z, a);
    const double f = eval_f(v, a);
    const double scale0 = std::abs(v * f) + z * z, scale1 = std::abs(z * f) + z;
    CAPTURE(v);
    CAPTURE(z);
    CHECK(std::abs(dv - c[0]) <= 1e-10 * scale0);
    CHECK(std::abs(dz - c[1]) <= 1e-10 * scale1);
  }
}

TEST_CASE("classify_region examples") {
  const Alpha a{-2.0};
  CHECK(classify_region(0, 1, a) == RegionTag::D3);
  const double v = -1.3;
  CHECK(classify_region(v, std::sqrt(-v * eval_f(v, a)), a) == RegionTag::Kminus);
  CHECK(classify_region(-3, 0.5, a) == RegionTag::D1);
  CHECK(classify_region(0.3, 0.0, a) == RegionTag::VAxisLine);
  CHECK(classify_region(-1.0, 0.0, a) == RegionTag::Equilibrium);
  CHECK_THROWS_AS(classify_region(0, 1, Alpha{-1.0}), DomainError);
}

TEST_CASE("equilibria at alpha = -2") {
  const auto eq = equilibria(Alpha{-2.0});
  CHECK(eq[0].kind == EquilibriumKind::hyperbolic_stable_node);
  CHECK(eq[0].position == Vec2{0, 0});
  CHECK(eq[1].position[0] == doctest::Approx((-1.0 - kSqrt5) / 2.0));
  CHECK(eq[2].position[0] == doctest::Approx(-1.0));
  CHECK(eq[3].position[0] == doctest::Approx((-1.0 + kSqrt5) / 2.0));
  CHECK(eq[1].kind == EquilibriumKind::semihyp_saddle_unstable_center);
  CHECK(eq[1].lambda_hyp < 0.0);
  CHECK(eq[1].center_cubic > 0.0);
  // v^2 (3v - 2 alpha) at v = (-1 - sqrt5)/2 equals -sqrt5.
  CHECK(eq[1].lambda_hyp == doctest::Approx(-kSqrt5).epsilon(1e-13));
  CHECK(eq[3].kind == EquilibriumKind::semihyp_saddle_stable_center);
  CHECK(eq[3].lambda_hyp > 0.0);
  CHECK(eq[3].center_cubic < 0.0);
  for (const auto& e : eq) CHECK(e.position[1] == 0.0);
  CHECK_THROWS_AS(equilibria(Alpha{kFourEquilibriaBound}), DomainError);
  CHECK_THROWS_AS(equilibria(Alpha{0.5}), DomainError);
}

TEST_CASE("normal form at P1..P3") {
  for (double a : {-2.0, -3.0}) {
    const auto eq = equilibria(Alpha{a});
    for (int i = 1; i <= 3; ++i) {
      double previous = -1.0;
      for (double h = 1e-2; h >= 1e-6; h /= 10.0) {
        const double v = eq[i].position[0] + h;
        const double rest = std::abs(field_vz(v, h, Alpha{a})[0] - eq[i].lambda_hyp * h) / (2.0 * h * h);
        CAPTURE(i);
        CAPTURE(h);
        if (previous >= 0.0) CHECK(rest <= 1.5 * previous + 1.0);
        previous = rest;
      }
      CHECK(previous < 100.0);
    }
  }
}

TEST_CASE("centre manifold is invariant to second order") {
  // With v = v_i + q z^2, the residual of v' - 2 q z z' is O(z^4).
  const Alpha a{-2.5};
  const auto eq = equilibria(a);
  for (int i = 1; i <= 3; ++i) {
    const double q = eq[i].invariant_curve_quad;
    double previous = 0.0;
    for (double z : {1e-2, 1e-3}) {
      const Vec2 w = field_vz(eq[i].position[0] + q * z * z, z, a);
      const double residual = std::abs(w[0] - 2.0 * q * z * w[1]);
      if (previous > 0.0) CHECK(residual < previous * 1e-3);
      previous = residual;
      // reduced dynamics z' = c z^3
      CHECK(w[1] == doctest::Approx(eq[i].center_cubic * z * z * z).epsilon(0.05));
    }
  }
}
