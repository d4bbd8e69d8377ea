#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhlc/bounds.hpp"
#include "qhlc/separatrix.hpp"

using namespace qhlc;

namespace {

const Alpha kSeparated{-3.0 / std::cbrt(2.0)};

SeparatrixOptions unchecked() {
  SeparatrixOptions o;
  o.seed_check = false;
  return o;
}

struct GridSample {
  double alpha, minus, plus;
};

const std::vector<GridSample>& grid() {
  static const std::vector<GridSample> g = [] {
    std::vector<GridSample> out;
    for (int k = 0; k <= 26; ++k) {
      const double a = -2.38 + 0.01 * k;
      out.push_back({a, phi_at_zero(Alpha{a}, Branch::minus, unchecked()),
                     phi_at_zero(Alpha{a}, Branch::plus, unchecked())});
    }
    return out;
  }();
  return g;
}

}  // namespace

TEST_CASE("seed_separatrix") {
  const Alpha a{-2.0};
  const Vec2 s = seed_separatrix(a, Branch::minus, 1e-3);
  const double v1 = (-1.0 - std::sqrt(5.0)) / 2.0;
  // q = -1 / lambda_hyp with lambda_hyp = -sqrt5
  CHECK(s[0] - v1 == doctest::Approx(1e-6 / std::sqrt(5.0)).epsilon(1e-6));
  CHECK(s[1] == 1e-3);
  const Vec2 tiny = seed_separatrix(a, Branch::minus, 1e-8);
  CHECK(std::abs(tiny[0] - v1) < 1e-15);
  const Vec2 p = seed_separatrix(kSeparated, Branch::plus, 1e-3);
  CHECK(p[0] == doctest::Approx((std::sqrt(3.0) - 1.0) / std::cbrt(2.0)).epsilon(1e-5));
  CHECK_THROWS_AS(seed_separatrix(a, Branch::minus, 0.0), DomainError);
  CHECK_THROWS_AS(seed_separatrix(a, Branch::minus, 0.1), DomainError);
  CHECK_THROWS_AS(seed_separatrix(Alpha{-1.5}, Branch::minus, 1e-3), DomainError);
}

TEST_CASE("traces at alpha = -3/cbrt(2)") {
  const SeparatrixTrace minus = trace_separatrix(kSeparated, Branch::minus);
  const SeparatrixTrace plus = trace_separatrix(kSeparated, Branch::plus);
  REQUIRE(minus.phi_at_zero);
  REQUIRE(plus.phi_at_zero);
  CHECK(*minus.phi_at_zero >= 1.4358 - 1e-3);
  CHECK(*plus.phi_at_zero <= 1.3377 + 1e-3);
  CHECK(minus.which == Branch::minus);
  CHECK(minus.curve.samples.front().state[0] < -2.0);

  SUBCASE("L- never enters A- left of v2^0") {
    const double v20 = level_roots(kSeparated, 0.0).v2;
    for (const Sample& s : minus.curve.samples) {
      const auto [v, z] = s.state;
      if (v < v20) CHECK(v * eval_f(v, kSeparated) + z * z >= -kDefaultKBand);
    }
  }
  SUBCASE("closed-form bounds sandwich the traces") {
    CHECK(lower_bound_phi_minus(kSeparated, 11.0 / 16.0) <= *minus.phi_at_zero + 1e-3);
    CHECK(*plus.phi_at_zero <= upper_bound_phi_plus(kSeparated, -9.0 / 16.0) + 1e-3);
  }
}

TEST_CASE("halving the seed height") {
  for (double a : {-2.3, -2.2}) {
    for (Branch b : {Branch::minus, Branch::plus}) {
      SeparatrixOptions half = unchecked();
      half.z_seed = 5e-4;
      const double coarse = phi_at_zero(Alpha{a}, b, unchecked());
      const double fine = phi_at_zero(Alpha{a}, b, half);
      CHECK(std::abs(coarse - fine) <= 1e-6);
    }
  }
}

TEST_CASE("continuity on the 0.01 grid") {
  const auto& g = grid();
  for (auto phi : {&GridSample::minus, &GridSample::plus}) {
    for (std::size_t i = 1; i + 2 < g.size(); ++i) {
      const double jump = std::abs(g[i + 1].*phi - g[i].*phi);
      const double left = std::abs(g[i].*phi - g[i - 1].*phi);
      const double right = std::abs(g[i + 2].*phi - g[i + 1].*phi);
      CAPTURE(g[i].alpha);
      CHECK(jump <= 10.0 * std::max(left, right) + 1e-9);
    }
  }
}

TEST_CASE("monotonicity in alpha") {
  const auto& g = grid();
  const double tol = 1e-8;
  for (std::size_t i = 1; i < g.size(); ++i) {
    CAPTURE(g[i].alpha);
    CHECK(g[i].minus <= g[i - 1].minus + tol);
    CHECK(g[i].plus >= g[i - 1].plus - tol);
    CHECK(g[i].minus - g[i].plus < g[i - 1].minus - g[i - 1].plus);
  }
}

TEST_CASE("gap and configurations") {
  const GapResult separated = gap(kSeparated);
  CHECK(separated.delta > 0.0);
  CHECK(separated.config == Configuration::IV);
  CHECK(separated.delta == doctest::Approx(separated.phi_minus0 - separated.phi_plus0));

  const GapResult right = gap(Alpha{-2.11});
  CHECK(right.delta < 0.0);
  CHECK((right.config == Configuration::I || right.config == Configuration::II));

  const SeparatrixTrace l = trace_separatrix(Alpha{-2.0}, Branch::minus);
  CHECK((l.endpoint == Endpoint::HitsOrigin || l.endpoint == Endpoint::HitsKplus));
}

TEST_CASE("find_alpha_star") {
  CHECK_THROWS_AS(find_alpha_star(-2.1, -2.3, 1e-3), BadBracket);
  CHECK_THROWS_AS(find_alpha_star(-2.15, -2.1, 1e-3), BadBracket);
  CHECK_THROWS_AS(find_alpha_star(-2.3, -2.2, 0.0), DomainError);

  const AlphaStar inner = find_alpha_star(-2.3, -2.15, 1e-3);
  CHECK(inner.lo < inner.value);
  CHECK(inner.value <= inner.hi);
  CHECK(inner.hi - inner.lo <= 1e-3);
  CHECK(inner.value == doctest::Approx(-2.198).epsilon(5e-3 / 2.198));
  // The gap falls by about 4.5 per unit of alpha here.
  CHECK(std::abs(gap(Alpha{inner.value}).delta) <= 5.0 * inner.tolerance);
}
