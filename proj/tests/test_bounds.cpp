#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qhlc/bounds.hpp"

using namespace qhlc;

namespace {

const Alpha kSeparated{-3.0 / std::cbrt(2.0)};
constexpr double kMu = 11.0 / 16.0;
constexpr double kLambda = -9.0 / 16.0;

double below(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

bool verified(const ComparisonOutcome& o) { return std::holds_alternative<Verified>(o); }

}  // namespace

TEST_CASE("closed-form bound values") {
  const double s5 = std::sqrt(5.0), s3 = std::sqrt(3.0);
  const double lower = std::cbrt(2.0) * std::sqrt(33.0) *
                       (std::sqrt(s5 + 2.0) / 8.0 - (4.0 / 33.0) * std::sqrt(s5 - 2.0));
  const double upper = (25.0 / 12.0 - (7.0 / 24.0) * std::sqrt(3.0 - s3)) * std::sqrt(s3 - 1.0) /
                       std::pow(2.0, 1.0 / 6.0);
  CHECK(lower_bound_phi_minus(kSeparated, kMu) == doctest::Approx(lower).epsilon(1e-12));
  CHECK(upper_bound_phi_plus(kSeparated, kLambda) == doctest::Approx(upper).epsilon(1e-12));
  CHECK(std::abs(lower - 1.4358) <= 5e-4);
  CHECK(std::abs(upper - 1.3377) <= 5e-4);

  const BoundReport r = bound_report(kSeparated, kMu, kLambda);
  CHECK(r.separation > 0.0);
  CHECK(r.separation == doctest::Approx(r.lower_phi_minus0 - r.upper_phi_plus0));
  CHECK(varphi_mu(kSeparated, kMu, 0.0) == doctest::Approx(r.lower_phi_minus0).epsilon(1e-14));
}

TEST_CASE("varphi_mu examples") {
  const PhiCurve c = phi_curve(kSeparated, kMu);
  CHECK(varphi_mu(kSeparated, kMu, c.roots_mu.v1) == doctest::Approx(std::sqrt(-kMu * c.roots_mu.v1)));
  CHECK(varphi_mu(kSeparated, kMu, c.roots_mu.v2) == doctest::Approx(c.z2).epsilon(1e-14));
  CHECK(varphi_mu(kSeparated, kMu, below(c.roots_0.v2)) == c.z2);
  CHECK_THROWS_AS(varphi_mu(kSeparated, kMu, 0.1), DomainError);
  CHECK_THROWS_AS(varphi_mu(kSeparated, kMu, c.roots_mu.v1 - 0.1), DomainError);
  CHECK_THROWS_AS(phi_curve(kSeparated, 0.0), DomainError);
  CHECK_THROWS_AS(phi_curve(kSeparated, f_local_max(kSeparated)), DomainError);
  CHECK(lower_bound_phi_minus(kSeparated, 1e-8) == 0.0);
}

TEST_CASE("psi/omega examples") {
  const PsiCurve c = psi_curve(kSeparated, kLambda);
  CHECK(psi_lambda(kSeparated, kLambda, c.z_start) == doctest::Approx(c.v30).epsilon(1e-14));
  CHECK(c.v3l == doctest::Approx(1.0 / (2.0 * std::cbrt(2.0))).epsilon(1e-13));
  // lambda = -9/16 is the tangency case of the second branch.
  CHECK(c.z_bar == doctest::Approx(c.z3).epsilon(1e-7));
  CHECK(omega_lambda(kSeparated, kLambda, 0.0) == doctest::Approx(c.z3 + c.v3l / c.z3).epsilon(1e-14));
  CHECK_THROWS_AS(omega_lambda(kSeparated, kLambda, c.v3l), BranchGapError);
  CHECK_THROWS_AS(omega_lambda(kSeparated, kLambda, -0.1), DomainError);
  CHECK_THROWS_AS(omega_lambda(kSeparated, kLambda, c.v30 + 0.1), DomainError);
  CHECK_THROWS_AS(psi_lambda(kSeparated, kLambda, 0.5 * c.z_start), DomainError);
  CHECK_THROWS_AS(psi_curve(kSeparated, -1.0), DomainError);
  CHECK_THROWS_AS(psi_curve(kSeparated, 0.0), DomainError);
}

TEST_CASE("varphi_mu junctions and monotone first branch") {
  for (double a : {-2.5, -3.0 / std::cbrt(2.0), -3.0}) {
    for (double mu : {0.3, kMu}) {
      const Alpha al{a};
      const PhiCurve c = phi_curve(al, mu);
      const double v1 = c.roots_mu.v1, v2 = c.roots_mu.v2, v20 = c.roots_0.v2;
      CAPTURE(a);
      CAPTURE(mu);
      CHECK(std::abs(varphi_mu(al, mu, below(v2)) - varphi_mu(al, mu, v2)) <= 1e-12);
      CHECK(std::abs(varphi_mu(al, mu, below(v20)) - varphi_mu(al, mu, v20)) <= 1e-12);
      CHECK(c.z2 >= std::sqrt(mu) * (std::sqrt(-v1) + std::sqrt(v2 - v1)) * (1.0 - 1e-15));
      double previous = varphi_mu(al, mu, v1);
      for (double v : linspace(v1, v2, 1001)) {
        const double z = varphi_mu(al, mu, v);
        CHECK(z >= previous);
        previous = z;
      }
    }
  }
}

TEST_CASE("omega inverts psi on both branches") {
  for (double a : {-2.5, -3.0 / std::cbrt(2.0), -3.0}) {
    for (double l : {-0.3, kLambda, -0.8}) {
      const Alpha al{a};
      const PsiCurve c = psi_curve(al, l);
      CAPTURE(a);
      CAPTURE(l);
      // The inverse has a square-root foot at each branch start; keep off it.
      for (double z : linspace(c.z_start + 0.01 * (c.z3 - c.z_start), c.z3 - 1e-3 * (c.z3 - c.z_start), 200)) {
        CHECK(std::abs(omega_lambda(al, l, psi_lambda(al, l, z)) - z) <= 1e-10);
      }
      for (double z : linspace(c.z_bar + 0.05 * (c.s - c.z_bar), c.s, 200)) {
        CHECK(std::abs(omega_lambda(al, l, psi_lambda(al, l, z)) - z) <= 1e-10);
      }
    }
  }
}

TEST_CASE("closed forms solve their piecewise equations") {
  const double h = 1e-5;
  for (double a : {-2.5, -3.0 / std::cbrt(2.0)}) {
    const Alpha al{a};
    const PhiCurve c = phi_curve(al, kMu);
    const double v1 = c.roots_mu.v1, v2 = c.roots_mu.v2, v20 = c.roots_0.v2;
    for (double v : linspace(v1 + 0.05 * (v2 - v1), v2 - 0.05 * (v2 - v1), 50)) {
      const double z = varphi_mu(al, kMu, v);
      const double slope = (varphi_mu(al, kMu, v + h) - varphi_mu(al, kMu, v - h)) / (2 * h);
      CHECK(std::abs(slope - kMu * z / (kMu * v + z * z)) <= 1e-6);
    }
    for (double v : linspace(v20 + 0.05 * -v20, -0.05 * -v20, 50)) {
      const double z = varphi_mu(al, kMu, v);
      const double slope = (varphi_mu(al, kMu, v + h) - varphi_mu(al, kMu, v - h)) / (2 * h);
      CHECK(std::abs(slope - z / (v - z * z)) <= 1e-6);
    }

    for (double l : {-0.3, kLambda, -0.8}) {
      const PsiCurve p = psi_curve(al, l);
      for (double z : linspace(p.z_start + h, p.z3 - h, 50)) {
        const double slope = (psi_lambda(al, l, z + h) - psi_lambda(al, l, z - h)) / (2 * h);
        CHECK(std::abs(slope - (psi_lambda(al, l, z) / z + z / l)) <= 1e-6);
      }
      for (double z : linspace(p.z3 + 2 * h, p.s, 50)) {
        const double slope = (psi_lambda(al, l, z + h) - psi_lambda(al, l, z - h)) / (2 * h);
        CHECK(std::abs(slope - (psi_lambda(al, l, z) / z - z)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("bounds against traced separatrices") {
  for (double a : {-2.5, -3.0 / std::cbrt(2.0), -3.0}) {
    const Alpha al{a};
    const double minus = phi_at_zero(al, Branch::minus);
    const double plus = phi_at_zero(al, Branch::plus);
    CAPTURE(a);
    for (double mu : {0.3, 0.5, kMu}) CHECK(lower_bound_phi_minus(al, mu) <= minus + 1e-3);
    for (double l : {-0.3, kLambda, -0.8, -0.99}) CHECK(upper_bound_phi_plus(al, l) >= plus - 1e-3);
  }
  CHECK(lower_bound_phi_minus(Alpha{-2.5}, 0.5) > 0.0);
}

TEST_CASE("check_comparison on canned problems") {
  const auto x = linspace(0.0, 1.0, 41);
  const std::vector<double> zero(x.size(), 0.0);
  const auto zero_rate = [](double, double) { return 0.0; };

  SUBCASE("linear case with equal start") {
    const ComparisonOutcome o = check_comparison({x, zero, x, zero_rate, BoundaryMode::equal_with_slope});
    REQUIRE(verified(o));
    CHECK(std::get<Verified>(o).min_margin == doctest::Approx(1.0));
    // the same data do not satisfy the strict boundary condition
    CHECK(std::holds_alternative<HypothesisFailed>(
        check_comparison({x, zero, x, zero_rate, BoundaryMode::strict_limit})));
  }
  SUBCASE("identical curves") {
    const ComparisonOutcome o = check_comparison({x, x, x, zero_rate, BoundaryMode::equal_with_slope});
    REQUIRE(std::holds_alternative<ConclusionFailed>(o));
    CHECK(std::get<ConclusionFailed>(o).where == x[1]);
  }
  SUBCASE("derivative condition violated while the conclusion holds") {
    std::vector<double> xi;
    for (double t : x) xi.push_back(0.5 * t - 1.0);
    CHECK(std::holds_alternative<HypothesisFailed>(
        check_comparison({x, xi, zero, zero_rate, BoundaryMode::strict_limit})));
  }
  SUBCASE("decreasing abscissae") {
    std::vector<double> xr(x.rbegin(), x.rend()), eta;
    for (double t : xr) eta.push_back(1.0 - t);
    const std::vector<double> xi(xr.size(), -1.0);
    CHECK(verified(check_comparison({xr, xi, eta, zero_rate, BoundaryMode::strict_limit})));
  }
  SUBCASE("no margin") {
    const std::vector<double> xi(x.size(), -1.0), eta(x.size(), 1.0);
    CHECK_THROWS_AS(check_comparison({x, xi, eta, zero_rate, BoundaryMode::strict_limit}), GridTooCoarse);
  }
  SUBCASE("malformed input") {
    const std::vector<double> shortx(5, 0.0);
    CHECK_THROWS_AS(check_comparison({shortx, shortx, shortx, zero_rate}), DomainError);
    auto bent = x;
    bent[7] = bent[6];
    CHECK_THROWS_AS(check_comparison({bent, zero, x, zero_rate}), DomainError);
    CHECK_THROWS_AS(check_comparison({x, zero, x, nullptr}), DomainError);
  }
}

TEST_CASE("lower-bound comparison along the traced L-") {
  const SeparatrixTrace t = trace_separatrix(kSeparated, Branch::minus);
  const LowerBoundComparison c = compare_lower_bound(kSeparated, kMu, t);
  REQUIRE(c.outcomes.size() == 3);
  for (const auto& o : c.outcomes) {
    CAPTURE(describe(o));
    CHECK(verified(o));
  }
  CHECK(c.verified());
  CHECK_THROWS_AS(compare_lower_bound(Alpha{-2.5}, kMu, t), DomainError);
}
