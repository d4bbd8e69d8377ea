#include "qhlc/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "qhlc/integrator.hpp"

namespace qhlc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Derivative at x[i] of the quartic through x[i + k * j], j = -2..2. Also
// returns sum |w_j| for the rounding estimate.
std::pair<double, double> five_point(const std::vector<double>& x, const std::vector<double>& y,
                                     std::size_t i, std::size_t k) {
  std::array<double, 5> nodes;
  for (std::size_t j = 0; j < 5; ++j) nodes[j] = x[i + j * k - 2 * k];
  double d = 0.0, wsum = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    // L_j'(x[i]); the node x[i] itself is nodes[2].
    double w = 0.0;
    for (std::size_t m = 0; m < 5; ++m) {
      if (m == j) continue;
      double term = 1.0 / (nodes[j] - nodes[m]);
      for (std::size_t l = 0; l < 5; ++l) {
        if (l != j && l != m) term *= (nodes[2] - nodes[l]) / (nodes[j] - nodes[l]);
      }
      w += term;
    }
    d += w * y[i + j * k - 2 * k];
    wsum += std::abs(w);
  }
  return {d, wsum};
}

struct Derivative {
  double value;
  double error;
};

// Fourth-order stencil; the stencil with doubled spacing gives the error
// estimate, plus rounding.
Derivative derivative(const std::vector<double>& x, const std::vector<double>& y, std::size_t i) {
  const auto [d1, wsum] = five_point(x, y, i, 1);
  const double d2 = five_point(x, y, i, 2).first;
  double ymax = 0.0;
  for (std::size_t j = i - 2; j <= i + 2; ++j) ymax = std::max(ymax, std::abs(y[j]));
  return {d1, std::abs(d2 - d1) + 4.0 * kEps * std::max(ymax, 1.0) * wsum};
}

// One-sided second-order derivative at index 0 (towards x1).
double forward_derivative(const std::vector<double>& x, const std::vector<double>& y) {
  const double h1 = x[1] - x[0];
  const double h2 = x[2] - x[1];
  const double a = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
  const double b = (h1 + h2) / (h1 * h2);
  const double c = -h1 / (h2 * (h1 + h2));
  return a * y[0] + b * y[1] + c * y[2];
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

}  // namespace

PhiCurve phi_curve(Alpha alpha, double mu) {
  require_four_equilibria(alpha);
  if (!(mu > 0.0 && mu < f_local_max(alpha))) {
    throw DomainError("mu must lie in (0, f(2 alpha/3, alpha) = " + fmt(f_local_max(alpha)) + ")");
  }
  PhiCurve c{level_roots(alpha, mu), level_roots(alpha, 0.0), 0.0, 0.0, 0.0};
  const double v1 = c.roots_mu.v1;
  c.z1 = std::sqrt(-mu * v1);
  c.z2 = std::sqrt(mu) * (std::sqrt(-v1) + std::sqrt(c.roots_mu.v2 - v1));
  c.c3 = c.z2 + c.roots_0.v2 / c.z2;
  return c;
}

PsiCurve psi_curve(Alpha alpha, double lambda) {
  require_four_equilibria(alpha);
  if (!(lambda > -1.0 && lambda < 0.0)) throw DomainError("lambda must lie in (-1, 0)");
  PsiCurve c{};
  c.v30 = level_roots(alpha, 0.0).v3;
  c.v3l = level_roots(alpha, lambda).v3;
  const double s = std::sqrt(-lambda);
  c.z_start = s * std::sqrt(c.v30);
  c.z3 = s * (std::sqrt(c.v30) + std::sqrt(c.v30 - c.v3l));
  c.s = c.v3l / c.z3 + c.z3;
  // Tangency makes the discriminant vanish; rounding may push it below zero.
  c.z_bar = 0.5 * (c.s + std::sqrt(std::max(0.0, c.s * c.s - 4.0 * c.v3l)));
  return c;
}

double varphi_mu(Alpha alpha, double mu, double v) {
  const PhiCurve c = phi_curve(alpha, mu);
  const double v1 = c.roots_mu.v1;
  if (!(v >= v1 && v <= 0.0)) {
    throw DomainError("varphi_mu is defined on [v1^mu, 0] = [" + fmt(v1) + ", 0]");
  }
  if (v < c.roots_mu.v2) {
    const double r = mu * v1 / c.z1;
    return 0.5 * (c.z1 - r + std::sqrt((c.z1 + r) * (c.z1 + r) + 4.0 * mu * (v - v1)));
  }
  if (v < c.roots_0.v2) return c.z2;
  return 0.5 * (c.c3 + std::sqrt(c.c3 * c.c3 - 4.0 * v));
}

double psi_lambda(Alpha alpha, double lambda, double z) {
  const PsiCurve c = psi_curve(alpha, lambda);
  if (!(z >= c.z_start) || !std::isfinite(z)) {
    throw DomainError("psi_lambda needs z >= sqrt(-lambda v3^0) = " + fmt(c.z_start));
  }
  if (z <= c.z3) return z * z / lambda + 2.0 * std::sqrt(-c.v30 / lambda) * z;
  return -z * z + c.s * z;
}

double omega_lambda(Alpha alpha, double lambda, double v) {
  const PsiCurve c = psi_curve(alpha, lambda);
  if (!(v >= 0.0 && v <= c.v30)) {
    throw DomainError("omega_lambda is defined for v in [0, v3^0] = [0, " + fmt(c.v30) + "]");
  }
  if (v == c.v3l) {
    throw BranchGapError("omega_lambda jumps at v3^lambda = " + fmt(c.v3l) +
                         " (one-sided limits " + fmt(c.z_bar) + " and " + fmt(c.z3) + ")");
  }
  if (v > c.v3l) return std::sqrt(-lambda) * (std::sqrt(c.v30) + std::sqrt(c.v30 - v));
  return 0.5 * (c.s + std::sqrt(c.s * c.s - 4.0 * v));
}

double lower_bound_phi_minus(Alpha alpha, double mu) { return std::max(phi_curve(alpha, mu).c3, 0.0); }

double upper_bound_phi_plus(Alpha alpha, double lambda) { return psi_curve(alpha, lambda).s; }

BoundReport bound_report(Alpha alpha, double mu, double lambda) {
  const PhiCurve phi = phi_curve(alpha, mu);
  const PsiCurve psi = psi_curve(alpha, lambda);
  const double lower = std::max(phi.c3, 0.0);
  return {alpha, mu, lambda, phi.z2, psi.z3, lower, psi.s, lower - psi.s};
}

ComparisonOutcome check_comparison(const ComparisonProblem& p) {
  const std::size_t n = p.x.size();
  if (n < 9 || p.xi.size() != n || p.eta.size() != n) {
    throw DomainError("check_comparison needs at least 9 samples of x, xi and eta of equal length");
  }
  if (!p.g) throw DomainError("check_comparison needs a rate function g");
  const double orient = p.x[1] > p.x[0] ? 1.0 : -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(orient * (p.x[i] - p.x[i - 1]) > 0.0)) {
      throw DomainError("check_comparison samples must be strictly monotone in x");
    }
  }

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(p.xi[i] < p.eta[i])) return ConclusionFailed{p.x[i]};
  }

  const double gap0 = p.xi[0] - p.eta[0];
  if (p.boundary_mode == BoundaryMode::strict_limit) {
    if (!(gap0 < 0.0)) return HypothesisFailed{p.x[0], "xi - eta = " + fmt(gap0) + " >= 0 at x0"};
  } else {
    const double scale = std::max({1.0, std::abs(p.xi[0]), std::abs(p.eta[0])});
    if (std::abs(gap0) > 1e-12 * scale) {
      return HypothesisFailed{p.x[0], "xi - eta = " + fmt(gap0) + " is not 0 at x0"};
    }
    std::vector<double> diff(3);
    for (std::size_t i = 0; i < 3; ++i) diff[i] = p.xi[i] - p.eta[i];
    const double slope = forward_derivative(p.x, diff);
    if (!(orient * slope < 0.0)) {
      return HypothesisFailed{p.x[0], "(xi - eta)' = " + fmt(slope) + " has the wrong sign at x0"};
    }
  }

  double min_margin = std::numeric_limits<double>::infinity();
  std::optional<double> coarse_at;
  for (std::size_t i = 4; i + 4 < n; ++i) {
    const Derivative dxi = derivative(p.x, p.xi, i);
    const Derivative deta = derivative(p.x, p.eta, i);
    const double gxi = p.g(p.x[i], p.xi[i]);
    const double geta = p.g(p.x[i], p.eta[i]);
    if (!std::isfinite(gxi) || !std::isfinite(geta)) {
      return HypothesisFailed{p.x[i], "g is not finite on the curves"};
    }
    const double margin = orient * ((deta.value - geta) - (dxi.value - gxi));
    const double error = dxi.error + deta.error;
    if (std::abs(margin) <= 10.0 * error) {
      if (!coarse_at) coarse_at = p.x[i];
      continue;
    }
    if (margin < 0.0) {
      return HypothesisFailed{p.x[i], "derivative condition violated by " + fmt(-margin)};
    }
    min_margin = std::min(min_margin, margin);
  }
  if (coarse_at) {
    throw GridTooCoarse("derivative margin within 10x the finite-difference error at x = " +
                        fmt(*coarse_at));
  }
  return Verified{min_margin};
}

std::string describe(const ComparisonOutcome& outcome) {
  if (const auto* v = std::get_if<Verified>(&outcome)) return "Verified (min margin " + fmt(v->min_margin) + ")";
  if (const auto* h = std::get_if<HypothesisFailed>(&outcome)) {
    return "HypothesisFailed at x = " + fmt(h->where) + ": " + h->reason;
  }
  return "ConclusionFailed at x = " + fmt(std::get<ConclusionFailed>(outcome).where);
}

bool LowerBoundComparison::verified() const {
  return std::all_of(outcomes.begin(), outcomes.end(),
                     [](const ComparisonOutcome& o) { return std::holds_alternative<Verified>(o); });
}

LowerBoundComparison compare_lower_bound(Alpha alpha, double mu, const SeparatrixTrace& trace,
                                         std::size_t points_per_interval) {
  if (trace.which != Branch::minus || !(trace.alpha == alpha)) {
    throw DomainError("compare_lower_bound needs the L- trace at the same alpha");
  }
  if (!trace.phi_at_zero) throw DomainError("the L- trace does not reach the z-axis");
  if (points_per_interval < 9) throw DomainError("need at least 9 points per interval");

  const PhiCurve c = phi_curve(alpha, mu);
  const double a = c.roots_mu.v1;
  const double b = c.roots_mu.v2;
  const double v20 = c.roots_0.v2;
  const std::size_t n = points_per_interval;

  // varphi has a square-root foot at v1^mu; a geometric grid keeps the
  // stencil small relative to the distance from it. The first abscissa sits
  // a little inside the interval, where xi < eta still has to hold.
  std::vector<std::vector<double>> grids(3);
  const double d0 = 1e-4 * (b - a);
  const double ratio = std::pow((b - a) / d0, 1.0 / static_cast<double>(n - 1));
  for (std::size_t i = 0; i < n; ++i) grids[0].push_back(a + d0 * std::pow(ratio, static_cast<double>(i)));
  grids[0].back() = b;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    grids[1].push_back(b + t * (v20 - b));
    grids[2].push_back(v20 + t * (0.0 - v20));
  }
  grids[1].back() = v20;
  grids[2].back() = 0.0;

  // Anchor: first trace sample at or beyond the first abscissa.
  const auto& samples = trace.curve.samples;
  const auto it = std::find_if(samples.begin(), samples.end(),
                               [&](const Sample& s) { return s.state[0] >= grids[0].front(); });
  if (it == samples.end()) throw NumericalError("L- trace never reaches v1^mu");
  double v = it->state[0];
  double z = it->state[1];

  const std::vector<std::function<double(double, double)>> rates{
      [mu](double x, double y) { return mu * y / (mu * x + y * y); },
      [](double, double) { return 0.0; },
      [](double x, double y) { return y / (x - y * y); },
  };

  LowerBoundComparison out;
  for (std::size_t k = 0; k < 3; ++k) {
    ComparisonProblem p;
    p.x = grids[k];
    p.g = rates[k];
    p.boundary_mode = BoundaryMode::strict_limit;
    for (double x : p.x) {
      z = integrate_graph(v, z, alpha, x, 1e-12);
      v = x;
      p.eta.push_back(z);
      p.xi.push_back(varphi_mu(alpha, mu, x));  // continuous across the junctions
    }
    out.outcomes.push_back(check_comparison(p));
    out.problems.push_back(std::move(p));
  }
  return out;
}

}  // namespace qhlc
