#pragma once

// Closed-form comparison curves for the two separatrices and a sampled
// checker for the comparison principle
//
//   xi' - g(x, xi) < eta' - g(x, eta) on (x0, x1), plus a boundary condition
//   at x0   ==>   xi < eta on (x0, x1).
//
// varphi_mu solves the piecewise equation
//   dz/dv = mu z / (mu v + z^2)  on [v1^mu, v2^mu),
//           0                    on [v2^mu, v2^0),
//           z / (v - z^2)        on [v2^0, 0],
// from the seed (v1^mu, sqrt(-mu v1^mu)); it stays below L- so varphi_mu(0)
// bounds phi-(0) from below.
//
// psi_lambda solves
//   dv/dz = v/z + z/lambda  for z <= z3,    v/z - z  for z > z3,
// from (v3^0, sqrt(-lambda v3^0)); its inverse omega_lambda stays above L+ and
// omega_lambda(0) bounds phi+(0) from above.

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "qhlc/core.hpp"
#include "qhlc/separatrix.hpp"

namespace qhlc {

/// Junction data of the two comparison curves.
struct PhiCurve {
  LevelRoots roots_mu;  // f = mu
  LevelRoots roots_0;   // f = 0
  double z1;            // seed height sqrt(-mu v1^mu)
  double z2;            // height on [v2^mu, v2^0)
  double c3;            // z2 + v2^0 / z2; varphi_mu(0) = max(c3, 0)
};

struct PsiCurve {
  double v30;    // v3^0
  double v3l;    // v3^lambda
  double z_start;  // sqrt(-lambda v3^0)
  double z3;     // end of the first branch
  double s;      // v3^lambda / z3 + z3, the second-branch coefficient
  double z_bar;  // larger root of v3^lambda = -z^2 + s z
};

/// Validates 0 < mu < f(2 alpha/3, alpha) and alpha < -3/cbrt(4).
PhiCurve phi_curve(Alpha alpha, double mu);
/// Validates -1 < lambda < 0 and alpha < -3/cbrt(4).
PsiCurve psi_curve(Alpha alpha, double lambda);

/// varphi^mu(v) for v in [v1^mu, 0].
double varphi_mu(Alpha alpha, double mu, double v);

/// psi^lambda(z) for z >= sqrt(-lambda v3^0).
double psi_lambda(Alpha alpha, double lambda, double z);

/// Inverse of psi^lambda on I^lambda: v in (v3^lambda, v3^0] uses the first
/// branch, v in [0, v3^lambda) the second. v = v3^lambda throws BranchGapError.
double omega_lambda(Alpha alpha, double lambda, double v);

/// max{z2 + v2^0 / z2, 0} with z2 = sqrt(mu)(sqrt(-v1^mu) + sqrt(v2^mu - v1^mu)).
double lower_bound_phi_minus(Alpha alpha, double mu);

/// z3 + v3^lambda / z3 with z3 = sqrt(-lambda)(sqrt(v3^0) + sqrt(v3^0 - v3^lambda)).
double upper_bound_phi_plus(Alpha alpha, double lambda);

struct BoundReport {
  Alpha alpha;
  double mu;
  double lambda;
  double z2_mu;
  double z3_lambda;
  double lower_phi_minus0;
  double upper_phi_plus0;
  double separation;  // lower - upper
};

BoundReport bound_report(Alpha alpha, double mu, double lambda);

// --- comparison checker -----------------------------------------------------

enum class BoundaryMode {
  strict_limit,      // limsup (xi - eta) < 0 at x0
  equal_with_slope,  // limsup (xi - eta) = 0 and limsup (xi' - eta') < 0 at x0
};

/// Both curves sampled on one grid `x`, strictly monotone from x0 towards x1
/// (either orientation). x0 is the first grid abscissa and carries the
/// boundary condition; x1 the last.
struct ComparisonProblem {
  std::vector<double> x;
  std::vector<double> xi;
  std::vector<double> eta;
  std::function<double(double, double)> g;
  BoundaryMode boundary_mode = BoundaryMode::strict_limit;
};

struct Verified {
  double min_margin;  // smallest margin of the derivative condition
};
struct HypothesisFailed {
  double where;
  std::string reason;
};
struct ConclusionFailed {
  double where;
};
using ComparisonOutcome = std::variant<Verified, HypothesisFailed, ConclusionFailed>;

/// ConclusionFailed wins over HypothesisFailed (a violated conclusion is the
/// stronger finding). The derivative condition is tested with fourth-order
/// finite differences wherever the nine samples around a point exist; a
/// margin within 10x the finite-difference error estimate throws GridTooCoarse.
ComparisonOutcome check_comparison(const ComparisonProblem& problem);

std::string describe(const ComparisonOutcome& outcome);

/// The three comparison problems behind the lower bound: varphi^mu against
/// the traced L- on (v1^mu, v2^mu), (v2^mu, v2^0) and (v2^0, 0), with
/// g = the piecewise comparison rate. L- is resampled on each grid by
/// graph-form integration from `trace`.
struct LowerBoundComparison {
  std::vector<ComparisonProblem> problems;
  std::vector<ComparisonOutcome> outcomes;
  bool verified() const;
};

LowerBoundComparison compare_lower_bound(Alpha alpha, double mu, const SeparatrixTrace& trace,
                                         std::size_t points_per_interval = 4000);

}  // namespace qhlc
