#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "qhlc/bounds.hpp"
#include "qhlc/core.hpp"
#include "qhlc/integrator.hpp"
#include "qhlc/limit_cycle.hpp"
#include "qhlc/separatrix.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace qhlc;

namespace {

Branch branch_of(const std::string& which) {
  if (which == "minus") return Branch::minus;
  if (which == "plus") return Branch::plus;
  throw DomainError("which must be 'minus' or 'plus'");
}

SeparatrixOptions separatrix_options(double rtol, double atol, double z_seed, bool seed_check) {
  SeparatrixOptions o;
  o.integrate.rtol = rtol;
  o.integrate.atol = atol;
  o.z_seed = z_seed;
  o.seed_check = seed_check;
  return o;
}

py::object outcome_to_py(const ComparisonOutcome& o) {
  if (const auto* v = std::get_if<Verified>(&o)) return py::dict("status"_a = "Verified", "min_margin"_a = v->min_margin);
  if (const auto* h = std::get_if<HypothesisFailed>(&o)) {
    return py::dict("status"_a = "HypothesisFailed", "where"_a = h->where, "reason"_a = h->reason);
  }
  return py::dict("status"_a = "ConclusionFailed", "where"_a = std::get<ConclusionFailed>(o).where);
}

}  // namespace

PYBIND11_MODULE(qhlc, m) {
  m.doc() = "Separatrices, comparison bounds and limit cycles of x' = y, y' = -x^3 + a x^2 y + y^3";

  // Base classes first: pybind11 tries translators newest-first.
  auto& error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto& domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
  auto& numerical = py::register_exception<NumericalError>(m, "NumericalError", error.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", domain.ptr());
  py::register_exception<BadBracket>(m, "BadBracket", domain.ptr());
  py::register_exception<BranchGapError>(m, "BranchGapError", domain.ptr());
  py::register_exception<StiffnessError>(m, "StiffnessError", numerical.ptr());
  py::register_exception<MaxStepsExceeded>(m, "MaxStepsExceeded", numerical.ptr());
  py::register_exception<LeftGraphRegionError>(m, "LeftGraphRegionError", numerical.ptr());
  py::register_exception<SeedTooCoarse>(m, "SeedTooCoarse", numerical.ptr());
  py::register_exception<GridTooCoarse>(m, "GridTooCoarse", numerical.ptr());
  // AmbiguousBracket also carries the fixed points it found.
  static PyObject* ambiguous = py::register_exception<AmbiguousBracket>(m, "AmbiguousBracket", numerical.ptr()).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const AmbiguousBracket& e) {
      py::object exc = py::reinterpret_borrow<py::object>(ambiguous)(e.what());
      exc.attr("fixed_points") = e.fixed_points();
      PyErr_SetObject(ambiguous, exc.ptr());
    }
  });

  // core
  m.attr("FOUR_EQUILIBRIA_BOUND") = kFourEquilibriaBound;
  m.def("eval_f", [](double v, double a) { return eval_f(v, a); }, "v"_a, "alpha"_a);
  m.def("level_roots", [](double a, double mu) {
        const LevelRoots r = level_roots(Alpha{a}, mu);
        return py::make_tuple(r.v1, r.v2, r.v3);
      }, "alpha"_a, "mu"_a);
  m.def("field_xy", [](double x, double y, double a) { return field_xy(x, y, Alpha{a}); }, "x"_a, "y"_a, "alpha"_a);
  m.def("field_vz", [](double v, double z, double a) { return field_vz(v, z, Alpha{a}); }, "v"_a, "z"_a, "alpha"_a);
  m.def("classify_region", [](double v, double z, double a, double band) {
        return std::string(to_string(classify_region(v, z, Alpha{a}, band)));
      }, "v"_a, "z"_a, "alpha"_a, "band"_a = kDefaultKBand);
  m.def("equilibria", [](double a) {
        py::list out;
        for (const EquilibriumInfo& e : equilibria(Alpha{a})) {
          out.append(py::dict("index"_a = e.index, "position"_a = e.position,
                              "kind"_a = std::string(to_string(e.kind)), "lambda_hyp"_a = e.lambda_hyp,
                              "center_cubic"_a = e.center_cubic,
                              "invariant_curve_quad"_a = e.invariant_curve_quad));
        }
        return out;
      }, "alpha"_a);
  m.def("rotated_determinant", &rotated_determinant, "x"_a, "y"_a);

  // integrator
  m.def("integrate_graph", [](double v0, double z0, double a, double v_target, double rtol) {
        return integrate_graph(v0, z0, Alpha{a}, v_target, rtol);
      }, "v0"_a, "z0"_a, "alpha"_a, "v_target"_a, "rtol"_a = 1e-10);

  // separatrix
  m.def("seed_separatrix", [](double a, const std::string& which, double z_seed) {
        return seed_separatrix(Alpha{a}, branch_of(which), z_seed);
      }, "alpha"_a, "which"_a, "z_seed"_a = 1e-3);
  m.def("trace_separatrix", [](double a, const std::string& which, double rtol, double atol, double z_seed,
                               bool seed_check) {
        const Branch b = branch_of(which);
        std::optional<SeparatrixTrace> traced;
        {
          py::gil_scoped_release release;
          traced = trace_separatrix(Alpha{a}, b, separatrix_options(rtol, atol, z_seed, seed_check));
        }
        const SeparatrixTrace& t = *traced;
        py::list samples;
        for (const Sample& s : t.curve.samples) samples.append(py::make_tuple(s.t, s.state[0], s.state[1]));
        return py::dict("which"_a = std::string(to_string(t.which)), "endpoint"_a = std::string(to_string(t.endpoint)),
                        "phi_at_zero"_a = t.phi_at_zero, "v_extreme"_a = t.v_extreme, "samples"_a = samples);
      }, "alpha"_a, "which"_a, "rtol"_a = 1e-11, "atol"_a = 1e-13, "z_seed"_a = 1e-3, "seed_check"_a = true);
  m.def("phi_at_zero", [](double a, const std::string& which, double rtol, double atol, double z_seed,
                          bool seed_check) {
        const Branch b = branch_of(which);
        py::gil_scoped_release release;
        return phi_at_zero(Alpha{a}, b, separatrix_options(rtol, atol, z_seed, seed_check));
      }, "alpha"_a, "which"_a, "rtol"_a = 1e-11, "atol"_a = 1e-13, "z_seed"_a = 1e-3, "seed_check"_a = true);
  m.def("gap", [](double a, bool seed_check) {
        GapResult g{Alpha{a}, 0, 0, 0, Configuration::I};
        {
          py::gil_scoped_release release;
          g = gap(Alpha{a}, separatrix_options(1e-11, 1e-13, 1e-3, seed_check));
        }
        return py::dict("alpha"_a = a, "phi_minus0"_a = g.phi_minus0, "phi_plus0"_a = g.phi_plus0,
                        "delta"_a = g.delta, "case"_a = std::string(to_string(g.config)));
      }, "alpha"_a, "seed_check"_a = true);
  m.def("find_alpha_star", [](double lo, double hi, double tol) {
        AlphaStar s{};
        {
          py::gil_scoped_release release;
          s = find_alpha_star(lo, hi, tol);
        }
        return py::dict("value"_a = s.value, "lo"_a = s.lo, "hi"_a = s.hi, "tolerance"_a = s.tolerance,
                        "iterations"_a = s.iterations);
      }, "lo"_a, "hi"_a, "tol"_a = 1e-3);

  // comparison-bounds
  m.def("varphi_mu", [](double a, double mu, double v) { return varphi_mu(Alpha{a}, mu, v); }, "alpha"_a, "mu"_a, "v"_a);
  m.def("psi_lambda", [](double a, double l, double z) { return psi_lambda(Alpha{a}, l, z); }, "alpha"_a, "lam"_a, "z"_a);
  m.def("omega_lambda", [](double a, double l, double v) { return omega_lambda(Alpha{a}, l, v); }, "alpha"_a, "lam"_a, "v"_a);
  m.def("lower_bound_phi_minus", [](double a, double mu) { return lower_bound_phi_minus(Alpha{a}, mu); }, "alpha"_a, "mu"_a);
  m.def("upper_bound_phi_plus", [](double a, double l) { return upper_bound_phi_plus(Alpha{a}, l); }, "alpha"_a, "lam"_a);
  m.def("bound_report", [](double a, double mu, double l) {
        const BoundReport r = bound_report(Alpha{a}, mu, l);
        return py::dict("alpha"_a = a, "mu"_a = r.mu, "lambda"_a = r.lambda, "z2_mu"_a = r.z2_mu,
                        "z3_lambda"_a = r.z3_lambda, "lower_phi_minus0"_a = r.lower_phi_minus0,
                        "upper_phi_plus0"_a = r.upper_phi_plus0, "separation"_a = r.separation);
      }, "alpha"_a, "mu"_a, "lam"_a);
  m.def("check_comparison", [](std::vector<double> x, std::vector<double> xi, std::vector<double> eta,
                               std::function<double(double, double)> g, const std::string& mode) {
        if (mode != "strict_limit" && mode != "equal_with_slope") {
          throw DomainError("mode must be 'strict_limit' or 'equal_with_slope'");
        }
        ComparisonProblem p{std::move(x), std::move(xi), std::move(eta), std::move(g),
                            mode == "equal_with_slope" ? BoundaryMode::equal_with_slope : BoundaryMode::strict_limit};
        return outcome_to_py(check_comparison(p));
      }, "x"_a, "xi"_a, "eta"_a, "g"_a, "mode"_a = "strict_limit");

  // limit-cycle
  m.def("return_map", [](double x0, double a) { return return_map(x0, Alpha{a}); }, "x0"_a, "alpha"_a);
  m.def("half_return_map", [](double x0, double a) { return half_return_map(x0, Alpha{a}); }, "x0"_a, "alpha"_a);
  m.def("find_limit_cycle", [](double a, double x_lo, double x_hi) {
        LimitCycleResult r{Alpha{a}};
        {
          py::gil_scoped_release release;
          r = find_limit_cycle(Alpha{a}, x_lo, x_hi);
        }
        return py::dict("alpha"_a = a, "found"_a = r.found, "x_star"_a = r.x_star, "period"_a = r.period,
                        "multiplier"_a = r.multiplier, "verdict"_a = std::string(to_string(r.verdict)));
      }, "alpha"_a, "x_lo"_a = kDefaultSectionLo, "x_hi"_a = kDefaultSectionHi);
  m.def("scan_alpha", [](double from, double to, double step, unsigned threads) {
        ScanResult s;
        {
          py::gil_scoped_release release;
          s = scan_alpha(from, to, step, {}, threads);
        }
        py::list rows;
        for (const ScanRow& r : s.rows) {
          rows.append(py::dict("alpha"_a = r.alpha, "found"_a = r.found, "x_star"_a = r.x_star,
                               "multiplier"_a = r.multiplier));
        }
        return py::make_tuple(rows, s.alpha_bar);
      }, "start"_a, "stop"_a, "step"_a, "threads"_a = 0);
  m.def("classify_origin", [](double a, double probe) {
        return std::string(to_string(classify_origin(Alpha{a}, probe)));
      }, "alpha"_a, "probe_amplitude"_a);
}
