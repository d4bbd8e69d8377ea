#include "qhlc/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qhlc/bounds.hpp"
#include "qhlc/core.hpp"
#include "qhlc/limit_cycle.hpp"
#include "qhlc/separatrix.hpp"

namespace qhlc::cli {

namespace {

using Json = nlohmann::ordered_json;

// One emitted artifact: a CSV table and its JSON twin.
struct Artifact {
  Format natural = Format::csv;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  Json json = Json::object();
};

Json jnum(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string cell(double x) { return format_number(x); }
std::string cell(bool b) { return b ? "true" : "false"; }
std::string cell(std::string_view s) { return std::string(s); }

Artifact start(const char* command, Format natural) {
  Artifact a;
  a.natural = natural;
  a.json["schema"] = 1;
  a.json["command"] = command;
  return a;
}

void write(const Artifact& a, Format format, std::ostream& out) {
  if (format == Format::automatic) format = a.natural;
  if (format == Format::json) {
    out << a.json.dump(2) << '\n';
    return;
  }
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(a.header);
  for (const auto& r : a.rows) line(r);
}

SeparatrixOptions separatrix_options(const RunConfig& c) {
  SeparatrixOptions o;
  o.integrate.rtol = c.rtol;
  o.integrate.atol = c.atol;
  o.z_seed = c.z_seed;
  o.escape_radius = c.r_max;
  return o;
}

LimitCycleOptions cycle_options(const RunConfig& c) {
  LimitCycleOptions o;
  o.map.rtol = c.rtol;
  o.map.atol = c.atol;
  o.map.escape_radius = c.r_max;
  return o;
}

Artifact cmd_roots(double alpha, double mu) {
  const LevelRoots r = level_roots(Alpha{alpha}, mu);
  Artifact a = start("roots", Format::csv);
  a.header = {"alpha", "mu", "v1", "v2", "v3"};
  a.rows.push_back({cell(alpha), cell(mu), cell(r.v1), cell(r.v2), cell(r.v3)});
  a.json["alpha"] = jnum(alpha);
  a.json["mu"] = jnum(mu);
  a.json["v1"] = jnum(r.v1);
  a.json["v2"] = jnum(r.v2);
  a.json["v3"] = jnum(r.v3);
  return a;
}

Artifact cmd_equilibria(double alpha) {
  Artifact a = start("equilibria", Format::csv);
  a.header = {"index", "v", "z", "kind", "lambda_hyp", "center_cubic", "invariant_curve_quad"};
  a.json["alpha"] = jnum(alpha);
  Json list = Json::array();
  for (const EquilibriumInfo& e : equilibria(Alpha{alpha})) {
    a.rows.push_back({std::to_string(e.index), cell(e.position[0]), cell(e.position[1]), cell(to_string(e.kind)),
                      cell(e.lambda_hyp), cell(e.center_cubic), cell(e.invariant_curve_quad)});
    list.push_back({{"index", e.index},
                    {"v", jnum(e.position[0])},
                    {"z", jnum(e.position[1])},
                    {"kind", to_string(e.kind)},
                    {"lambda_hyp", jnum(e.lambda_hyp)},
                    {"center_cubic", jnum(e.center_cubic)},
                    {"invariant_curve_quad", jnum(e.invariant_curve_quad)}});
  }
  a.json["equilibria"] = std::move(list);
  return a;
}

Artifact cmd_separatrix(double alpha, const std::string& which, const RunConfig& c, std::ostream& err) {
  const Branch b = which == "minus" ? Branch::minus : Branch::plus;
  const SeparatrixTrace t = trace_separatrix(Alpha{alpha}, b, separatrix_options(c));
  err << to_string(b) << ": endpoint " << to_string(t.endpoint) << ", phi(0) "
      << (t.phi_at_zero ? format_number(*t.phi_at_zero) : "absent") << ", v_extreme "
      << format_number(t.v_extreme) << ", " << t.curve.steps << " steps\n";

  Artifact a = start("separatrix", Format::csv);
  a.header = {"tau", "v", "z"};
  Json samples = Json::array();
  for (const Sample& s : t.curve.samples) {
    a.rows.push_back({cell(s.t), cell(s.state[0]), cell(s.state[1])});
    samples.push_back({jnum(s.t), jnum(s.state[0]), jnum(s.state[1])});
  }
  a.json["alpha"] = jnum(alpha);
  a.json["which"] = to_string(b);
  a.json["endpoint"] = to_string(t.endpoint);
  a.json["phi_at_zero"] = t.phi_at_zero ? jnum(*t.phi_at_zero) : Json(nullptr);
  a.json["v_extreme"] = jnum(t.v_extreme);
  a.json["samples"] = std::move(samples);
  return a;
}

Artifact cmd_gap(double alpha, const RunConfig& c) {
  const GapResult g = gap(Alpha{alpha}, separatrix_options(c));
  Artifact a = start("gap", Format::json);
  a.header = {"alpha", "phi_minus0", "phi_plus0", "delta", "case"};
  a.rows.push_back({cell(alpha), cell(g.phi_minus0), cell(g.phi_plus0), cell(g.delta), cell(to_string(g.config))});
  a.json["alpha"] = jnum(alpha);
  a.json["phi_minus0"] = jnum(g.phi_minus0);
  a.json["phi_plus0"] = jnum(g.phi_plus0);
  a.json["delta"] = jnum(g.delta);
  a.json["case"] = to_string(g.config);
  return a;
}

Artifact cmd_alpha_star(double lo, double hi, double tol, const RunConfig& c) {
  const AlphaStar s = find_alpha_star(lo, hi, tol, separatrix_options(c));
  Artifact a = start("alpha-star", Format::json);
  a.header = {"value", "lo", "hi", "tolerance", "iterations"};
  a.rows.push_back({cell(s.value), cell(s.lo), cell(s.hi), cell(s.tolerance), std::to_string(s.iterations)});
  a.json["value"] = jnum(s.value);
  a.json["lo"] = jnum(s.lo);
  a.json["hi"] = jnum(s.hi);
  a.json["tolerance"] = jnum(s.tolerance);
  a.json["iterations"] = s.iterations;
  return a;
}

Artifact cmd_bounds(double alpha, double mu, double lambda) {
  const BoundReport r = bound_report(Alpha{alpha}, mu, lambda);
  Artifact a = start("bounds", Format::json);
  a.header = {"alpha", "mu", "lambda", "z2_mu", "z3_lambda", "lower_phi_minus0", "upper_phi_plus0", "separation"};
  a.rows.push_back({cell(alpha), cell(mu), cell(lambda), cell(r.z2_mu), cell(r.z3_lambda),
                    cell(r.lower_phi_minus0), cell(r.upper_phi_plus0), cell(r.separation)});
  a.json["alpha"] = jnum(alpha);
  a.json["mu"] = jnum(mu);
  a.json["lambda"] = jnum(lambda);
  a.json["z2_mu"] = jnum(r.z2_mu);
  a.json["z3_lambda"] = jnum(r.z3_lambda);
  a.json["lower_phi_minus0"] = jnum(r.lower_phi_minus0);
  a.json["upper_phi_plus0"] = jnum(r.upper_phi_plus0);
  a.json["separation"] = jnum(r.separation);
  return a;
}

Artifact cmd_limit_cycle(double alpha, double x_lo, double x_hi, const RunConfig& c) {
  const LimitCycleResult r = find_limit_cycle(Alpha{alpha}, x_lo, x_hi, cycle_options(c));
  Artifact a = start("limit-cycle", Format::json);
  a.header = {"alpha", "found", "x_star", "period", "multiplier", "verdict"};
  a.rows.push_back({cell(alpha), cell(r.found), cell(r.x_star), cell(r.period), cell(r.multiplier),
                    cell(to_string(r.verdict))});
  a.json["alpha"] = jnum(alpha);
  a.json["found"] = r.found;
  a.json["x_star"] = jnum(r.x_star);
  a.json["period"] = jnum(r.period);
  a.json["multiplier"] = jnum(r.multiplier);
  a.json["verdict"] = to_string(r.verdict);
  return a;
}

Artifact cmd_scan(double from, double to, double step, unsigned threads, const RunConfig& c,
                  std::ostream& err) {
  const ScanResult s = scan_alpha(from, to, step, cycle_options(c), threads);
  Artifact a = start("scan", Format::csv);
  a.header = {"alpha", "found", "x_star", "multiplier"};
  Json rows = Json::array();
  for (const ScanRow& r : s.rows) {
    a.rows.push_back({cell(r.alpha), cell(r.found), cell(r.x_star), cell(r.multiplier)});
    rows.push_back({{"alpha", jnum(r.alpha)},
                    {"found", r.found},
                    {"x_star", jnum(r.x_star)},
                    {"multiplier", jnum(r.multiplier)}});
  }
  a.json["rows"] = std::move(rows);
  a.json["alpha_bar"] = s.alpha_bar ? jnum(*s.alpha_bar) : Json(nullptr);
  err << "alpha_bar " << (s.alpha_bar ? format_number(*s.alpha_bar) : "absent") << '\n';
  return a;
}

Artifact cmd_portrait(double alpha_value, const std::string& chart, int grid, const RunConfig& c) {
  const Alpha alpha{alpha_value};
  const bool vz = chart == "vz";
  const bool four = alpha_value < kFourEquilibriaBound;
  if (vz) require_four_equilibria(alpha);

  Artifact a = start("portrait", Format::csv);
  a.header = {"series", "p", "q", "dp", "dq", "region"};
  Json field = Json::array();

  double p0 = -2.0, p1 = 2.0, q0 = -2.0, q1 = 2.0;
  if (vz) {
    const LevelRoots r = level_roots(alpha, 0.0);
    p0 = r.v1 - 0.5;
    p1 = r.v3 + 0.5;
    q0 = 0.0;
    q1 = 2.5;
  }
  const Field f{vz ? Chart::vz : Chart::xy, alpha};
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double p = p0 + (p1 - p0) * i / (grid - 1);
      const double q = q0 + (q1 - q0) * j / (grid - 1);
      const Vec2 d = f({p, q});
      const std::string region = vz ? std::string(to_string(classify_region(p, q, alpha, c.band))) : "";
      a.rows.push_back({"field", cell(p), cell(q), cell(d[0]), cell(d[1]), region});
      field.push_back({jnum(p), jnum(q), jnum(d[0]), jnum(d[1])});
    }
  }
  a.json["alpha"] = jnum(alpha_value);
  a.json["chart"] = chart;
  a.json["field"] = std::move(field);

  // K-curves v f + z^2 = 0 over (v1, v2) and (0, v3), mapped to (x, y) off z = 0.
  if (four) {
    const LevelRoots r = level_roots(alpha, 0.0);
    constexpr int kCurvePoints = 200;
    const std::pair<const char*, std::pair<double, double>> curves[] = {
        {"Kminus", {r.v1, r.v2}},
        {"Kplus", {0.0, r.v3}},
    };
    for (const auto& [name, range] : curves) {
      Json pts = Json::array();
      for (int k = 0; k <= kCurvePoints; ++k) {
        const double v = range.first + (range.second - range.first) * k / kCurvePoints;
        const double z = std::sqrt(std::max(0.0, -v * eval_f(v, alpha)));
        Vec2 pt{v, z};
        if (!vz) {
          if (!(z > 0.0)) continue;
          pt = {v / z, 1.0 / z};
        }
        const Vec2 d = f(pt);
        const std::string region = vz ? std::string(to_string(classify_region(v, z, alpha, c.band))) : "";
        a.rows.push_back({name, cell(pt[0]), cell(pt[1]), cell(d[0]), cell(d[1]), region});
        pts.push_back({jnum(pt[0]), jnum(pt[1])});
      }
      a.json[name] = std::move(pts);
    }
  }
  return a;
}

}  // namespace

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Separatrices, comparison bounds and limit cycles of x' = y, y' = -x^3 + a x^2 y + y^3"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--rtol", cfg.rtol, "relative tolerance")->envname("QHLC_RTOL")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--atol", cfg.atol, "absolute tolerance")->envname("QHLC_ATOL")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--z-seed", cfg.z_seed, "separatrix seed height")->envname("QHLC_Z_SEED")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--r-max", cfg.r_max, "escape radius")->envname("QHLC_R_MAX")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--band", cfg.band, "K-curve band")->envname("QHLC_BAND")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("-o,--output", cfg.output, "output file (default stdout)")->envname("QHLC_OUTPUT");
  const std::map<std::string, Format> formats{{"auto", Format::automatic}, {"csv", Format::csv}, {"json", Format::json}};
  app.add_option("--format", cfg.format, "csv, json or auto (per-command default)")
      ->envname("QHLC_FORMAT")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  double alpha = 0, mu = 0, lambda = 0, lo = 0, hi = 0, tol = 1e-3, x_lo = kDefaultSectionLo,
         x_hi = kDefaultSectionHi, from = 0, to = 0, step = 0;
  std::string which, chart = "vz";
  int grid = 21;
  unsigned threads = 0;
  std::function<Artifact()> run;

  auto* roots = app.add_subcommand("roots", "ascending roots of f(v, alpha) = mu");
  roots->add_option("--alpha", alpha)->required();
  roots->add_option("--mu", mu)->required();
  roots->callback([&] { run = [&] { return cmd_roots(alpha, mu); }; });

  auto* eq = app.add_subcommand("equilibria", "P0..P3 with their local data");
  eq->add_option("--alpha", alpha)->required();
  eq->callback([&] { run = [&] { return cmd_equilibria(alpha); }; });

  auto* sep = app.add_subcommand("separatrix", "trace L- or L+ (CSV columns tau, v, z)");
  sep->add_option("--alpha", alpha)->required();
  sep->add_option("--which", which)->required()->check(CLI::IsMember({"minus", "plus"}));
  sep->callback([&] { run = [&] { return cmd_separatrix(alpha, which, cfg, err); }; });

  auto* gp = app.add_subcommand("gap", "phi-(0) - phi+(0) and the configuration");
  gp->add_option("--alpha", alpha)->required();
  gp->callback([&] { run = [&] { return cmd_gap(alpha, cfg); }; });

  auto* as = app.add_subcommand("alpha-star", "bisect the gap for the heteroclinic parameter");
  as->add_option("--lo", lo)->required();
  as->add_option("--hi", hi)->required();
  as->add_option("--tol", tol)->capture_default_str();
  as->callback([&] { run = [&] { return cmd_alpha_star(lo, hi, tol, cfg); }; });

  auto* bd = app.add_subcommand("bounds", "closed-form bounds on phi-(0) and phi+(0)");
  bd->add_option("--alpha", alpha)->required();
  bd->add_option("--mu", mu)->required();
  bd->add_option("--lambda", lambda)->required();
  bd->callback([&] { run = [&] { return cmd_bounds(alpha, mu, lambda); }; });

  auto* lc = app.add_subcommand("limit-cycle", "fixed point of the return map on y = 0, x > 0");
  lc->add_option("--alpha", alpha)->required();
  lc->add_option("--x-lo", x_lo)->capture_default_str();
  lc->add_option("--x-hi", x_hi)->capture_default_str();
  lc->callback([&] { run = [&] { return cmd_limit_cycle(alpha, x_lo, x_hi, cfg); }; });

  auto* sc = app.add_subcommand("scan", "limit-cycle search over an alpha grid");
  sc->add_option("--from", from)->required();
  sc->add_option("--to", to)->required();
  sc->add_option("--step", step)->required();
  sc->add_option("--threads", threads, "0 = all cores")->capture_default_str();
  sc->callback([&] { run = [&] { return cmd_scan(from, to, step, threads, cfg, err); }; });

  auto* pt = app.add_subcommand("portrait", "field samples and the K-curves");
  pt->add_option("--alpha", alpha)->required();
  pt->add_option("--chart", chart)->check(CLI::IsMember({"xy", "vz"}))->capture_default_str();
  pt->add_option("--grid", grid)->check(CLI::Range(2, 2000))->capture_default_str();
  pt->callback([&] { run = [&] { return cmd_portrait(alpha, chart, grid, cfg); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Artifact artifact;
  try {
    artifact = run();
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  if (cfg.output.empty()) {
    write(artifact, cfg.format, out);
    return kExitOk;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!file) {
    err << "cannot open " << cfg.output << " for writing\n";
    return kExitUsage;
  }
  write(artifact, cfg.format, file);
  return file ? kExitOk : kExitUsage;
}

}  // namespace qhlc::cli
