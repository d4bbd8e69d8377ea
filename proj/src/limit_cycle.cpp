#include "qhlc/limit_cycle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace qhlc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Trajectory run_to_axis(double x0, Alpha alpha, Crossing crossing, const ReturnMapOptions& opt) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw DomainError("return map needs a finite x0 > 0");
  const EventSpec events[] = {
      EventSpec::coordinate("section", 1, 0.0, crossing),
      EventSpec::escape(opt.escape_radius),
  };
  IntegrateOptions io;
  io.rtol = opt.rtol;
  io.atol = opt.atol;
  io.max_steps = opt.max_steps;
  io.sample_spacing = kInf;
  return integrate({Chart::xy, alpha}, {x0, 0.0}, Direction::forward, events, io);
}

// P(x) - x, +inf for escapes.
double displacement(double x, Alpha alpha, const ReturnMapOptions& opt) {
  return return_map(x, alpha, opt) - x;
}

}  // namespace

ReturnResult return_to_section(double x0, Alpha alpha, const ReturnMapOptions& options) {
  // Starting on y = 0 with y' < 0, the first falling crossing is a full turn later.
  const Trajectory t = run_to_axis(x0, alpha, Crossing::falling, options);
  if (t.termination != Termination::event_hit) return {kInf, kInf};
  return {t.last().state[0], t.last().t};
}

double return_map(double x0, Alpha alpha, const ReturnMapOptions& options) {
  return return_to_section(x0, alpha, options).x;
}

double half_return_map(double x0, Alpha alpha, const ReturnMapOptions& options) {
  const Trajectory t = run_to_axis(x0, alpha, Crossing::rising, options);
  if (t.termination != Termination::event_hit) return -kInf;
  return t.last().state[0];
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::UnstableHyperbolic: return "UnstableHyperbolic";
    case Verdict::StableHyperbolic: return "StableHyperbolic";
    case Verdict::NonHyperbolic: return "NonHyperbolic";
    case Verdict::None: return "None";
  }
  return "?";
}

std::string_view to_string(OriginBehaviour b) {
  return b == OriginBehaviour::StableFocusLike ? "StableFocusLike" : "UnstableFocusLike";
}

LimitCycleResult find_limit_cycle(Alpha alpha, double x_lo, double x_hi,
                                  const LimitCycleOptions& opt) {
  if (!(x_lo > 0.0) || !(x_lo < x_hi) || !std::isfinite(x_hi)) {
    throw DomainError("find_limit_cycle needs 0 < x_lo < x_hi");
  }
  if (opt.grid_points < 2) throw DomainError("find_limit_cycle needs at least 2 grid points");

  const std::size_t n = opt.grid_points;
  std::vector<double> xs(n), fs(n);
  const double ratio = std::pow(x_hi / x_lo, 1.0 / static_cast<double>(n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? x_hi : x_lo * std::pow(ratio, static_cast<double>(i));
    fs[i] = displacement(xs[i], alpha, opt.map);
  }

  std::vector<double> fixed_points;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((fs[i] < 0.0) == (fs[i + 1] < 0.0)) continue;
    double lo = xs[i], hi = xs[i + 1];
    double flo = fs[i], fhi = fs[i + 1];
    const bool lo_negative = flo < 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = displacement(mid, alpha, opt.map);
      if ((fm < 0.0) == lo_negative) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
        fhi = fm;
      }
    }
    // A finite-time escape makes P jump to +inf; such brackets close on the
    // boundary of the escaping set, not on a fixed point.
    const bool use_lo = std::isfinite(flo) && (!std::isfinite(fhi) || std::abs(flo) <= std::abs(fhi));
    const double x = use_lo ? lo : hi;
    const double f = use_lo ? flo : fhi;
    if (std::isfinite(f) && std::abs(f) <= opt.fixed_point_tolerance * x) fixed_points.push_back(x);
  }

  LimitCycleResult r{alpha};
  if (fixed_points.empty()) return r;
  if (fixed_points.size() > 1) {
    std::string list;
    for (double x : fixed_points) list += (list.empty() ? "" : ", ") + std::to_string(x);
    throw AmbiguousBracket("return map has " + std::to_string(fixed_points.size()) +
                               " fixed points at alpha = " + std::to_string(alpha.value()) + ": " +
                               list,
                           fixed_points);
  }

  r.found = true;
  r.x_star = fixed_points.front();
  r.period = return_to_section(r.x_star, alpha, opt.map).period;
  // Close to the heteroclinic parameter the orbits just outside the cycle
  // escape within one turn; shrink the step until both neighbours return.
  // If none does, the outer side is repelled to infinity: multiplier +inf.
  r.multiplier = kInf;
  for (double h = opt.multiplier_step * r.x_star; h >= 1e-10 * r.x_star; h *= 0.1) {
    const double up = return_map(r.x_star + h, alpha, opt.map);
    if (!std::isfinite(up)) continue;
    r.multiplier = (up - return_map(r.x_star - h, alpha, opt.map)) / (2.0 * h);
    break;
  }
  if (r.multiplier > 1.0 + opt.multiplier_margin) {
    r.verdict = Verdict::UnstableHyperbolic;
  } else if (r.multiplier < 1.0 - opt.multiplier_margin) {
    r.verdict = Verdict::StableHyperbolic;
  } else {
    r.verdict = Verdict::NonHyperbolic;
  }
  return r;
}

ScanResult scan_alpha(double from, double to, double step, const LimitCycleOptions& options,
                      unsigned threads) {
  if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
    throw DomainError("scan needs finite from < to");
  }
  if (!(step > 0.0)) throw DomainError("scan needs step > 0");
  const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;

  ScanResult out;
  out.rows.resize(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        const double a = from + static_cast<double>(k) * step;
        const LimitCycleResult r = find_limit_cycle(Alpha{a}, kDefaultSectionLo, kDefaultSectionHi, options);
        out.rows[k] = {a, r.found, r.found ? r.x_star : NAN, r.found ? r.multiplier : NAN};
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  for (std::size_t k = 1; k < count; ++k) {
    if (out.rows[k].found && !out.rows[k - 1].found) {
      out.alpha_bar = 0.5 * (out.rows[k - 1].alpha + out.rows[k].alpha);
      break;
    }
  }
  return out;
}

OriginBehaviour classify_origin(Alpha alpha, double probe_amplitude, const ReturnMapOptions& options) {
  if (!(probe_amplitude > 0.0 && probe_amplitude <= 0.5)) {
    throw DomainError("probe amplitude must lie in (0, 0.5]");
  }
  return return_map(probe_amplitude, alpha, options) < probe_amplitude
             ? OriginBehaviour::StableFocusLike
             : OriginBehaviour::UnstableFocusLike;
}

}  // namespace qhlc
