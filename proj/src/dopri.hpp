#pragma once

// Dormand-Prince 5(4) single step, shared by the chart integrator and the
// graph-form integrator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace qhlc::detail {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct StepResult {
  State<N> y;    // fifth-order solution
  State<N> err;  // difference to the embedded fourth-order solution
  State<N> k7;   // field at y (first stage of the next step)
};

template <std::size_t N, class F>
StepResult<N> dopri_step(const F& f, double t, const State<N>& y, const State<N>& k1, double h) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  State<N> tmp;
  const auto stage = [&](auto... terms) {
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (... + (terms.first * (*terms.second)[i]));
    return tmp;
  };
  using P = std::pair<double, const State<N>*>;

  const State<N> k2 = f(t + h / 5.0, stage(P{a21, &k1}));
  const State<N> k3 = f(t + 3.0 * h / 10.0, stage(P{a31, &k1}, P{a32, &k2}));
  const State<N> k4 = f(t + 4.0 * h / 5.0, stage(P{a41, &k1}, P{a42, &k2}, P{a43, &k3}));
  const State<N> k5 = f(t + 8.0 * h / 9.0, stage(P{a51, &k1}, P{a52, &k2}, P{a53, &k3}, P{a54, &k4}));
  const State<N> k6 =
      f(t + h, stage(P{a61, &k1}, P{a62, &k2}, P{a63, &k3}, P{a64, &k4}, P{a65, &k5}));

  StepResult<N> r;
  r.y = stage(P{b1, &k1}, P{b3, &k3}, P{b4, &k4}, P{b5, &k5}, P{b6, &k6});
  r.k7 = f(t + h, r.y);
  for (std::size_t i = 0; i < N; ++i) {
    r.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * r.k7[i]);
  }
  return r;
}

/// Scaled max-norm of the local error estimate; NaN propagates as infinity.
template <std::size_t N>
double error_norm(const State<N>& y0, const StepResult<N>& r, double rtol, double atol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(r.y[i]));
    const double e = std::abs(r.err[i]) / sc;
    if (!std::isfinite(e) || !std::isfinite(r.y[i])) return INFINITY;
    worst = std::max(worst, e);
  }
  return worst;
}

/// Step-size factor from the usual fifth-order controller.
inline double step_factor(double err) {
  if (err == 0.0) return 5.0;
  return std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
}

}  // namespace qhlc::detail
