#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>

namespace bec1r {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_initial = 1e-4;
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

enum class OdeOutcome { reached_end, observer_stop, step_underflow };

template <std::size_t N>
struct OdeResult {
  OdeOutcome outcome;
  double t;
  std::array<double, N> y;
};

/// Adaptive embedded Dormand-Prince 5(4) pair with FSAL and standard
/// I-controller step selection.
///
/// rhs(t, y, dydt); observer(t, y) is called after every accepted step and
/// may return false to stop (the integrator then returns observer_stop with
/// the state at that step).  Integration is from t0 to t1 with t1 > t0.
template <std::size_t N, typename Rhs, typename Observer>
OdeResult<N> integrate_adaptive(Rhs&& rhs, std::array<double, N> y, double t0,
                                double t1, const OdeOptions& opt,
                                Observer&& observer) {
  using State = std::array<double, N>;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  if (!(t1 > t0)) throw std::invalid_argument("integrate_adaptive: need t1 > t0");
  double t = t0;
  double h = std::min({opt.h_initial, opt.h_max, t1 - t0});
  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew;
  rhs(t, y, k1);

  for (std::size_t step = 0; step < opt.max_steps; ++step) {
    if (t >= t1) return {OdeOutcome::reached_end, t, y};
    h = std::min(h, t1 - t);
    if (!(h > std::abs(t) * 1e-15 + 1e-300))
      return {OdeOutcome::step_underflow, t, y};

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    rhs(t + h, ynew, k7);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double q = ei / scale;
      err += q * q;
      if (!std::isfinite(ynew[i])) finite = false;
    }
    err = std::sqrt(err / static_cast<double>(N));

    if (finite && err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      if (!observer(t, y)) return {OdeOutcome::observer_stop, t, y};
      const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = std::min({h * std::clamp(grow, 0.2, 5.0), opt.h_max});
    } else {
      const double shrink =
          finite && err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
      h *= shrink;
    }
  }
  throw std::runtime_error("integrate_adaptive: step budget exhausted");
}

template <std::size_t N, typename Rhs>
OdeResult<N> integrate_adaptive(Rhs&& rhs, std::array<double, N> y, double t0,
                                double t1, const OdeOptions& opt = {}) {
  return integrate_adaptive<N>(std::forward<Rhs>(rhs), y, t0, t1, opt,
                               [](double, const std::array<double, N>&) { return true; });
}

}  // namespace bec1r
