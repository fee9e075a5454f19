#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bec1r/observables.hpp"
#include "bec1r/ode.hpp"
#include "bec1r/scaling.hpp"
#include "bec1r/wave.hpp"

namespace bec1r {

/*
 * Numerically exact stationary states by outward shooting.
 *
 * The stationary scaled system for a real radial state psi with the
 * Coulomb-like pair potential W(r) = 2 int |psi|^2 / |r-r'| d^3r' reads
 *
 *   psi'' = -(2/r) psi' + (8 pi a psi^2 - W - eps) psi ,
 *   W''   = -(2/r) W'   - 8 pi psi^2 ,           W(inf) = 0 .
 *
 * Only the combination U = W + eps enters the psi equation, so with
 * psi(0) = 1 fixed the inner problem is a one-parameter search over
 * U(0): too small and psi diverges to +inf, too large and psi crosses
 * zero, and the nodeless bound profile sits on the sign change.  The
 * chemical potential falls out of the tail identity eps = U(r) - 2Q(r)/r
 * (Q = accumulated norm), since W(r) -> 2Q/r once psi has decayed.
 *
 * The raw solution has arbitrary norm; the nu-scaling of scaling.hpp maps it
 * to a unit-norm state at a_scaled = a_raw * ||psi_raw||^4.  An outer root
 * solve over a_raw hits the requested scattering length.  The map
 * a_raw -> a_scaled has a fold (its minimum is the numerically exact
 * tangent-bifurcation point, which lies above the variational -3 pi/8);
 * the ground branch lives on the near side of the fold, the excited branch
 * on the far side.
 */

struct ShootingOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double r_start = 1e-4;   ///< series-expansion start radius
  double r_limit = 150.0;  ///< absolute integration cap
  double blowup = 50.0;    ///< |psi| divergence threshold (psi(0) = 1)
  double u0_bisection_tol = 1e-15;
  double outer_tol_rel = 1e-10;
  /// |psi| level (relative to psi(0)) below which the profile is continued
  /// by integrating the linear far-field equation inward (the shooting
  /// trajectory itself is contaminated by the growing solution there).
  double tail_level = 1e-6;
};

enum class TailDiagnostic { crossed_zero, diverged_positive, bounded };

struct TrajectoryPoint {
  double r, psi, dpsi, U, dU;
};

struct ShotOutcome {
  TailDiagnostic tail = TailDiagnostic::bounded;
  double r_end = 0.0;           ///< radius reached (divergence or cap)
  double r_min_abs = 0.0;       ///< radius of minimal |psi| along the shot
  double min_abs = 0.0;
  std::vector<TrajectoryPoint> trajectory;
};

namespace detail {

/// y = [psi, psi', U, U', Q] with U = W + eps and Q(r) = 4 pi int psi^2 s^2 ds.
inline void raw_rhs(double a, double r, const std::array<double, 5>& y,
                    std::array<double, 5>& dy) {
  const double psi = y[0], dpsi = y[1], U = y[2], dU = y[3];
  const double pi = std::numbers::pi;
  dy[0] = dpsi;
  dy[1] = -(2.0 / r) * dpsi + (8.0 * pi * a * psi * psi - U) * psi;
  dy[2] = dU;
  dy[3] = -(2.0 / r) * dU - 8.0 * pi * psi * psi;
  dy[4] = 4.0 * pi * psi * psi * r * r;
}

/// Regular series start at r0: psi = psi0 (1 + c r^2), U = U0 + d r^2.
inline std::array<double, 5> series_start(double psi0, double U0, double a, double r0) {
  const double pi = std::numbers::pi;
  const double c = (8.0 * pi * a * psi0 * psi0 - U0) / 6.0;
  const double d = -(4.0 * pi / 3.0) * psi0 * psi0;
  const double q = 4.0 * pi * psi0 * psi0 * r0 * r0 * r0 / 3.0;
  return {psi0 * (1.0 + c * r0 * r0), 2.0 * psi0 * c * r0, U0 + d * r0 * r0,
          2.0 * d * r0, q};
}

}  // namespace detail

/// Single outward shot of the coupled stationary system with psi(0) = psi0,
/// U(0) = U0 + eps (regular start, vanishing derivatives).  The returned
/// diagnostic tells on which side of a bound profile the parameters lie.
inline ShotOutcome shoot_once(double psi0, double U0, double eps, double a,
                              double r_max, const ShootingOptions& opt = {},
                              bool record_trajectory = true) {
  if (!(psi0 > 0.0)) throw std::invalid_argument("shoot_once: psi0 must be positive");
  ShotOutcome out;
  auto y = detail::series_start(psi0, U0 + eps, a, opt.r_start);
  out.min_abs = std::abs(y[0]);
  out.r_min_abs = opt.r_start;
  if (record_trajectory)
    out.trajectory.push_back({opt.r_start, y[0], y[1], y[2] - eps, y[3]});

  OdeOptions oopt;
  oopt.rtol = opt.rtol;
  oopt.atol = opt.atol;
  oopt.h_initial = opt.r_start;

  const double bound = opt.blowup * psi0;
  auto rhs = [a](double r, const std::array<double, 5>& y, std::array<double, 5>& dy) {
    detail::raw_rhs(a, r, y, dy);
  };
  auto observer = [&](double r, const std::array<double, 5>& y) {
    if (record_trajectory)
      out.trajectory.push_back({r, y[0], y[1], y[2] - eps, y[3]});
    if (std::abs(y[0]) < out.min_abs) {
      out.min_abs = std::abs(y[0]);
      out.r_min_abs = r;
    }
    if (y[0] <= 0.0) {
      out.tail = TailDiagnostic::crossed_zero;
      return false;
    }
    if (y[0] > bound || !std::isfinite(y[0])) {
      out.tail = TailDiagnostic::diverged_positive;
      return false;
    }
    return true;
  };
  auto res = integrate_adaptive<5>(rhs, y, opt.r_start, std::min(r_max, opt.r_limit),
                                   oopt, observer);
  out.r_end = res.t;
  if (res.outcome == OdeOutcome::reached_end) out.tail = TailDiagnostic::bounded;
  if (res.outcome == OdeOutcome::step_underflow)
    throw std::runtime_error("shoot_once: integrator step underflow at r = " +
                             std::to_string(res.t));
  return out;
}

enum class StationaryStatus { ok, below_bifurcation, no_convergence };

/// Unscaled shooting solution with psi(0) = 1.
struct RawStationary {
  double a_raw;
  double U0;       ///< absorbed potential value U(0) = W(0) + eps
  double eps;      ///< raw chemical potential from the tail identity
  double norm2;    ///< ||psi_raw||^2
  double nu;       ///< 1/norm2
  double r_cut;    ///< last clean radius of the profile
  double min_abs;  ///< contamination floor: min |psi| reached by the shot
};

struct StationaryState {
  RadialWaveFunction psi;  ///< unit norm, real-valued, on the requested grid
  std::vector<double> U;   ///< rescaled pair potential W (positive, -V_u)
  double eps;
  double a;
  Branch branch;
  double residual;  ///< grid-norm residual of the stationary equation
  RawStationary raw;
};

struct StationaryResult {
  StationaryStatus status = StationaryStatus::no_convergence;
  std::optional<StationaryState> state;
  std::string message;
};

namespace detail {

struct RawShotClass {
  TailDiagnostic tail;
  double r_turn;
  double min_abs;
};

inline RawShotClass classify_shot(double a_raw, double U0, const ShootingOptions& opt) {
  const auto shot = shoot_once(1.0, U0, 0.0, a_raw, opt.r_limit, opt, false);
  // A shot that stays bounded out to the cap is numerically indistinguishable
  // from the bound profile; treat it as the over-bound side so the bisection
  // interval keeps shrinking.
  TailDiagnostic tail = shot.tail == TailDiagnostic::bounded
                            ? TailDiagnostic::crossed_zero
                            : shot.tail;
  return {tail, shot.r_min_abs, shot.min_abs};
}

/// Bisection for the nodeless U0 root at fixed a_raw.
inline std::optional<double> solve_u0(double a_raw, const ShootingOptions& opt) {
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 60 && classify_shot(a_raw, lo, opt).tail != TailDiagnostic::diverged_positive; ++i)
    lo = 2.0 * lo - 10.0;
  for (int i = 0; i < 60 && classify_shot(a_raw, hi, opt).tail != TailDiagnostic::crossed_zero; ++i)
    hi = 2.0 * hi + 10.0;
  if (lo < -1e6 || hi > 1e6) return std::nullopt;
  while (hi - lo > opt.u0_bisection_tol * std::max({1.0, std::abs(lo), std::abs(hi)})) {
    const double mid = 0.5 * (lo + hi);
    if (classify_shot(a_raw, mid, opt).tail == TailDiagnostic::crossed_zero)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

inline RawStationary measure_raw(double a_raw, double U0, const ShootingOptions& opt) {
  const auto shot = shoot_once(1.0, U0, 0.0, a_raw, opt.r_limit, opt, false);
  const double r_cut = shot.r_min_abs;
  // Re-integrate cleanly to r_cut to read U and the accumulated norm there.
  auto y = series_start(1.0, U0, a_raw, opt.r_start);
  OdeOptions oopt;
  oopt.rtol = opt.rtol;
  oopt.atol = opt.atol;
  oopt.h_initial = opt.r_start;
  auto rhs = [a_raw](double r, const std::array<double, 5>& y, std::array<double, 5>& dy) {
    raw_rhs(a_raw, r, y, dy);
  };
  auto res = integrate_adaptive<5>(rhs, y, opt.r_start, r_cut, oopt);
  const double U_cut = res.y[2], q_cut = res.y[4];
  const double eps = U_cut - 2.0 * q_cut / r_cut;
  return {a_raw, U0, eps, q_cut, 1.0 / q_cut, r_cut, shot.min_abs};
}

/// Scattering length the raw solution rescales to: a_raw * ||psi_raw||^4.
inline std::optional<RawStationary> raw_for(double a_raw, const ShootingOptions& opt) {
  const auto u0 = solve_u0(a_raw, opt);
  if (!u0) return std::nullopt;
  return measure_raw(a_raw, *u0, opt);
}

inline std::optional<double> scaled_a_of(double a_raw, const ShootingOptions& opt) {
  const auto raw = raw_for(a_raw, opt);
  if (!raw) return std::nullopt;
  return a_raw * raw->norm2 * raw->norm2;
}

struct Fold {
  double a_raw;
  double a_scaled;  ///< numerically exact bifurcation point
};

inline Fold locate_fold(const ShootingOptions& opt) {
  // Coarse scan, then golden-section refinement of the minimum.
  constexpr int coarse = 25;
  const double lo = -3.2, hi = -0.08;
  std::array<double, coarse> xs{}, gs{};
  int imin = 0;
  for (int i = 0; i < coarse; ++i) {
    xs[i] = lo + (hi - lo) * i / (coarse - 1.0);
    const auto g = scaled_a_of(xs[i], opt);
    gs[i] = g ? *g : 1e9;
    if (gs[i] < gs[imin]) imin = i;
  }
  double a = xs[std::max(0, imin - 1)], b = xs[std::min(coarse - 1, imin + 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = scaled_a_of(x1, opt).value_or(1e9);
  double f2 = scaled_a_of(x2, opt).value_or(1e9);
  while (b - a > 1e-9) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = scaled_a_of(x1, opt).value_or(1e9);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = scaled_a_of(x2, opt).value_or(1e9);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, scaled_a_of(xm, opt).value_or(1e9)};
}

inline const Fold& fold(const ShootingOptions& opt) {
  static const Fold f = locate_fold(opt);
  return f;
}

/// Brent root solve of scaled_a_of(x) - a_target on [lo, hi].
inline std::optional<double> brent_on_a(double lo, double hi, double a_target,
                                        const ShootingOptions& opt) {
  auto f = [&](double x) { return scaled_a_of(x, opt).value_or(1e9) - a_target; };
  double fa = f(lo), fb = f(hi);
  if (fa * fb > 0.0) return std::nullopt;
  double a = lo, b = hi, c = a, fc = fa;
  bool mflag = true;
  double d = 0.0;
  for (int it = 0; it < 120; ++it) {
    if (std::abs(fb) < opt.outer_tol_rel * std::abs(a_target) ||
        std::abs(b - a) < 1e-14 * std::max(1.0, std::abs(b)))
      return b;
    double s;
    if (fa != fc && fb != fc) {
      s = a * fb * fc / ((fa - fb) * (fa - fc)) +
          b * fa * fc / ((fb - fa) * (fb - fc)) +
          c * fa * fb / ((fc - fa) * (fc - fb));
    } else {
      s = b - fb * (b - a) / (fb - fa);
    }
    const double m = 0.5 * (a + b);
    const bool cond = (s < std::min(m, b) || s > std::max(m, b)) ||
                      (mflag && std::abs(s - b) >= 0.5 * std::abs(b - c)) ||
                      (!mflag && std::abs(s - b) >= 0.5 * std::abs(c - d));
    if (cond) {
      s = m;
      mflag = true;
    } else {
      mflag = false;
    }
    const double fs = f(s);
    d = c;
    c = b;
    fc = fb;
    if (fa * fs < 0.0) {
      b = s;
      fb = fs;
    } else {
      a = s;
      fa = fs;
    }
    if (std::abs(fa) < std::abs(fb)) {
      std::swap(a, b);
      std::swap(fa, fb);
    }
  }
  return b;
}

}  // namespace detail

/// Resamples the converged raw profile onto the target grid as the unit-norm
/// rescaled state: psi(r_k) = nu^2 psi_raw(nu r_k).  The raw abscissae are
/// reached by exact-endpoint adaptive integration; once |psi| falls below the
/// tail level the profile is continued with its local exponential tail (the
/// shooting trajectory itself eventually diverges).
inline std::pair<std::vector<double>, std::vector<double>> resample_raw(
    const RawStationary& raw, const RadialGrid& grid, const ShootingOptions& opt) {
  const std::size_t n = grid.n();
  std::vector<double> psi(n, 0.0), W(n, 0.0);
  auto y = detail::series_start(1.0, raw.U0, raw.a_raw, opt.r_start);
  OdeOptions oopt;
  oopt.rtol = opt.rtol;
  oopt.atol = opt.atol;
  oopt.h_initial = opt.r_start;
  auto rhs = [&raw](double r, const std::array<double, 5>& y, std::array<double, 5>& dy) {
    detail::raw_rhs(raw.a_raw, r, y, dy);
  };

  double r_now = opt.r_start;
  // Junction level: well above the contamination floor of the shot.
  const double switch_level = std::max(opt.tail_level, 300.0 * raw.min_abs);
  const double nu2 = raw.nu * raw.nu;
  std::size_t k_tail = n;  // first index served by the tail integration
  double x_s = 0.0, psi_s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = raw.nu * grid.r(k);
    if (x <= r_now) {
      // Target abscissa below the series start: use the series directly.
      const auto ys = detail::series_start(1.0, raw.U0, raw.a_raw, x);
      psi[k] = nu2 * ys[0];
      W[k] = nu2 * (ys[2] - raw.eps);
      continue;
    }
    if (x >= raw.r_cut) {
      k_tail = k;
      break;
    }
    auto res = integrate_adaptive<5>(rhs, y, r_now, x, oopt);
    y = res.y;
    r_now = x;
    if (std::abs(y[0]) < switch_level) {
      k_tail = k;
      break;
    }
    psi[k] = nu2 * y[0];
    W[k] = nu2 * (y[2] - raw.eps);
  }
  x_s = r_now;
  psi_s = y[0];

  if (k_tail < n) {
    // Continue with the decaying solution of the linear far-field problem
    //   v'' = (-eps - W(r)) v,  W(r) = 2 ||psi||^2 / r,
    // integrated inward (the stable direction for a decaying profile) from
    // beyond the outermost abscissa and matched in amplitude at the junction.
    const double q2 = raw.norm2;
    const double eps = raw.eps;
    const double x_far = raw.nu * grid.r(n - 1) +
                         8.0 / std::sqrt(std::max(-eps, 1e-6));
    auto tail_rhs = [q2, eps](double s, const std::array<double, 2>& v,
                              std::array<double, 2>& dv) {
      const double r = -s;
      dv[0] = v[1];
      dv[1] = (-eps - 2.0 * q2 / r) * v[0];
    };
    std::array<double, 2> v{1.0, std::sqrt(std::max(-eps, 1e-12))};
    OdeOptions topt;
    topt.rtol = opt.rtol;
    topt.atol = 0.0;
    topt.h_initial = 1e-3;
    std::vector<double> vals(n - k_tail + 1, 0.0);
    double s_now = -x_far;
    for (std::size_t idx = n; idx-- > k_tail;) {
      const double s_target = -(raw.nu * grid.r(idx));
      auto res = integrate_adaptive<2>(tail_rhs, v, s_now, s_target, topt);
      v = res.y;
      s_now = s_target;
      vals[idx - k_tail] = v[0];
    }
    // Land on the junction for the amplitude match (u-form: u = r psi).
    if (-x_s > s_now + 1e-14 * std::abs(x_s)) {
      auto res = integrate_adaptive<2>(tail_rhs, v, s_now, -x_s, topt);
      v = res.y;
    }
    const double scale = (x_s * psi_s) / v[0];
    for (std::size_t k = k_tail; k < n; ++k) {
      const double x = raw.nu * grid.r(k);
      psi[k] = nu2 * scale * vals[k - k_tail] / x;
      W[k] = nu2 * 2.0 * q2 / x;
    }
  }
  return {std::move(psi), std::move(W)};
}

/// Grid-norm residual of the stationary equation for a real state, using the
/// spectral Laplacian and the spectral 1/r potential of the target grid.
inline double stationary_residual(const RadialWaveFunction& psi, double a, double eps) {
  const RadialGrid& g = psi.grid;
  const std::size_t n = g.n();
  SineTransform dst(g);
  std::vector<std::complex<double>> u(n), uhat(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = g.r(k) * psi.values[k];
  dst.forward(u, uhat);
  for (std::size_t j = 0; j < n; ++j) uhat[j] *= g.p(j) * g.p(j);
  dst.backward(uhat, u);  // now u = r * (-Laplacian psi)
  const auto vu = monopolar_potential(psi, dst);
  double acc = 0.0;
  const double pre = 8.0 * std::numbers::pi * a;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = g.r(k);
    const std::complex<double> res =
        u[k] / r + (pre * std::norm(psi.values[k]) + vu[k] - eps) * psi.values[k];
    acc += std::norm(res) * r * r;
  }
  return std::sqrt(4.0 * std::numbers::pi * acc * g.dr());
}

inline StationaryResult solve_stationary(double a_target, Branch branch,
                                         const RadialGrid& grid,
                                         const ShootingOptions& opt = {}) {
  if (!(a_target < 0.0))
    throw std::invalid_argument("solve_stationary: scattering length must be negative");
  if (!is_above_bifurcation(a_target))
    return {StationaryStatus::below_bifurcation, std::nullopt,
            "no stationary solutions below the tangent bifurcation"};

  const auto& fold = detail::fold(opt);
  if (a_target <= fold.a_scaled)
    return {StationaryStatus::no_convergence, std::nullopt,
            "target below the numerically exact bifurcation at a = " +
                std::to_string(fold.a_scaled)};

  std::optional<double> root;
  if (branch == Branch::ground) {
    root = detail::brent_on_a(fold.a_raw, -1e-4, a_target, opt);
  } else {
    double lo = fold.a_raw * 1.5;
    for (int i = 0; i < 40; ++i) {
      const auto g = detail::scaled_a_of(lo, opt);
      if (g && *g > a_target) break;
      lo *= 1.6;
      if (lo < -60.0) break;
    }
    if (lo >= -60.0) root = detail::brent_on_a(lo, fold.a_raw, a_target, opt);
  }
  if (!root)
    return {StationaryStatus::no_convergence, std::nullopt,
            "outer root bracketing failed"};

  const auto raw = detail::raw_for(*root, opt);
  if (!raw)
    return {StationaryStatus::no_convergence, std::nullopt, "inner shot lost the root"};

  auto [psi_s, W_s] = resample_raw(*raw, grid, opt);
  RadialWaveFunction psi(grid);
  for (std::size_t k = 0; k < grid.n(); ++k) psi.values[k] = psi_s[k];
  const double eps = raw->eps * raw->nu * raw->nu;
  const double res = stationary_residual(psi, a_target, eps);

  StationaryState state{std::move(psi), std::move(W_s), eps,
                        a_target,       branch,         res,
                        *raw};
  return {StationaryStatus::ok, std::move(state), ""};
}

/// One point of the raw-parameter sweep behind the bifurcation diagram:
/// chemical potential and scattering length of the rescaled solution.
struct BranchPoint {
  double a;
  double eps;
  double a_raw;
};

/// Sweeps the raw scattering length; the resulting (a, eps) points trace both
/// branches through the numeric fold in one smooth pass.
inline std::vector<BranchPoint> sweep_branches(double a_raw_lo, double a_raw_hi,
                                               std::size_t count,
                                               const ShootingOptions& opt = {}) {
  std::vector<BranchPoint> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double x = a_raw_lo * std::exp(std::log(a_raw_hi / a_raw_lo) *
                                         static_cast<double>(i) /
                                         static_cast<double>(count - 1));
    const auto raw = detail::raw_for(x, opt);
    if (!raw) continue;
    out.push_back({x * raw->norm2 * raw->norm2, raw->eps * raw->nu * raw->nu, x});
  }
  return out;
}

}  // namespace bec1r
