#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bec1r/ode.hpp"
#include "bec1r/scaling.hpp"

namespace bec1r {

/// Complex Gaussian exp(i(A r^2 + gamma)) reduced to its free parameters.
/// gamma_i is not stored; it is slaved to A_i by the unit-norm condition
/// (see gamma_i_of in wave.hpp).
struct VariationalState {
  double A_r = 0.0;
  double A_i = 0.0;  ///< must stay positive (normalizability)
  double gamma_r = 0.0;
};

/// Canonical pair: q = sqrt(<r^2>) (rms radius), p its conjugate momentum.
struct CanonicalState {
  double q = 0.0;
  double p = 0.0;
};

namespace detail {
inline void require_normalizable(double A_i, const char* who) {
  if (!(A_i > 0.0)) throw std::invalid_argument(std::string(who) + ": A_i must be positive");
}
inline double sqrt_pi() { return std::sqrt(std::numbers::pi); }
/// s = sqrt(1 + 8a/(3 pi)), the bifurcation discriminant.
inline double discriminant(double a) { return std::sqrt(1.0 + 8.0 * a / (3.0 * std::numbers::pi)); }
}  // namespace detail

/// Time derivatives (A_r', A_i', gamma_r') of the Gaussian parameters.
inline std::array<double, 3> eom_rhs(const VariationalState& s, double a) {
  detail::require_normalizable(s.A_i, "eom_rhs");
  const double sp = detail::sqrt_pi();
  const double root = std::sqrt(s.A_i);
  const double dAr = -4.0 * (s.A_r * s.A_r - s.A_i * s.A_i) +
                     (8.0 / sp) * s.A_i * root * (a * s.A_i - 1.0 / 6.0);
  const double dAi = -8.0 * s.A_r * s.A_i;
  const double dgr = -6.0 * s.A_i + (root / sp) * (5.0 - 14.0 * a * s.A_i);
  return {dAr, dAi, dgr};
}

/// Both stationary widths and their chemical potentials.  The stable root is
/// the smaller A_i (wider condensate, elliptic); the unstable root the larger
/// A_i (hyperbolic).  Branch identity is fixed operationally by eps = -d/dt
/// gamma_r at each root, not by any +- sign convention.
struct FixedPointPair {
  double A_i_stable;
  double A_i_unstable;
  double eps_stable;
  double eps_unstable;
};

inline std::optional<FixedPointPair> fixed_points(double a) {
  const double disc2 = 1.0 + 8.0 * a / (3.0 * std::numbers::pi);
  if (disc2 < 0.0) return std::nullopt;
  const double s = std::sqrt(disc2);
  const double pre = 4.0 / (9.0 * std::numbers::pi);
  // A_i roots in the compact form A_i = 4 / (9 pi (1 -+ s)^2); the smaller
  // root pairs with the ground-state chemical potential (plus sign below).
  const double Ai_st = pre / ((1.0 + s) * (1.0 + s));
  const double Ai_un = pre / ((1.0 - s) * (1.0 - s));
  const double eps_st = -pre * (5.0 + 4.0 * s) / ((1.0 + s) * (1.0 + s));
  const double eps_un = -pre * (5.0 - 4.0 * s) / ((1.0 - s) * (1.0 - s));
  if (!std::isfinite(Ai_un) || !std::isfinite(eps_un)) return std::nullopt;
  return FixedPointPair{Ai_st, Ai_un, eps_st, eps_un};
}

/// Eigenvalue pair of the linearized flow at the selected fixed point:
/// purely imaginary for the ground (stable) branch, purely real for the
/// excited branch.
inline std::array<std::complex<double>, 2> analytic_eigenvalues(double a, Branch branch) {
  if (!is_above_bifurcation(a))
    throw std::domain_error("analytic_eigenvalues: no fixed points below the bifurcation");
  const double s = detail::discriminant(a);
  const double mag = (16.0 / (9.0 * std::numbers::pi)) * std::sqrt(s);
  if (branch == Branch::ground) {
    const double lam = mag / ((1.0 + s) * (1.0 + s));
    return {std::complex<double>(0.0, lam), std::complex<double>(0.0, -lam)};
  }
  const double lam = mag / ((1.0 - s) * (1.0 - s));
  return {std::complex<double>(lam, 0.0), std::complex<double>(-lam, 0.0)};
}

/// 2x2 matrix of the flow linearized in (delta A_r, delta A_i); the diagonal
/// vanishes identically.
struct Mat2 {
  double a11, a12, a21, a22;
};

inline Mat2 jacobian(double a, Branch branch) {
  if (!is_above_bifurcation(a))
    throw std::domain_error("jacobian: no fixed points below the bifurcation");
  const double s = detail::discriminant(a);
  const double pm = branch == Branch::ground ? 1.0 : -1.0;
  const double den = (s + pm) * (s + pm);
  const double a12 = pm * (8.0 / (9.0 * std::numbers::pi)) * s / den;
  const double a21 = -(32.0 / (9.0 * std::numbers::pi)) / den;
  return {0.0, a12, a21, 0.0};
}

inline std::array<std::complex<double>, 2> eigenvalues(const Mat2& m) {
  const std::complex<double> tr(m.a11 + m.a22, 0.0);
  const std::complex<double> det(m.a11 * m.a22 - m.a12 * m.a21, 0.0);
  const std::complex<double> d = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + d), 0.5 * (tr - d)};
}

/// Conserved mean-field energy of the Gaussian family.
inline double mean_field_energy(const VariationalState& s, double a) {
  detail::require_normalizable(s.A_i, "mean_field_energy");
  return 3.0 * (s.A_i * s.A_i + s.A_r * s.A_r) / s.A_i +
         2.0 * std::sqrt(s.A_i) * (2.0 * a * s.A_i - 1.0) / detail::sqrt_pi();
}

inline CanonicalState to_canonical(const VariationalState& s) {
  detail::require_normalizable(s.A_i, "to_canonical");
  const double root = std::sqrt(3.0 / s.A_i);
  return {0.5 * root, s.A_r * root};
}

inline VariationalState from_canonical(const CanonicalState& c, double gamma_r = 0.0) {
  if (!(c.q > 0.0)) throw std::invalid_argument("from_canonical: q must be positive");
  return {c.p / (2.0 * c.q), 3.0 / (4.0 * c.q * c.q), gamma_r};
}

/// "Potential" part of E = p^2 + V(q).
inline double potential_V(double q, double a) {
  if (!(q > 0.0)) throw std::invalid_argument("potential_V: q must be positive");
  const double sp = detail::sqrt_pi();
  const double s3 = std::sqrt(3.0);
  return 9.0 / (4.0 * q * q) + 3.0 * s3 * a / (2.0 * sp * q * q * q) - s3 / (sp * q);
}

inline double hamiltonian(const CanonicalState& c, double a) {
  return c.p * c.p + potential_V(c.q, a);
}

/// Hamilton's equations in (q, p); algebraically equivalent to eom_rhs under
/// the canonical map.
inline std::array<double, 2> canonical_rhs(const CanonicalState& c, double a) {
  if (!(c.q > 0.0)) throw std::invalid_argument("canonical_rhs: q must be positive");
  const double s3pi = std::sqrt(3.0 / std::numbers::pi);
  const double q2 = c.q * c.q;
  const double dq = 2.0 * c.p;
  const double dp = 9.0 / (2.0 * q2 * c.q) + s3pi * 9.0 * a / (2.0 * q2 * q2) - s3pi / q2;
  return {dq, dp};
}

// ---------------------------------------------------------------------------
// Orbit integration

enum class OrbitTermination { completed, collapse };

struct OrbitSample {
  double t;
  double A_r, A_i, gamma_r;
  double width;
  double energy;
};

struct OrbitSeries {
  std::vector<OrbitSample> samples;
  OrbitTermination termination = OrbitTermination::completed;
  /// Extrapolated time of zero width; set for collapse terminations.
  std::optional<double> t_collapse;
};

struct OrbitOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// A_i beyond this value counts as collapsed; the remaining time to the
  /// singularity is extrapolated from the terminal power law.
  double A_divergence = 1e6;
};

namespace detail {
/// Remaining time from width q to the q = 0 singularity in the terminal
/// regime where the attractive q^-3 term dominates: dt = q^{5/2} / (5 sqrt(c)).
inline double terminal_time(double A_i, double a) {
  const double q = 0.5 * std::sqrt(3.0 / A_i);
  const double c = 3.0 * std::sqrt(3.0) * std::abs(a) / (2.0 * sqrt_pi());
  return std::pow(q, 2.5) / (5.0 * std::sqrt(c));
}
}  // namespace detail

inline OrbitSeries integrate_orbit(const VariationalState& s0, double a,
                                   double t_end, const OrbitOptions& opt = {}) {
  detail::require_normalizable(s0.A_i, "integrate_orbit");
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_orbit: t_end must be positive");

  auto rhs = [a](double, const std::array<double, 3>& y, std::array<double, 3>& dy) {
    const auto d = eom_rhs({y[0], y[1], y[2]}, a);
    dy = {d[0], d[1], d[2]};
  };
  auto record = [a](OrbitSeries& out, double t, const std::array<double, 3>& y) {
    out.samples.push_back({t, y[0], y[1], y[2], std::sqrt(3.0 / (4.0 * y[1])),
                           mean_field_energy({y[0], y[1], y[2]}, a)});
  };

  OdeOptions oopt;
  oopt.rtol = opt.rtol;
  oopt.atol = opt.atol;
  oopt.h_initial = 1e-6;

  OrbitSeries out;
  std::array<double, 3> y0{s0.A_r, s0.A_i, s0.gamma_r};
  record(out, 0.0, y0);

  double t_prev = 0.0;
  std::array<double, 3> y_prev = y0;
  auto observer = [&](double t, const std::array<double, 3>& y) {
    if (y[1] >= opt.A_divergence) return false;
    record(out, t, y);
    t_prev = t;
    y_prev = y;
    return true;
  };

  auto res = integrate_adaptive<3>(rhs, y0, 0.0, t_end, oopt, observer);
  if (res.outcome == OdeOutcome::reached_end) {
    out.termination = OrbitTermination::completed;
    return out;
  }
  if (res.outcome == OdeOutcome::step_underflow && res.y[1] < 1e3)
    throw std::runtime_error("integrate_orbit: step size underflow away from collapse");

  // Bracket the threshold crossing inside [t_prev, res.t] by bisection on
  // the re-integration horizon, then extrapolate the terminal power law.
  double lo = t_prev, hi = res.t;
  std::array<double, 3> y_hi = res.y;
  for (int it = 0; it < 60 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    auto probe = integrate_adaptive<3>(rhs, y_prev, t_prev, mid, oopt);
    if (probe.outcome != OdeOutcome::reached_end || probe.y[1] >= opt.A_divergence) {
      hi = mid;
      if (probe.outcome == OdeOutcome::reached_end) y_hi = probe.y;
    } else {
      lo = mid;
    }
  }
  record(out, hi, y_hi);
  out.termination = OrbitTermination::collapse;
  out.t_collapse = hi + detail::terminal_time(std::max(y_hi[1], opt.A_divergence), a);
  return out;
}

struct CollapseReport {
  enum class Kind { none, collapsed, inconclusive } kind;
  std::optional<double> time;
};

/// Extrapolated collapse time, or none for orbits that stay bounded.  An
/// integration that reaches t_end while A_i is still growing (threshold not
/// yet crossed) is reported as inconclusive.
inline CollapseReport collapse_time(const VariationalState& s0, double a,
                                    double t_end = 1e4, const OrbitOptions& opt = {}) {
  const auto orbit = integrate_orbit(s0, a, t_end, opt);
  if (orbit.termination == OrbitTermination::collapse)
    return {CollapseReport::Kind::collapsed, orbit.t_collapse};
  const auto& last = orbit.samples.back();
  const auto d = eom_rhs({last.A_r, last.A_i, last.gamma_r}, a);
  if (d[1] > 0.0 && last.A_i > 10.0 * s0.A_i)
    return {CollapseReport::Kind::inconclusive, std::nullopt};
  return {CollapseReport::Kind::none, std::nullopt};
}

// ---------------------------------------------------------------------------
// Phase portraits

struct PortraitCurve {
  double energy;
  std::vector<std::array<double, 2>> points;  ///< (A_r, A_i) or (q, p)
};

struct Portrait {
  std::vector<PortraitCurve> curves;
};

namespace detail {
/// A_r^2 on the iso-energy contour E(A_r, A_i) = level; negative where the
/// level set has no point at this A_i.
inline double contour_Ar2(double A_i, double level, double a) {
  const double rest = level - 3.0 * A_i -
                      2.0 * std::sqrt(A_i) * (2.0 * a * A_i - 1.0) / sqrt_pi();
  return A_i * rest / 3.0;
}

inline std::vector<double> default_levels(double a) {
  std::vector<double> levels;
  if (auto fp = fixed_points(a); fp && fp->A_i_unstable != fp->A_i_stable) {
    const double e_min = mean_field_energy({0.0, fp->A_i_stable, 0.0}, a);
    const double e_sad = mean_field_energy({0.0, fp->A_i_unstable, 0.0}, a);
    const double gap = e_sad - e_min;
    for (double f : {0.2, 0.45, 0.7, 0.9}) levels.push_back(e_min + f * gap);
    levels.push_back(e_sad);  // separatrix
    for (double f : {0.35, 1.0, 2.0}) levels.push_back(e_sad + f * gap);
  } else {
    for (double A_i : {0.05, 0.12, 0.25, 0.5, 1.0})
      levels.push_back(mean_field_energy({0.0, A_i, 0.0}, a));
  }
  return levels;
}
}  // namespace detail

/// Iso-energy contours of the mean-field energy in the (A_r, A_i) plane.
/// The energy is quadratic in A_r, so each contour is solved explicitly as
/// A_r = +-sqrt(.) over an A_i sweep; disconnected components become
/// separate curves.
inline Portrait phase_portrait(double a, std::span<const double> levels = {},
                               std::size_t samples_per_curve = 600,
                               double A_i_min = 1e-3, double A_i_max = 4.0) {
  std::vector<double> lv(levels.begin(), levels.end());
  if (lv.empty()) lv = detail::default_levels(a);

  Portrait out;
  const double lstep = std::log(A_i_max / A_i_min) / static_cast<double>(samples_per_curve - 1);
  for (double level : lv) {
    std::vector<std::array<double, 2>> upper;
    auto flush = [&]() {
      if (upper.size() < 2) {
        upper.clear();
        return;
      }
      PortraitCurve c{level, upper};
      for (auto it = upper.rbegin(); it != upper.rend(); ++it)
        c.points.push_back({-(*it)[0], (*it)[1]});
      out.curves.push_back(std::move(c));
      upper.clear();
    };
    for (std::size_t i = 0; i < samples_per_curve; ++i) {
      const double A_i = A_i_min * std::exp(lstep * static_cast<double>(i));
      const double ar2 = detail::contour_Ar2(A_i, level, a);
      if (ar2 >= 0.0)
        upper.push_back({std::sqrt(ar2), A_i});
      else
        flush();
    }
    flush();
  }
  return out;
}

/// Same contours in the canonical (q, p) plane: p = +-sqrt(level - V(q)).
inline Portrait canonical_portrait(double a, std::span<const double> levels = {},
                                   std::size_t samples_per_curve = 600,
                                   double q_min = 0.05, double q_max = 12.0) {
  std::vector<double> lv(levels.begin(), levels.end());
  if (lv.empty()) lv = detail::default_levels(a);

  Portrait out;
  const double step = (q_max - q_min) / static_cast<double>(samples_per_curve - 1);
  for (double level : lv) {
    std::vector<std::array<double, 2>> upper;
    auto flush = [&]() {
      if (upper.size() < 2) {
        upper.clear();
        return;
      }
      PortraitCurve c{level, upper};
      for (auto it = upper.rbegin(); it != upper.rend(); ++it)
        c.points.push_back({(*it)[0], -(*it)[1]});
      out.curves.push_back(std::move(c));
      upper.clear();
    };
    for (std::size_t i = 0; i < samples_per_curve; ++i) {
      const double q = q_min + step * static_cast<double>(i);
      const double p2 = level - potential_V(q, a);
      if (p2 >= 0.0)
        upper.push_back({q, std::sqrt(p2)});
      else
        flush();
    }
    flush();
  }
  return out;
}

/// Orbit-bundle cross-check of the contour portraits: trajectories projected
/// onto the (A_r, A_i) plane.
inline Portrait portrait_from_orbits(double a, std::span<const VariationalState> seeds,
                                     double t_end, const OrbitOptions& opt = {}) {
  Portrait out;
  for (const auto& s : seeds) {
    const auto orbit = integrate_orbit(s, a, t_end, opt);
    PortraitCurve c{mean_field_energy(s, a), {}};
    c.points.reserve(orbit.samples.size());
    for (const auto& row : orbit.samples) c.points.push_back({row.A_r, row.A_i});
    out.curves.push_back(std::move(c));
  }
  return out;
}

}  // namespace bec1r
