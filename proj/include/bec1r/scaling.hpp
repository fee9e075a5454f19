#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "bec1r/wave.hpp"

namespace bec1r {

/// The two nodeless stationary branches.  "ground" is the elliptic (stable)
/// wide state, "excited" the hyperbolic (unstable) narrow one.
enum class Branch { ground, excited };

inline const char* to_string(Branch b) {
  return b == Branch::ground ? "ground" : "excited";
}

/// Critical scaled scattering length of the tangent bifurcation, -3*pi/8.
inline constexpr double a_critical = -3.0 * std::numbers::pi / 8.0;

inline bool is_above_bifurcation(double a_scaled) { return a_scaled > a_critical; }

struct ScaledValues {
  double a;  ///< scaled scattering length N^2 a / a_u
  double t;  ///< scaled time N^2 t / t_u
};

/// Physical (a, t) in atomic-like units -> the one-parameter scaled system.
inline ScaledValues to_scaled(double particle_count, double a_phys, double t_phys) {
  if (!(particle_count >= 1.0))
    throw std::invalid_argument("to_scaled: particle count must be >= 1");
  const double n2 = particle_count * particle_count;
  return {n2 * a_phys, n2 * t_phys};
}

inline ScaledValues from_scaled(double particle_count, double a_scaled, double t_scaled) {
  if (!(particle_count >= 1.0))
    throw std::invalid_argument("from_scaled: particle count must be >= 1");
  const double n2 = particle_count * particle_count;
  return {a_scaled / n2, t_scaled / n2};
}

/// Norm-derived scale factor 1/nu = ||psi||^2.
struct ScaleFactor {
  double nu;
};

inline ScaleFactor nu_of(const RadialWaveFunction& psi) {
  const double n2 = norm_squared(psi);
  if (!(n2 > 0.0)) throw std::invalid_argument("nu_of: zero-norm wave function");
  return {1.0 / n2};
}

struct RescaledSolution {
  RadialWaveFunction psi;  ///< unit norm, on the stretched grid dr/nu
  double eps;
  double a;
  std::optional<double> lambda;
  double nu;
};

/// Applies (psi, r, eps, a, lambda) -> (nu^2 psi, r/nu, nu^2 eps, a/nu^2,
/// nu^2 lambda) with 1/nu = ||psi||^2.  Sample values are scaled in place and
/// the abscissa stretch becomes a new grid spacing dr/nu, so no resampling is
/// involved; the result has unit norm by construction.
inline RescaledSolution rescale_solution(const RadialWaveFunction& psi_raw,
                                         double eps_raw, double a_raw,
                                         std::optional<double> lambda_raw = {}) {
  const double nu = nu_of(psi_raw).nu;
  RadialGrid grid(psi_raw.grid.n(), psi_raw.grid.dr() / nu);
  RadialWaveFunction psi(grid, psi_raw.values);
  const double nu2 = nu * nu;
  for (auto& z : psi.values) z *= nu2;
  std::optional<double> lambda;
  if (lambda_raw) lambda = nu2 * *lambda_raw;
  return {std::move(psi), nu2 * eps_raw, a_raw / nu2, lambda, nu};
}

}  // namespace bec1r
