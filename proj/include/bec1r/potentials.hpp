#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "bec1r/wave.hpp"

namespace bec1r {

/// Contact (scattering) mean-field potential V_c(r) = 8 pi a |psi(r)|^2.
inline std::vector<double> contact_potential(const RadialWaveFunction& psi, double a) {
  std::vector<double> v(psi.grid.n());
  const double pre = 8.0 * std::numbers::pi * a;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = pre * std::norm(psi.values[k]);
  return v;
}

/// Attractive 1/r mean-field potential
///
///   V_u(r) = -2 int d^3r' |psi(r')|^2 / |r - r'|
///          = -(16/r) int_0^inf dp sin(pr)/p^2 int_0^inf dr' r' |psi|^2 sin(pr'),
///
/// evaluated with two sine transforms per call.  The transform pair solves
/// the radial Poisson problem with a Dirichlet box at L = (n+1) dr, which
/// differs from the free-space potential by the constant 2||psi||^2 / L
/// (the harmonic solution fixed by the boundary); that constant is removed
/// so the returned samples carry the physical -2||psi||^2/r tail.
inline std::vector<double> monopolar_potential(const RadialWaveFunction& psi,
                                               SineTransform& dst) {
  const RadialGrid& g = psi.grid;
  const std::size_t n = g.n();
  std::vector<double> rho_r(n), shat(n), vu(n);
  double q_total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = g.r(k);
    const double d = std::norm(psi.values[k]);
    rho_r[k] = r * d;
    q_total += d * r * r;
  }
  q_total *= 4.0 * std::numbers::pi * g.dr();

  dst.forward(rho_r, shat);
  for (std::size_t j = 0; j < n; ++j) shat[j] /= g.p(j) * g.p(j);
  dst.backward(shat, vu);

  const double box_shift = 2.0 * q_total / g.box_length();
  const double pre = -8.0 * std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) vu[k] = pre * vu[k] / g.r(k) - box_shift;
  return vu;
}

inline std::vector<double> monopolar_potential(const RadialWaveFunction& psi) {
  SineTransform dst(psi.grid);
  return monopolar_potential(psi, dst);
}

}  // namespace bec1r
