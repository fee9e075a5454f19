#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bec1r/potentials.hpp"
#include "bec1r/wave.hpp"

namespace bec1r {

/// Numeric observables of a radial state.  The energy splits as
/// E = <T> + <V_c>/2 + <V_u>/2 while the chemical potential carries the full
/// interaction weights, eps = <T> + <V_c> + <V_u>.  All functionals are raw
/// integrals (no division by the norm); the fields are the physical values
/// for unit-norm states.
struct Observables {
  double norm;   ///< ||psi|| (square root of the norm integral)
  double width;  ///< sqrt(<r^2>) per unit norm
  double energy;
  double eps;
  double kinetic;
  double contact;
  double monopolar;
};

inline Observables observables(const RadialWaveFunction& psi, double a,
                               SineTransform& dst) {
  const RadialGrid& g = psi.grid;
  const std::size_t n = g.n();
  const double norm2 = norm_squared(psi);
  if (!(norm2 > 0.0)) throw std::domain_error("observables: zero-norm wave function");

  // Kinetic term through u = r*psi: <-Laplacian> = 4 pi int |u'|^2 dr,
  // evaluated by Parseval on the sine coefficients.
  std::vector<std::complex<double>> u(n), uhat(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = g.r(k) * psi.values[k];
  dst.forward(u, uhat);
  double kin = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = g.p(j);
    kin += p * p * std::norm(uhat[j]);
  }
  kin *= 8.0 * g.dp();

  const auto vc = contact_potential(psi, a);
  const auto vu = monopolar_potential(psi, dst);
  double ec = 0.0, eu = 0.0, r4 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = g.r(k);
    const double d = std::norm(psi.values[k]) * r * r;
    ec += vc[k] * d;
    eu += vu[k] * d;
    r4 += d * r * r;
  }
  const double quad = 4.0 * std::numbers::pi * g.dr();
  ec *= quad;
  eu *= quad;
  r4 *= quad;

  return {std::sqrt(norm2), std::sqrt(r4 / norm2), kin + 0.5 * ec + 0.5 * eu,
          kin + ec + eu, kin, ec, eu};
}

inline Observables observables(const RadialWaveFunction& psi, double a) {
  SineTransform dst(psi.grid);
  return observables(psi, a, dst);
}

}  // namespace bec1r
