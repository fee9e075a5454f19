#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bec1r/grid.hpp"

namespace bec1r {

/// Spherically symmetric complex wave function sampled on a RadialGrid.
struct RadialWaveFunction {
  RadialGrid grid;
  std::vector<std::complex<double>> values;

  RadialWaveFunction(const RadialGrid& g, std::vector<std::complex<double>> v)
      : grid(g), values(std::move(v)) {
    if (values.size() != grid.n())
      throw std::invalid_argument("RadialWaveFunction: sample count != grid size");
  }
  explicit RadialWaveFunction(const RadialGrid& g)
      : grid(g), values(g.n(), std::complex<double>(0.0, 0.0)) {}
};

/// ||psi||^2 = 4*pi * sum |psi_k|^2 r_k^2 dr.  The integrand is even in r and
/// decays at the box edge, so the trapezoid sum is spectrally accurate.
inline double norm_squared(const RadialWaveFunction& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < w.grid.n(); ++k) {
    const double r = w.grid.r(k);
    s += std::norm(w.values[k]) * r * r;
  }
  return 4.0 * std::numbers::pi * s * w.grid.dr();
}

/// Root-mean-square radius sqrt(<r^2>).
inline double width(const RadialWaveFunction& w) {
  double s2 = 0.0, s4 = 0.0;
  for (std::size_t k = 0; k < w.grid.n(); ++k) {
    const double r = w.grid.r(k);
    const double d = std::norm(w.values[k]);
    s2 += d * r * r;
    s4 += d * r * r * r * r;
  }
  if (s2 <= 0.0) throw std::domain_error("width: zero-norm wave function");
  return std::sqrt(s4 / s2);
}

/// Largest |psi| over the outermost m samples, relative to max|psi|.
/// Used by the propagation boundary monitor.
inline double boundary_fraction(const std::vector<std::complex<double>>& v,
                                std::size_t m = 3) {
  double peak = 0.0;
  for (const auto& z : v) peak = std::max(peak, std::abs(z));
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (std::size_t k = v.size() - std::min(m, v.size()); k < v.size(); ++k)
    edge = std::max(edge, std::abs(v[k]));
  return edge / peak;
}

/// Normalization phase constant: the Gaussian exp(i(A r^2 + gamma)) with
/// gamma_i = -(3/4) ln(2 A_i / pi) has unit norm.
inline double gamma_i_of(double a_imag) {
  if (!(a_imag > 0.0))
    throw std::invalid_argument("gamma_i_of: Gaussian width parameter must be positive");
  return -0.75 * std::log(2.0 * a_imag / std::numbers::pi);
}

/// Samples exp(i A r^2) with A = A_r + i A_i, A_i > 0.  With normalize set,
/// the amplitude exp(-gamma_i) fixes the norm to one.
inline RadialWaveFunction gaussian_state(const RadialGrid& grid,
                                         std::complex<double> A,
                                         bool normalize = true) {
  const double a_r = A.real(), a_i = A.imag();
  if (!(a_i > 0.0))
    throw std::invalid_argument("gaussian_state: Im(A) must be positive");
  const double amp = normalize ? std::exp(-gamma_i_of(a_i)) : 1.0;
  RadialWaveFunction w(grid);
  for (std::size_t k = 0; k < grid.n(); ++k) {
    const double r2 = grid.r(k) * grid.r(k);
    w.values[k] = amp * std::exp(-a_i * r2) *
                  std::complex<double>(std::cos(a_r * r2), std::sin(a_r * r2));
  }
  return w;
}

struct DeformResult {
  RadialWaveFunction psi;
  /// Set when the stretched state still carries noticeable amplitude at the
  /// outer grid edge (resampling truncated a significant tail).
  bool boundary_clipped = false;
};

/// Norm-preserving stretch psi(r) -> f * psi(f^{2/3} r) on the same grid.
///
/// Off-grid values are evaluated from the sine-series interpolant of
/// u = r*psi, which is exact for grid-representable states; arguments past
/// the box edge are treated as zero.
inline DeformResult deform(const RadialWaveFunction& w, double f,
                           double boundary_floor = 1e-8) {
  if (!(f > 0.0)) throw std::invalid_argument("deform: stretching factor must be positive");
  const RadialGrid& g = w.grid;
  const std::size_t n = g.n();

  std::vector<std::complex<double>> u(n), uhat(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = g.r(k) * w.values[k];
  SineTransform dst(g);
  dst.forward(u, uhat);

  const double stretch = std::pow(f, 2.0 / 3.0);
  const double lead = 2.0 / g.box_length();
  DeformResult out{RadialWaveFunction(g), false};
  for (std::size_t k = 0; k < n; ++k) {
    const double r = stretch * g.r(k);
    if (r >= g.r_max()) {
      out.psi.values[k] = 0.0;
      continue;
    }
    std::complex<double> s(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) s += uhat[j] * std::sin(g.p(j) * r);
    out.psi.values[k] = f * lead * s / r;
  }
  if (boundary_fraction(w.values) > boundary_floor ||
      boundary_fraction(out.psi.values) > boundary_floor)
    out.boundary_clipped = true;
  return out;
}

}  // namespace bec1r
