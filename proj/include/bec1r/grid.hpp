#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace bec1r {

/// Equidistant radial grid r_k = (k+1)*dr for k = 0..n-1.
///
/// The origin is excluded: every field is handled through u(r) = r*psi(r),
/// which vanishes there, and the outer boundary of the sine-transform box
/// sits at L = (n+1)*dr where u is taken to vanish as well.  The conjugate
/// momentum grid p_j = (j+1)*pi/L is the discrete dual of r_k.
class RadialGrid {
 public:
  RadialGrid(std::size_t n, double dr) : n_(n), dr_(dr) {
    if (n < 8) throw std::invalid_argument("RadialGrid: need at least 8 points");
    if (!(dr > 0.0)) throw std::invalid_argument("RadialGrid: dr must be positive");
  }

  /// Grid with n points whose last sample lies at r_max.
  static RadialGrid with_extent(std::size_t n, double r_max) {
    return RadialGrid(n, r_max / static_cast<double>(n));
  }

  std::size_t n() const { return n_; }
  double dr() const { return dr_; }
  double r(std::size_t k) const { return static_cast<double>(k + 1) * dr_; }
  double r_max() const { return static_cast<double>(n_) * dr_; }
  /// Edge of the Dirichlet box, one spacing beyond the last sample.
  double box_length() const { return static_cast<double>(n_ + 1) * dr_; }
  double dp() const { return pi_ / box_length(); }
  double p(std::size_t j) const { return static_cast<double>(j + 1) * dp(); }
  double p_max() const { return static_cast<double>(n_) * dp(); }

  bool operator==(const RadialGrid& o) const { return n_ == o.n_ && dr_ == o.dr_; }
  bool operator!=(const RadialGrid& o) const { return !(*this == o); }

 private:
  static constexpr double pi_ = 3.14159265358979323846;
  std::size_t n_;
  double dr_;
};

/// Discrete sine transform (DST-I) pair between samples u(r_k) and sine
/// coefficients, normalized as the continuous radial pair
///
///   uhat(p) = int_0^inf u(r) sin(p r) dr,
///   u(r)    = (2/pi) int_0^inf uhat(p) sin(p r) dp.
///
/// forward followed by backward is the identity on the grid (exactly, up to
/// roundoff), and Parseval holds: dr*sum|u|^2 = (2/pi)*dp*sum|uhat|^2.
///
/// Instances carry an FFTW plan and a scratch buffer; they are not shareable
/// between threads.  Plan creation is serialized internally.
class SineTransform {
 public:
  explicit SineTransform(const RadialGrid& grid)
      : grid_(grid), buf_(fftw_alloc_real(grid.n())) {
    if (!buf_) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_r2r_1d(static_cast<int>(grid.n()), buf_, buf_,
                             FFTW_RODFT00, FFTW_ESTIMATE);
    if (!plan_) {
      fftw_free(buf_);
      throw std::runtime_error("SineTransform: FFTW plan creation failed");
    }
  }

  ~SineTransform() {
    if (plan_ || buf_) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      if (plan_) fftw_destroy_plan(plan_);
      if (buf_) fftw_free(buf_);
    }
  }

  SineTransform(SineTransform&& o) noexcept
      : grid_(o.grid_), buf_(std::exchange(o.buf_, nullptr)),
        plan_(std::exchange(o.plan_, nullptr)) {}
  SineTransform& operator=(SineTransform&&) = delete;
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  const RadialGrid& grid() const { return grid_; }

  /// u(r_k) -> uhat(p_j).
  void forward(std::span<const double> u, std::span<double> uhat) {
    run(u, uhat, 0.5 * grid_.dr());
  }

  /// uhat(p_j) -> u(r_k).
  void backward(std::span<const double> uhat, std::span<double> u) {
    run(uhat, u, 1.0 / grid_.box_length());
  }

  void forward(std::span<const std::complex<double>> u,
               std::span<std::complex<double>> uhat) {
    run(u, uhat, 0.5 * grid_.dr());
  }

  void backward(std::span<const std::complex<double>> uhat,
                std::span<std::complex<double>> u) {
    run(uhat, u, 1.0 / grid_.box_length());
  }

 private:
  // FFTW's RODFT00 computes y_j = 2 sum_k x_k sin(pi (j+1)(k+1)/(n+1)).
  void run(std::span<const double> in, std::span<double> out, double scale) {
    check(in.size(), out.size());
    const std::size_t n = grid_.n();
    for (std::size_t k = 0; k < n; ++k) buf_[k] = in[k];
    fftw_execute(plan_);
    for (std::size_t k = 0; k < n; ++k) out[k] = scale * buf_[k];
  }

  void run(std::span<const std::complex<double>> in,
           std::span<std::complex<double>> out, double scale) {
    check(in.size(), out.size());
    const std::size_t n = grid_.n();
    for (std::size_t k = 0; k < n; ++k) buf_[k] = in[k].real();
    fftw_execute(plan_);
    for (std::size_t k = 0; k < n; ++k)
      out[k] = std::complex<double>(scale * buf_[k], in[k].imag());
    for (std::size_t k = 0; k < n; ++k) buf_[k] = out[k].imag();
    fftw_execute(plan_);
    for (std::size_t k = 0; k < n; ++k)
      out[k] = std::complex<double>(out[k].real(), scale * buf_[k]);
  }

  void check(std::size_t nin, std::size_t nout) const {
    if (nin != grid_.n() || nout != grid_.n())
      throw std::invalid_argument("SineTransform: length does not match grid");
  }

  static std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
  }

  RadialGrid grid_;
  double* buf_;
  fftw_plan plan_;
};

}  // namespace bec1r
