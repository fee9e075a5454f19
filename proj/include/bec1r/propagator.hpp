#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bec1r/observables.hpp"
#include "bec1r/potentials.hpp"
#include "bec1r/wave.hpp"

namespace bec1r {

struct PropagationConfig {
  double dt = 1e-2;
  double t_end = 10.0;
  std::size_t record_every = 10;
  /// Accepted-run bound on |E(t) - E(0)|; exceeding it marks the series
  /// non-converged (the step was too large), it does not abort the run.
  double drift_tolerance = 1e-6;
  /// Relative amplitude allowed at the outer three samples in either space;
  /// beyond it the run aborts rather than aliasing across the box.
  double boundary_floor = 1e-8;
  /// Test hook: disable the 1/r term (free / contact-only propagation).
  bool with_monopolar = true;
};

struct TimeSample {
  double t;
  double norm;
  double width;
  double energy;
  double eps;
  double p_width;  ///< sqrt(<p^2>), momentum-space extent
};

enum class RunStatus { completed, boundary_violation };

struct TimeSeries {
  std::vector<TimeSample> rows;
  RunStatus status = RunStatus::completed;
  double t_final = 0.0;
  std::string abort_reason;  ///< "position-boundary" or "momentum-boundary"
  double max_energy_drift = 0.0;
  bool energy_converged = true;
};

struct EvolveResult {
  TimeSeries series;
  RadialWaveFunction psi;
};

/// Strang split-operator evolution of the scaled system: kinetic factors are
/// diagonal on the sine coefficients of u = r*psi (multiplier p^2), the
/// potential factor is diagonal in position with V_c + V_u recomputed from
/// the current density once per step.  Norm is never corrected; its drift is
/// a diagnostic.
class Propagator {
 public:
  explicit Propagator(const RadialGrid& grid)
      : grid_(grid), dst_(grid), u_(grid.n()), uhat_(grid.n()) {}

  const RadialGrid& grid() const { return grid_; }

  /// One full step exp(-i dt/2 T) exp(-i dt V) exp(-i dt/2 T); local error
  /// O(dt^3).
  void step(RadialWaveFunction& psi, double a, double dt,
            bool with_monopolar = true) {
    const auto half = kinetic_phase(0.5 * dt);
    kinetic(psi, half);
    potential(psi, a, dt, with_monopolar);
    kinetic(psi, half);
  }

  EvolveResult evolve(RadialWaveFunction psi, double a,
                      const PropagationConfig& cfg) {
    if (psi.grid != grid_)
      throw std::invalid_argument("Propagator::evolve: state grid mismatch");
    if (!(cfg.dt > 0.0) || cfg.record_every < 1 || !(cfg.t_end > 0.0))
      throw std::invalid_argument("Propagator::evolve: invalid configuration");

    boundary_floor_hint_ = cfg.boundary_floor;
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    TimeSeries series;
    record(series, 0.0, psi, a);
    const double e0 = series.rows.front().energy;

    // Consecutive half-kinetic factors between records are fused into full
    // ones; the sequence is algebraically identical to repeated step().
    const auto half = kinetic_phase(0.5 * cfg.dt);
    const auto full = kinetic_phase(cfg.dt);
    bool p_violation = false;
    kinetic(psi, half, &p_violation);
    for (std::size_t s = 1; s <= n_steps; ++s) {
      const double t = static_cast<double>(s) * cfg.dt;
      potential(psi, a, cfg.dt, cfg.with_monopolar);
      const bool at_record = (s % cfg.record_every == 0) || s == n_steps;
      kinetic(psi, at_record ? half : full, &p_violation);
      if (p_violation || boundary_fraction(psi.values) > cfg.boundary_floor) {
        series.status = RunStatus::boundary_violation;
        series.abort_reason = p_violation ? "momentum-boundary" : "position-boundary";
        series.t_final = t;
        finish(series, cfg);
        return {std::move(series), std::move(psi)};
      }
      if (at_record) {
        record(series, t, psi, a);
        series.max_energy_drift = std::max(
            series.max_energy_drift, std::abs(series.rows.back().energy - e0));
        if (s < n_steps) kinetic(psi, half, &p_violation);
      }
    }
    series.t_final = cfg.t_end;
    finish(series, cfg);
    return {std::move(series), std::move(psi)};
  }

  Observables measure(const RadialWaveFunction& psi, double a) {
    return observables(psi, a, dst_);
  }

 private:
  std::vector<std::complex<double>> kinetic_phase(double tau) const {
    std::vector<std::complex<double>> phase(grid_.n());
    for (std::size_t j = 0; j < grid_.n(); ++j) {
      const double p = grid_.p(j);
      const double arg = -tau * p * p;
      phase[j] = std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return phase;
  }

  void kinetic(RadialWaveFunction& psi,
               const std::vector<std::complex<double>>& phase,
               bool* p_violation = nullptr) {
    const std::size_t n = grid_.n();
    for (std::size_t k = 0; k < n; ++k) u_[k] = grid_.r(k) * psi.values[k];
    dst_.forward(u_, uhat_);
    if (p_violation && boundary_fraction(uhat_) > boundary_floor_hint_)
      *p_violation = true;
    for (std::size_t j = 0; j < n; ++j) uhat_[j] *= phase[j];
    dst_.backward(uhat_, u_);
    for (std::size_t k = 0; k < n; ++k) psi.values[k] = u_[k] / grid_.r(k);
  }

  void potential(RadialWaveFunction& psi, double a, double dt, bool with_monopolar) {
    const std::size_t n = grid_.n();
    auto v = contact_potential(psi, a);
    if (with_monopolar) {
      const auto vu = monopolar_potential(psi, dst_);
      for (std::size_t k = 0; k < n; ++k) v[k] += vu[k];
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = -dt * v[k];
      psi.values[k] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }

  void record(TimeSeries& series, double t, const RadialWaveFunction& psi, double a) {
    const auto obs = observables(psi, a, dst_);
    series.rows.push_back({t, obs.norm, obs.width, obs.energy, obs.eps,
                           std::sqrt(obs.kinetic) / obs.norm});
  }

  void finish(TimeSeries& series, const PropagationConfig& cfg) {
    series.energy_converged = series.max_energy_drift <= cfg.drift_tolerance;
  }

  RadialGrid grid_;
  SineTransform dst_;
  std::vector<std::complex<double>> u_, uhat_;
  double boundary_floor_hint_ = 1e-8;
};

inline EvolveResult evolve(const RadialWaveFunction& psi0, double a,
                           const PropagationConfig& cfg) {
  Propagator prop(psi0.grid);
  return prop.evolve(psi0, a, cfg);
}

// ---------------------------------------------------------------------------
// Run classification

enum class RunClass { oscillating, collapsing, expanding, stationary, indeterminate };

inline const char* to_string(RunClass c) {
  switch (c) {
    case RunClass::oscillating: return "oscillating";
    case RunClass::collapsing: return "collapsing";
    case RunClass::expanding: return "expanding";
    case RunClass::stationary: return "stationary";
    default: return "indeterminate";
  }
}

struct CollapseReportNumeric {
  RunClass classification = RunClass::indeterminate;
  std::optional<double> last_resolvable_time;   ///< collapsing runs
  std::optional<double> momentum_width_growth;  ///< p-width(end) / p-width(start)
};

/// Classifies a completed or aborted run from its width trend and the grid
/// diagnostics.
inline CollapseReportNumeric collapse_monitor(const TimeSeries& series) {
  CollapseReportNumeric rep;
  if (series.rows.size() < 4) return rep;

  const auto& rows = series.rows;
  const std::size_t n = rows.size();
  double w_min = rows[0].width, w_max = rows[0].width;
  for (const auto& s : rows) {
    w_min = std::min(w_min, s.width);
    w_max = std::max(w_max, s.width);
  }
  const double w_first = rows.front().width, w_last = rows.back().width;
  const double mean = 0.5 * (w_min + w_max);
  rep.momentum_width_growth = rows.back().p_width / rows.front().p_width;

  if ((w_max - w_min) / mean < 0.01) {
    rep.classification = RunClass::stationary;
    return rep;
  }
  const bool shrinking_tail = w_last < 0.9 * w_first && rows[n - 1].width < rows[n - 2].width;
  if ((series.status == RunStatus::boundary_violation &&
       series.abort_reason == "momentum-boundary" && w_last < w_first) ||
      (w_last < 0.3 * w_first && shrinking_tail)) {
    rep.classification = RunClass::collapsing;
    rep.last_resolvable_time = rows.back().t;
    return rep;
  }
  // Envelope growth: the late-window minimum clears every early value.
  double early_max = 0.0, late_min = 1e300;
  for (std::size_t i = 0; i < n / 4; ++i) early_max = std::max(early_max, rows[i].width);
  for (std::size_t i = n - n / 4; i < n; ++i) late_min = std::min(late_min, rows[i].width);
  if (late_min > early_max && w_last > 1.1 * w_first) {
    rep.classification = RunClass::expanding;
    return rep;
  }
  // Interior extrema with 0.5% hysteresis.
  std::size_t extrema = 0;
  int dir = 0;
  double ref = rows[0].width;
  for (std::size_t i = 1; i < n; ++i) {
    const double dw = rows[i].width - ref;
    if (std::abs(dw) < 0.005 * mean) continue;
    const int d = dw > 0.0 ? 1 : -1;
    if (dir != 0 && d != dir) ++extrema;
    dir = d;
    ref = rows[i].width;
  }
  if (extrema >= 2) {
    rep.classification = RunClass::oscillating;
    return rep;
  }
  return rep;
}

}  // namespace bec1r
