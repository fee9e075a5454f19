#pragma once

#include <complex>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bec1r/propagator.hpp"
#include "bec1r/stability.hpp"
#include "bec1r/stationary.hpp"
#include "bec1r/wave.hpp"

namespace bec1r {

namespace io_detail {
inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << std::setprecision(17);
  return f;
}
}  // namespace io_detail

/// Wave-function snapshot: `# r re_psi im_psi density`, one row per grid
/// point, 17 significant digits.  Extra header lines (starting with '#')
/// may follow the column header.
inline void write_snapshot(std::ostream& os, const RadialWaveFunction& w,
                           const std::vector<std::string>& extra_header = {}) {
  os << std::setprecision(17);
  os << "# r re_psi im_psi density\n";
  for (const auto& line : extra_header) os << "# " << line << "\n";
  for (std::size_t k = 0; k < w.grid.n(); ++k) {
    const auto z = w.values[k];
    os << w.grid.r(k) << " " << z.real() << " " << z.imag() << " "
       << std::norm(z) << "\n";
  }
}

inline void write_snapshot(const std::string& path, const RadialWaveFunction& w,
                           const std::vector<std::string>& extra_header = {}) {
  auto f = io_detail::open_out(path);
  write_snapshot(f, w, extra_header);
}

/// StationaryState snapshot: the wave-function format plus the sidecar line
/// `# eps=<value> a=<value> branch=<name>`.
inline void write_stationary(const std::string& path, const StationaryState& s) {
  std::ostringstream sidecar;
  sidecar << std::setprecision(17) << "eps=" << s.eps << " a=" << s.a
          << " branch=" << to_string(s.branch);
  auto f = io_detail::open_out(path);
  write_snapshot(f, s.psi, {sidecar.str()});
}

struct SnapshotData {
  std::vector<double> r;
  std::vector<std::complex<double>> psi;
  std::vector<std::string> header;
};

inline SnapshotData read_snapshot(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open snapshot file: " + path);
  SnapshotData out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.header.push_back(line);
      continue;
    }
    std::istringstream is(line);
    double r, re, im, dens;
    if (!(is >> r >> re >> im >> dens))
      throw std::runtime_error("malformed snapshot row: " + line);
    out.r.push_back(r);
    out.psi.emplace_back(re, im);
  }
  return out;
}

/// Propagation series: CSV header `t,norm,width,energy,eps`.
inline void write_timeseries(std::ostream& os, const TimeSeries& ts) {
  os << std::setprecision(17);
  os << "t,norm,width,energy,eps\n";
  for (const auto& s : ts.rows)
    os << s.t << "," << s.norm << "," << s.width << "," << s.energy << ","
       << s.eps << "\n";
}

inline void write_timeseries(const std::string& path, const TimeSeries& ts) {
  auto f = io_detail::open_out(path);
  write_timeseries(f, ts);
}

/// Stability modes: CSV `a,branch,re_lambda,im_lambda`, one row per mode.
inline void write_modes_csv(std::ostream& os, double a, Branch branch,
                            const std::vector<StabilityMode>& modes,
                            bool with_header = true) {
  os << std::setprecision(17);
  if (with_header) os << "a,branch,re_lambda,im_lambda\n";
  for (const auto& m : modes)
    os << a << "," << to_string(branch) << "," << m.lambda.real() << ","
       << m.lambda.imag() << "\n";
}

inline void write_modes_csv(const std::string& path, double a, Branch branch,
                            const std::vector<StabilityMode>& modes) {
  auto f = io_detail::open_out(path);
  write_modes_csv(f, a, branch, modes);
}

}  // namespace bec1r
