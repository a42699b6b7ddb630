#include "cavlock/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cavlock {

std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count < 2) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

std::vector<double> geomspace(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi > 0.0))
    throw std::invalid_argument("geomspace: bounds must be positive");
  if (count < 2) return {lo};
  std::vector<double> out(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

namespace {

class Row {
 public:
  explicit Row(std::ostream& os) : os_(os) {}
  Row& operator<<(double v) {
    sep();
    os_ << format_double(v);
    return *this;
  }
  Row& operator<<(std::string_view v) {
    sep();
    os_ << v;
    return *this;
  }
  Row& operator<<(int v) {
    sep();
    os_ << v;
    return *this;
  }
  ~Row() { os_ << '\n'; }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostream& os_;
  bool first_ = true;
};

void branch_row(std::ostream& os, const DimensionlessPoint& p, int index,
                const SteadyStateBranch& b) {
  Row(os) << p.cooperativity << p.drive << p.delta << p.theta << index
          << b.intensity << b.field.real() << b.field.imag() << b.inversion
          << to_string(b.stability);
}

}  // namespace

void write_scan_csv(std::ostream& os, std::span<const BranchSet> sets) {
  os << "C,I_in,delta,theta,branch_index,u,re_x,im_x,sigma_z,stability\n";
  for (const BranchSet& set : sets) {
    for (std::size_t i = 0; i < set.branches.size(); ++i)
      branch_row(os, set.point, static_cast<int>(i), set.branches[i]);
  }
}

void write_surface_csv(std::ostream& os, const SurfaceScan& surface) {
  os << "C,I_in,delta,theta,branch_index,u,re_x,im_x,sigma_z,stability\n";
  DimensionlessPoint p{surface.cooperativity, surface.drive, 0.0, 0.0};
  std::size_t cell = 0;
  for (double delta : surface.delta) {
    for (double theta : surface.theta) {
      p.delta = delta;
      p.theta = theta;
      branch_row(os, p, 0, surface.top[cell++]);
    }
  }
}

void write_normal_modes_csv(std::ostream& os, const NormalModeCurves& curves) {
  os << "delta,theta_upper,theta_lower\n";
  for (std::size_t i = 0; i < curves.delta.size(); ++i)
    Row(os) << curves.delta[i] << curves.upper[i] << curves.lower[i];
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory) {
  os << "tau,re_x,im_x,re_s,im_s,z\n";
  for (std::size_t i = 0; i < trajectory.tau.size(); ++i) {
    const SemiclassicalState& s = trajectory.states[i];
    Row(os) << trajectory.tau[i] << s.field.real() << s.field.imag()
            << s.dipole.real() << s.dipole.imag() << s.inversion;
  }
}

void write_hysteresis_csv(std::ostream& os, const HysteresisResult& result) {
  os << "I_in,u,direction\n";
  for (const HysteresisPoint& p : result.points)
    Row(os) << p.drive << p.intensity << p.direction;
}

void write_lineshape_csv(std::ostream& os, const Periodogram& spectrum) {
  os << "f_hz,psd\n";
  for (std::size_t i = 0; i < spectrum.freq_hz.size(); ++i)
    Row(os) << spectrum.freq_hz[i] << spectrum.psd[i];
}

void write_series_csv(std::ostream& os,
                      std::span<const std::complex<double>> series,
                      double sample_rate_hz) {
  os << "t,re,im\n";
  const double dt = 1.0 / sample_rate_hz;
  for (std::size_t i = 0; i < series.size(); ++i) {
    Row(os) << static_cast<double>(i) * dt << series[i].real()
            << series[i].imag();
  }
}

std::vector<std::complex<double>> read_series_csv(std::istream& is) {
  std::vector<std::complex<double>> out;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first && line.find_first_not_of("0123456789+-.eE, \t\r") !=
                     std::string::npos) {
      first = false;  // header row
      continue;
    }
    first = false;
    std::istringstream ss(line);
    std::string cell;
    double cols[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(ss, cell, ','))
        throw std::invalid_argument("series csv: expected 3 columns, got \"" +
                                    line + "\"");
      const char* begin = cell.data();
      const char* end = begin + cell.size();
      while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
      const auto res = std::from_chars(begin, end, cols[c]);
      if (res.ec != std::errc{})
        throw std::invalid_argument("series csv: bad number \"" + cell + "\"");
    }
    out.emplace_back(cols[1], cols[2]);
  }
  return out;
}

}  // namespace cavlock
