#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cavlock/dynamics.hpp"
#include "cavlock/noise.hpp"
#include "cavlock/steady_state.hpp"

namespace cavlock {

/// Shortest decimal representation that round-trips the double exactly.
/// Locale-independent ('.' decimal separator always).
std::string format_double(double value);

std::vector<double> linspace(double lo, double hi, std::size_t count);
std::vector<double> geomspace(double lo, double hi, std::size_t count);

// All CSV emitters write a header row and use format_double for numbers, so
// identical inputs produce byte-identical files.
void write_scan_csv(std::ostream& os, std::span<const BranchSet> sets);
void write_surface_csv(std::ostream& os, const SurfaceScan& surface);
void write_normal_modes_csv(std::ostream& os, const NormalModeCurves& curves);
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory);
void write_hysteresis_csv(std::ostream& os, const HysteresisResult& result);
void write_lineshape_csv(std::ostream& os, const Periodogram& spectrum);
void write_series_csv(std::ostream& os,
                      std::span<const std::complex<double>> series,
                      double sample_rate_hz);

/// Reads a [t, re, im] CSV (header optional). Throws std::invalid_argument
/// on malformed rows.
std::vector<std::complex<double>> read_series_csv(std::istream& is);

}  // namespace cavlock
