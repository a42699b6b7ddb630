#pragma once

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cavlock/model.hpp"

namespace cavlock {

enum class Stability { unknown, stable, unstable, marginal };

std::string_view to_string(Stability s);

// One self-consistent solution of the driven steady state. Intensities are
// in units of the saturation photon number n0.
struct SteadyStateBranch {
  double intensity = 0.0;        // u = |x|^2
  std::complex<double> field;    // x = <a>/sqrt(n0)
  double inversion = -1.0;       // sigma_z = -(1+delta^2)/(1+u+delta^2)
  std::complex<double> dipole;   // sigma_- per atom
  Stability stability = Stability::unknown;
  // Flow eigenvalues, filled by dynamics::classify_stability.
  std::optional<std::array<std::complex<double>, 5>> eigenvalues;
};

// All branches at one operating point, ascending in intensity. Two entries
// occur only within tolerance of a fold.
struct BranchSet {
  DimensionlessPoint point;
  std::vector<SteadyStateBranch> branches;

  const SteadyStateBranch& top() const { return branches.back(); }
};

// Solves the driven steady state
//     y = x (1 + C (1 - i delta)/(1 + |x|^2 + delta^2) + i theta),
// i.e. the real cubic  I s^2 = u [(s+C)^2 + (theta s - C delta)^2]  with
// s = 1 + u + delta^2 and I = |y|^2. Roots come from the companion-matrix
// eigenvalues of the monic cubic with one guarded Newton polish each.
// gamma_t2 enters only the per-atom dipole, sigma_- =
// (sqrt(gamma T2)/2) x sigma_z / (1 + i delta).
BranchSet solve_branches(const DimensionlessPoint& point, double gamma_t2 = 2.0);

/// Residual |x|^2 |1 + C(1-i delta)/s + i theta|^2 - I_in at intensity u;
/// zero at a solution, same units as the drive.
double drive_mismatch(const DimensionlessPoint& point, double intensity);

struct BistabilityWindow {
  double lower = 0.0;            // exact fold drives
  double upper = 0.0;
  double lower_asymptote = 0.0;  // 4C
  double upper_asymptote = 0.0;  // C^2/4
  double fold_intensity_at_lower = 0.0;  // u where the falling fold sits
  double fold_intensity_at_upper = 0.0;
};

// On-resonance (delta = theta = 0) bistable window. The folds are the
// positive roots of u^2 + (2 - C) u + (1 + C) = 0 mapped through
// I(u) = u (1 + C/(1+u))^2. Empty for C <= 8.
std::optional<BistabilityWindow> bistability_thresholds(double cooperativity);

// Critical point where the window first opens: C = 8, double root u = 3.
struct CriticalPoint {
  double cooperativity = 0.0;
  double intensity = 0.0;
  double drive = 0.0;
};
CriticalPoint critical_point();

// Scan generators. Each grid point is independent (safe to parallelize);
// results are always assembled in grid order.
std::vector<BranchSet> scan_drive(double cooperativity, double delta,
                                  std::span<const double> drives,
                                  double gamma_t2 = 2.0);

std::vector<BranchSet> scan_spectrum(double cooperativity, double drive,
                                     std::span<const double> deltas,
                                     double theta = 0.0, double gamma_t2 = 2.0);

// Largest-intensity branch over a delta x theta grid (row-major, delta major).
struct SurfaceScan {
  double cooperativity = 0.0;
  double drive = 0.0;
  std::vector<double> delta;
  std::vector<double> theta;
  std::vector<SteadyStateBranch> top;
};
SurfaceScan scan_surface(double cooperativity, double drive,
                         std::span<const double> deltas,
                         std::span<const double> thetas);

// Weak-drive resonance condition (omega_a - omega_L)(omega_c - omega_L) =
// g^2 N, expressed in geometric-mean units sqrt(kappa Gamma_2): the two
// branches of theta (theta + delta) = C. At delta = 0 they sit at +-sqrt(C),
// the scaled vacuum Rabi splitting; for |delta| -> inf one branch approaches
// the bare cavity theta = 0.
struct NormalModeCurves {
  std::vector<double> delta;
  std::vector<double> upper;
  std::vector<double> lower;
};
NormalModeCurves normal_mode_overlay(double cooperativity,
                                     std::span<const double> deltas);

/// Phase of the transmitted light relative to the drive, Arg[x/y].
double transmitted_phase(const DimensionlessPoint& point,
                         const SteadyStateBranch& branch);

}  // namespace cavlock
