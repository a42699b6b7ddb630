#pragma once

#include <string>
#include <vector>

#include "cavlock/catalog.hpp"
#include "cavlock/model.hpp"

namespace cavlock {

// Lock-performance chain at the saturated operating point I_in = beta C^2/4,
// on resonance. Power, SNR and bandwidth use the cavity-length-free identity
// kappa C^2 n0 = N^2 C0 gamma / 4.
struct LockBudget {
  std::string species;
  double beta = 0.0;
  double signal_power_w = 0.0;        // hbar w_L kappa C^2 n0 beta / 2
  double snr_rt_hz = 0.0;             // per sqrt(Hz), shot-noise limited
  double phase_slope_s = 0.0;         // d(phi)/d(Delta), from the solved branch
  double phase_slope_approx_s = 0.0;  // 4 T2 / (beta C)
  double linewidth_hz = 0.0;          // FWHM from the solved branch chain
  double linewidth_closed_hz = 0.0;   // C0 beta / (16 pi gamma T2^2 eta_qe)
  double lock_bandwidth_hz = 0.0;     // kappa C^2 n0 beta
  double pulling_hz_per_theta = 0.0;  // C beta / (8 pi T2)
  double collective_dipole = 0.0;     // <J+ J-> = (N^2/C^2)(T2 gamma / beta)
};

/// Power leaking out of the cavity at the operating point [W].
double signal_power(const PhysicalSystem& sys, double beta);

/// Bandwidth-normalized shot-noise SNR, sqrt(eta_qe N^2 C0 gamma beta / 4).
double snr(const PhysicalSystem& sys, double beta);

struct PhaseSlope {
  double exact_s = 0.0;   // T2 C sigma_z / (C sigma_z - 1)
  double approx_s = 0.0;  // 4 T2 / (beta C)
};
PhaseSlope phase_slope(const PhysicalSystem& sys, double beta);

/// Scaled slope d(phi)/d(delta) = C sigma_z / (C sigma_z - 1).
double phase_slope_exact_scaled(double cooperativity, double sigma_z);

struct Linewidth {
  double branch_hz = 0.0;  // pi (SNR 2 pi dphi/dDelta)^-2 with branch values
  double closed_hz = 0.0;  // C0 beta / (16 pi gamma T2^2 eta_qe)
};
/// Quantum-limited FWHM of the locked laser. The two routes agree to
/// O(1/C^2); in the radiative limit T2 = 2/gamma the closed form reduces to
/// beta C0 gamma / (64 pi).
Linewidth quantum_limited_linewidth(const PhysicalSystem& sys, double beta);

/// Quantum-limited lock bandwidth [Hz]; equals SNR^2 at unit efficiency.
double lock_bandwidth(const PhysicalSystem& sys, double beta);

/// Lock-point shift for a residual cavity-laser offset theta [Hz].
double line_pulling(const PhysicalSystem& sys, double beta, double theta);
double line_pulling_scaled(double cooperativity, double beta, double t2,
                           double theta);

/// Collective dipole <J+ J-> on resonance at the operating point.
double collective_dipole(const PhysicalSystem& sys, double beta);

/// Linewidth of the corresponding active device, C0 gamma / pi [Hz];
/// comparison constant only.
double active_laser_linewidth(const PhysicalSystem& sys);

LockBudget lock_budget(const PhysicalSystem& sys, double beta,
                       std::string name = "");

struct Table1Row {
  std::string name;
  double single_atom_cooperativity = 0.0;
  double signal_power_w = 0.0;
  double snr = 0.0;
  double linewidth_hz = 0.0;
};
/// One row per catalog entry at beta = 2, the tabulated operating strength.
std::vector<Table1Row> table1(const std::vector<SpeciesRecord>& catalog);

}  // namespace cavlock
