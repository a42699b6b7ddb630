#pragma once

#include "cavlock/constants.hpp"

namespace cavlock {

// One atom-cavity realization in SI units.
//
// Unit conventions used throughout the library:
//   - angular frequencies and atomic decay rates in rad/s,
//   - the dipole decay Gamma_2 = 1/T2 and the cavity field decay kappa in 1/s,
//   - kappa = pi c / (2 L F), so the cavity intensity FWHM is kappa/pi in Hz.
// The CLI accepts Hz where noted and converts at the boundary.
struct PhysicalSystem {
  static constexpr double default_mode_area = constants::pi * 1e-8;  // pi (100 um)^2

  double wavelength_m = 0.0;
  double gamma = 0.0;          // spontaneous decay rate of the excited state [rad/s]
  double dipole_decay = 0.0;   // Gamma_2 = 1/T2 [1/s]; >= gamma/2
  double atom_number = 0.0;    // N >= 0
  double finesse = 0.0;
  double cavity_length_m = 0.1;  // drops out of every dimensionless result
  double mode_area_m2 = default_mode_area;
  double quantum_efficiency = 1.0;  // detector, in (0, 1]
  double beta = 2.0;                // drive in units of the upper bistability threshold

  double t2() const { return 1.0 / dipole_decay; }
};

// Quantities derived from a PhysicalSystem. The single-atom cooperativity is
// independent of the cavity length (kappa ~ 1/L cancels g^2 ~ 1/L).
struct DerivedParams {
  double coupling = 0.0;                   // g, half the vacuum Rabi frequency [rad/s]
  double kappa = 0.0;                      // cavity field decay [1/s]
  double saturation_photons = 0.0;         // n0 = gamma Gamma_2 / (4 g^2)
  double single_atom_cooperativity = 0.0;  // C0 = g^2 / (kappa Gamma_2)
  double cooperativity = 0.0;              // C = N C0
  double laser_omega = 0.0;                // omega_L = 2 pi c / lambda [rad/s]
};

// The universal operating point. Every dimensionless result downstream
// depends on the physics only through these four numbers.
struct DimensionlessPoint {
  double cooperativity = 0.0;  // C
  double drive = 0.0;          // I_in = eta^2 / (n0 kappa^2)
  double delta = 0.0;          // T2 * (omega_a - omega_c)
  double theta = 0.0;          // (omega_c - omega_L) / kappa
};

// Drive and detunings of one run in physical units.
struct PhysicalDrive {
  double eta = 0.0;                  // cavity drive amplitude [1/s]
  double atom_cavity_detuning = 0.0; // omega_a - omega_c [rad/s]
  double cavity_laser_offset = 0.0;  // omega_c - omega_L [rad/s]
};

/// Validates the system and computes g, kappa, n0, C0, C. Throws
/// std::invalid_argument on non-physical input.
DerivedParams derive_params(const PhysicalSystem& sys);

DimensionlessPoint to_dimensionless(const PhysicalSystem& sys, double eta,
                                    double atom_cavity_detuning,
                                    double cavity_laser_offset);

PhysicalDrive from_dimensionless(const PhysicalSystem& sys,
                                 const DimensionlessPoint& point);

/// I_in = beta C^2 / 4.
double drive_for_beta(double cooperativity, double beta);

/// beta = 4 I_in / C^2.
double beta_for_drive(double cooperativity, double drive);

/// Resonant operating point (delta = theta = 0) at the system's beta.
DimensionlessPoint operating_point(const PhysicalSystem& sys);

}  // namespace cavlock
