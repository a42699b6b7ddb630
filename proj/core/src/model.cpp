#include "cavlock/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cavlock {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("PhysicalSystem: ") + what);
}

}  // namespace

DerivedParams derive_params(const PhysicalSystem& sys) {
  require(sys.wavelength_m > 0.0, "wavelength must be positive");
  require(sys.gamma > 0.0, "gamma must be positive");
  require(sys.dipole_decay > 0.0, "dipole decay rate must be positive");
  require(sys.atom_number >= 0.0, "atom number must be non-negative");
  require(sys.finesse > 0.0, "finesse must be positive");
  require(sys.cavity_length_m > 0.0, "cavity length must be positive");
  require(sys.mode_area_m2 > 0.0, "mode area must be positive");
  require(sys.quantum_efficiency > 0.0 && sys.quantum_efficiency <= 1.0,
          "quantum efficiency must be in (0, 1]");
  require(sys.dipole_decay >= 0.5 * sys.gamma,
          "dipole decay below the radiative limit gamma/2");

  using constants::pi;
  using constants::speed_of_light;

  const double mode_volume = sys.cavity_length_m * sys.mode_area_m2;
  // g^2 = 3 lambda^2 c gamma / (8 pi V_eff), with the dipole moment
  // eliminated through |p|^2 = 3 pi eps0 hbar c^3 gamma / omega^3.
  const double g_sq = 3.0 * sys.wavelength_m * sys.wavelength_m *
                      speed_of_light * sys.gamma / (8.0 * pi * mode_volume);

  DerivedParams out;
  out.coupling = std::sqrt(g_sq);
  out.kappa = pi * speed_of_light / (2.0 * sys.cavity_length_m * sys.finesse);
  out.saturation_photons = sys.gamma * sys.dipole_decay / (4.0 * g_sq);
  out.single_atom_cooperativity = g_sq / (out.kappa * sys.dipole_decay);
  out.cooperativity = sys.atom_number * out.single_atom_cooperativity;
  out.laser_omega = 2.0 * pi * speed_of_light / sys.wavelength_m;
  return out;
}

DimensionlessPoint to_dimensionless(const PhysicalSystem& sys, double eta,
                                    double atom_cavity_detuning,
                                    double cavity_laser_offset) {
  const DerivedParams d = derive_params(sys);
  DimensionlessPoint p;
  p.cooperativity = d.cooperativity;
  p.drive = eta * eta / (d.saturation_photons * d.kappa * d.kappa);
  p.delta = atom_cavity_detuning / sys.dipole_decay;
  p.theta = cavity_laser_offset / d.kappa;
  return p;
}

PhysicalDrive from_dimensionless(const PhysicalSystem& sys,
                                 const DimensionlessPoint& point) {
  const DerivedParams d = derive_params(sys);
  PhysicalDrive out;
  out.eta = d.kappa * std::sqrt(point.drive * d.saturation_photons);
  out.atom_cavity_detuning = point.delta * sys.dipole_decay;
  out.cavity_laser_offset = point.theta * d.kappa;
  return out;
}

double drive_for_beta(double cooperativity, double beta) {
  return 0.25 * beta * cooperativity * cooperativity;
}

double beta_for_drive(double cooperativity, double drive) {
  return 4.0 * drive / (cooperativity * cooperativity);
}

DimensionlessPoint operating_point(const PhysicalSystem& sys) {
  const DerivedParams d = derive_params(sys);
  return DimensionlessPoint{d.cooperativity,
                            drive_for_beta(d.cooperativity, sys.beta), 0.0,
                            0.0};
}

}  // namespace cavlock
