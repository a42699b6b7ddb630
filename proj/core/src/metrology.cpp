#include "cavlock/metrology.hpp"

#include <cmath>
#include <stdexcept>

#include "cavlock/steady_state.hpp"

namespace cavlock {

namespace {

using constants::hbar;
using constants::pi;

void require_beta(double beta) {
  if (!(beta >= 1.0))
    throw std::invalid_argument(
        "metrology: beta must be >= 1 (above the upper bistability "
        "threshold)");
}

// N^2 C0 gamma / 4 == kappa C^2 n0; the left side never touches the cavity
// length, so every budget figure is L-free.
double kappa_c2_n0(const PhysicalSystem& sys, const DerivedParams& d) {
  return 0.25 * sys.atom_number * sys.atom_number *
         d.single_atom_cooperativity * sys.gamma;
}

struct OperatingBranch {
  double intensity = 0.0;  // u at I_in = beta C^2 / 4
  double sigma_z = 0.0;
  double dipole_sq = 0.0;  // |sigma_-|^2 with the system's gamma T2
};

OperatingBranch saturated_branch(const PhysicalSystem& sys,
                                 const DerivedParams& d, double beta) {
  const DimensionlessPoint point{d.cooperativity,
                                 drive_for_beta(d.cooperativity, beta), 0.0,
                                 0.0};
  const double gamma_t2 = sys.gamma / sys.dipole_decay;
  const BranchSet set = solve_branches(point, gamma_t2);
  const SteadyStateBranch& top = set.top();
  return {top.intensity, top.inversion, std::norm(top.dipole)};
}

}  // namespace

double signal_power(const PhysicalSystem& sys, double beta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  return hbar * d.laser_omega * kappa_c2_n0(sys, d) * beta / 2.0;
}

double snr(const PhysicalSystem& sys, double beta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  return std::sqrt(sys.quantum_efficiency * kappa_c2_n0(sys, d) * beta);
}

double phase_slope_exact_scaled(double cooperativity, double sigma_z) {
  const double cz = cooperativity * sigma_z;
  return cz / (cz - 1.0);
}

PhaseSlope phase_slope(const PhysicalSystem& sys, double beta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  const OperatingBranch op = saturated_branch(sys, d, beta);
  PhaseSlope out;
  out.exact_s = sys.t2() * phase_slope_exact_scaled(d.cooperativity,
                                                    op.sigma_z);
  out.approx_s = 4.0 * sys.t2() / (beta * d.cooperativity);
  return out;
}

Linewidth quantum_limited_linewidth(const PhysicalSystem& sys, double beta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  const OperatingBranch op = saturated_branch(sys, d, beta);

  // Power actually leaking out at the solved intensity, 2 hbar w kappa n0 u,
  // and the exact slope; together they track the closed form to O(1/C^2).
  const double power = 2.0 * hbar * d.laser_omega * d.kappa *
                       d.saturation_photons * op.intensity;
  const double snr_sq = sys.quantum_efficiency * 2.0 * power /
                        (hbar * d.laser_omega);
  const double slope =
      sys.t2() * phase_slope_exact_scaled(d.cooperativity, op.sigma_z);

  Linewidth out;
  out.branch_hz = pi / (snr_sq * 4.0 * pi * pi * slope * slope);
  out.closed_hz = d.single_atom_cooperativity * beta /
                  (16.0 * pi * sys.gamma * sys.t2() * sys.t2() *
                   sys.quantum_efficiency);
  return out;
}

double lock_bandwidth(const PhysicalSystem& sys, double beta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  return kappa_c2_n0(sys, d) * beta;
}

double line_pulling_scaled(double cooperativity, double beta, double t2,
                           double theta) {
  return cooperativity * beta * theta / (8.0 * pi * t2);
}

double line_pulling(const PhysicalSystem& sys, double beta, double theta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  return line_pulling_scaled(d.cooperativity, beta, sys.t2(), theta);
}

double collective_dipole(const PhysicalSystem& sys, double beta) {
  require_beta(beta);
  const DerivedParams d = derive_params(sys);
  const double n = sys.atom_number;
  return (n * n / (d.cooperativity * d.cooperativity)) *
         (sys.t2() * sys.gamma / beta);
}

double active_laser_linewidth(const PhysicalSystem& sys) {
  const DerivedParams d = derive_params(sys);
  return d.single_atom_cooperativity * sys.gamma / pi;
}

LockBudget lock_budget(const PhysicalSystem& sys, double beta,
                       std::string name) {
  LockBudget out;
  out.species = std::move(name);
  out.beta = beta;
  out.signal_power_w = signal_power(sys, beta);
  out.snr_rt_hz = snr(sys, beta);
  const PhaseSlope slope = phase_slope(sys, beta);
  out.phase_slope_s = slope.exact_s;
  out.phase_slope_approx_s = slope.approx_s;
  const Linewidth lw = quantum_limited_linewidth(sys, beta);
  out.linewidth_hz = lw.branch_hz;
  out.linewidth_closed_hz = lw.closed_hz;
  out.lock_bandwidth_hz = lock_bandwidth(sys, beta);
  out.pulling_hz_per_theta = line_pulling(sys, beta, 1.0);
  out.collective_dipole = collective_dipole(sys, beta);
  return out;
}

std::vector<Table1Row> table1(const std::vector<SpeciesRecord>& catalog) {
  constexpr double beta = 2.0;
  std::vector<Table1Row> rows;
  rows.reserve(catalog.size());
  for (const auto& rec : catalog) {
    Table1Row row;
    row.name = rec.name;
    row.single_atom_cooperativity =
        derive_params(rec.system).single_atom_cooperativity;
    row.signal_power_w = signal_power(rec.system, beta);
    row.snr = snr(rec.system, beta);
    row.linewidth_hz = quantum_limited_linewidth(rec.system, beta).closed_hz;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cavlock
