#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

#include "cavlock/steady_state.hpp"

namespace cavlock {

// Scaled equations of motion, tau = t/T2, x = <a>/sqrt(n0), s = sigma_-,
// z = sigma_z:
//
//   dx/dtau = K [ y - (1 + i theta) x ] + K C (2/sqrt(gamma T2)) s
//   ds/dtau = -(1 + i delta) s + (sqrt(gamma T2)/2) x z
//   dz/dtau = -gamma T2 (1 + z) - 2 sqrt(gamma T2) Re(x conj(s))
//
// with K = kappa T2 and y = sqrt(I_in) real. Fixed points coincide with the
// solve_branches solutions for every K; that agreement pins the dipole
// scaling once and for all.
struct FlowParams {
  double cooperativity = 0.0;
  double drive = 0.0;  // I_in
  double delta = 0.0;
  double theta = 0.0;
  double stiffness = 1e3;  // K = kappa T2 > 0
  double gamma_t2 = 2.0;   // gamma T2, in (0, 2]; 2 is the radiative limit
};

FlowParams make_flow(const DimensionlessPoint& point, double stiffness = 1e3,
                     double gamma_t2 = 2.0);

// Five real degrees of freedom: (Re x, Im x, Re s, Im s, z).
struct SemiclassicalState {
  std::complex<double> field;   // x
  std::complex<double> dipole;  // sigma_-
  double inversion = -1.0;      // sigma_z in [-1, 1]

  std::array<double, 5> to_array() const;
  static SemiclassicalState from_array(const std::array<double, 5>& v);
};

SemiclassicalState vacuum_state();

/// Fixed-point state of a steady-state branch in the flow's units.
SemiclassicalState branch_state(const SteadyStateBranch& branch,
                                const FlowParams& fp);

SemiclassicalState flow_rhs(const SemiclassicalState& state,
                            const FlowParams& fp);

/// Euclidean norm of the 5-component flow vector.
double rhs_norm(const SemiclassicalState& state, const FlowParams& fp);

/// Analytic linearization of the flow; valid at any state.
Eigen::Matrix<double, 5, 5> flow_jacobian_at(const SemiclassicalState& state,
                                             const FlowParams& fp);

/// Linearization at a fixed point. Throws std::invalid_argument when the
/// state does not satisfy the flow to within 1e-8 * max(1, K).
Eigen::Matrix<double, 5, 5> jacobian(const SemiclassicalState& state,
                                     const FlowParams& fp);

// Fills stability verdicts and eigenvalues for every branch. A branch is
// stable when all eigenvalue real parts are below -1e-9 K, unstable when any
// exceeds +1e-9 K, marginal inside the band.
BranchSet classify_stability(BranchSet set, const FlowParams& fp);

struct Trajectory {
  std::vector<double> tau;
  std::vector<SemiclassicalState> states;
};

// Adaptive linearly-implicit (L-stable Rosenbrock 2(3)) integration,
// suitable for stiffness K up to 1e6. tol is used as both relative and
// absolute error weight. Throws std::invalid_argument for tol outside
// [1e-12, 1e-3] and std::runtime_error on step-size underflow.
Trajectory integrate(const SemiclassicalState& initial, const FlowParams& fp,
                     double tau_end, double tol);

/// Endpoint of integrate() without storing the path.
SemiclassicalState evolve(const SemiclassicalState& initial,
                          const FlowParams& fp, double tau_end, double tol);

struct HysteresisOptions {
  double drive_min = 0.0;  // <= 0 selects a default bracketing the window
  double drive_max = 0.0;
  int steps_per_leg = 400;
  double dwell = 60.0;  // tau spent at each drive step
  double tol = 1e-8;
};

struct HysteresisPoint {
  double drive = 0.0;
  double intensity = 0.0;
  int direction = 0;  // +1 up-leg, -1 down-leg
};

struct HysteresisResult {
  std::vector<HysteresisPoint> points;
  bool has_loop = false;
  double up_jump_drive = 0.0;
  double down_jump_drive = 0.0;
  // Set when the dwell is too short against the atomic relaxation time for
  // a quasi-static reading of the sweep.
  bool quasi_static_warning = false;
};

// Quasi-static drive ramp, up then down, on resonance. With C > 8 the
// intensity jumps at the two folds; the traces between them form the
// hysteresis loop.
HysteresisResult hysteresis_sweep(double cooperativity,
                                  const HysteresisOptions& options = {},
                                  double stiffness = 1e3,
                                  double gamma_t2 = 2.0);

}  // namespace cavlock
