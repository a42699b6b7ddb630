#include "cavlock/dynamics.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cavlock {

namespace {

using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

void validate(const FlowParams& fp) {
  if (!(fp.stiffness > 0.0))
    throw std::invalid_argument("FlowParams: stiffness K must be positive");
  if (!(fp.gamma_t2 > 0.0 && fp.gamma_t2 <= 2.0))
    throw std::invalid_argument("FlowParams: gamma_t2 must be in (0, 2]");
  if (!(fp.drive >= 0.0))
    throw std::invalid_argument("FlowParams: drive must be >= 0");
}

Vec5 rhs_vec(const Vec5& v, const FlowParams& fp) {
  const double k = fp.stiffness;
  const double root_g = std::sqrt(fp.gamma_t2);
  const double g1 = 2.0 * fp.cooperativity / root_g;  // dipole -> field
  const double g2 = 0.5 * root_g;                     // field -> dipole
  const double g3 = 2.0 * root_g;                     // power -> inversion
  const double y = std::sqrt(fp.drive);

  const double xr = v(0), xi = v(1), sr = v(2), si = v(3), z = v(4);
  Vec5 f;
  f(0) = k * (y - xr + fp.theta * xi + g1 * sr);
  f(1) = k * (-xi - fp.theta * xr + g1 * si);
  f(2) = -sr + fp.delta * si + g2 * xr * z;
  f(3) = -si - fp.delta * sr + g2 * xi * z;
  f(4) = -fp.gamma_t2 * (1.0 + z) - g3 * (xr * sr + xi * si);
  return f;
}

Mat5 jacobian_vec(const Vec5& v, const FlowParams& fp) {
  const double k = fp.stiffness;
  const double root_g = std::sqrt(fp.gamma_t2);
  const double g1 = 2.0 * fp.cooperativity / root_g;
  const double g2 = 0.5 * root_g;
  const double g3 = 2.0 * root_g;

  const double xr = v(0), xi = v(1), sr = v(2), si = v(3), z = v(4);
  Mat5 j = Mat5::Zero();
  j(0, 0) = -k;
  j(0, 1) = k * fp.theta;
  j(0, 2) = k * g1;
  j(1, 0) = -k * fp.theta;
  j(1, 1) = -k;
  j(1, 3) = k * g1;
  j(2, 0) = g2 * z;
  j(2, 2) = -1.0;
  j(2, 3) = fp.delta;
  j(2, 4) = g2 * xr;
  j(3, 1) = g2 * z;
  j(3, 2) = -fp.delta;
  j(3, 3) = -1.0;
  j(3, 4) = g2 * xi;
  j(4, 0) = -g3 * sr;
  j(4, 1) = -g3 * si;
  j(4, 2) = -g3 * xr;
  j(4, 3) = -g3 * xi;
  j(4, 4) = -fp.gamma_t2;
  return j;
}

Vec5 to_vec(const SemiclassicalState& s) {
  Vec5 v;
  v << s.field.real(), s.field.imag(), s.dipole.real(), s.dipole.imag(),
      s.inversion;
  return v;
}

SemiclassicalState from_vec(const Vec5& v) {
  SemiclassicalState s;
  s.field = {v(0), v(1)};
  s.dipole = {v(2), v(3)};
  s.inversion = v(4);
  return s;
}

// One adaptive step of the two-stage L-stable Rosenbrock pair (the ode23s
// scheme): W = I - h d J with d = 1/(2 + sqrt(2)), third-order companion for
// the error estimate.
struct Stepper {
  const FlowParams& fp;
  double tol;

  double error_norm(const Vec5& err, const Vec5& y0, const Vec5& y1) const {
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double scale =
          tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
      const double r = err(i) / scale;
      acc += r * r;
    }
    return std::sqrt(acc / 5.0);
  }

  // Returns true and updates (y, f) on acceptance; h is adapted in place.
  bool try_step(Vec5& y, Vec5& f, double& h) const {
    static const double d = 1.0 / (2.0 + std::sqrt(2.0));
    static const double e32 = 6.0 + std::sqrt(2.0);

    const Mat5 j = jacobian_vec(y, fp);
    const Mat5 w = Mat5::Identity() - h * d * j;
    const Eigen::PartialPivLU<Mat5> lu(w);

    const Vec5 k1 = lu.solve(f);
    const Vec5 f1 = rhs_vec(y + 0.5 * h * k1, fp);
    const Vec5 k2 = lu.solve(f1 - k1) + k1;
    const Vec5 y1 = y + h * k2;
    const Vec5 f2 = rhs_vec(y1, fp);
    const Vec5 k3 = lu.solve(f2 - e32 * (k2 - f1) - 2.0 * (k1 - f));
    const Vec5 err = (h / 6.0) * (k1 - 2.0 * k2 + k3);

    const double norm = error_norm(err, y, y1);
    if (!std::isfinite(norm) || norm > 1.0) {
      h *= std::max(0.1, 0.8 * std::pow(std::max(norm, 1e-10), -1.0 / 3.0));
      return false;
    }
    y = y1;
    f = f2;
    h *= std::min(5.0, std::max(0.2, 0.8 * std::pow(std::max(norm, 1e-10),
                                                    -1.0 / 3.0)));
    return true;
  }
};

struct RunResult {
  Vec5 state;
  double tau = 0.0;
};

// Integrates to tau_end, optionally recording, throwing on step underflow.
RunResult run(Vec5 y, const FlowParams& fp, double tau_end, double tol,
              Trajectory* record) {
  Stepper stepper{fp, tol};
  double tau = 0.0;
  Vec5 f = rhs_vec(y, fp);
  double h = std::min(tau_end, 1e-4 / fp.stiffness);
  const double h_min = std::max(tau_end * 1e-14, 1e-300);

  if (record) {
    record->tau.push_back(0.0);
    record->states.push_back(from_vec(y));
  }
  while (tau < tau_end) {
    h = std::min(h, tau_end - tau);
    if (h < h_min)
      throw std::runtime_error("integrate: step size underflow at tau = " +
                               std::to_string(tau));
    const double h_attempt = h;
    if (!stepper.try_step(y, f, h)) continue;
    tau += h_attempt;
    if (record) {
      record->tau.push_back(tau);
      record->states.push_back(from_vec(y));
    }
  }
  return {y, tau};
}

void validate_tol(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-3))
    throw std::invalid_argument("integrate: tol must be in [1e-12, 1e-3]");
}

}  // namespace

FlowParams make_flow(const DimensionlessPoint& point, double stiffness,
                     double gamma_t2) {
  FlowParams fp;
  fp.cooperativity = point.cooperativity;
  fp.drive = point.drive;
  fp.delta = point.delta;
  fp.theta = point.theta;
  fp.stiffness = stiffness;
  fp.gamma_t2 = gamma_t2;
  validate(fp);
  return fp;
}

std::array<double, 5> SemiclassicalState::to_array() const {
  return {field.real(), field.imag(), dipole.real(), dipole.imag(), inversion};
}

SemiclassicalState SemiclassicalState::from_array(
    const std::array<double, 5>& v) {
  return {{v[0], v[1]}, {v[2], v[3]}, v[4]};
}

SemiclassicalState vacuum_state() { return {{0.0, 0.0}, {0.0, 0.0}, -1.0}; }

SemiclassicalState branch_state(const SteadyStateBranch& branch,
                                const FlowParams& fp) {
  SemiclassicalState s;
  s.field = branch.field;
  s.inversion = branch.inversion;
  // Re-derive the dipole for this flow's gamma_t2 so the state is a fixed
  // point regardless of the value used in solve_branches.
  s.dipole = 0.5 * std::sqrt(fp.gamma_t2) * branch.field * branch.inversion /
             std::complex<double>(1.0, fp.delta);
  return s;
}

SemiclassicalState flow_rhs(const SemiclassicalState& state,
                            const FlowParams& fp) {
  validate(fp);
  return from_vec(rhs_vec(to_vec(state), fp));
}

double rhs_norm(const SemiclassicalState& state, const FlowParams& fp) {
  validate(fp);
  return rhs_vec(to_vec(state), fp).norm();
}

Mat5 flow_jacobian_at(const SemiclassicalState& state, const FlowParams& fp) {
  validate(fp);
  return jacobian_vec(to_vec(state), fp);
}

Mat5 jacobian(const SemiclassicalState& state, const FlowParams& fp) {
  validate(fp);
  const double residual = rhs_vec(to_vec(state), fp).norm();
  if (!(residual < 1e-8 * std::max(1.0, fp.stiffness)))
    throw std::invalid_argument(
        "jacobian: state is not a fixed point (|rhs| = " +
        std::to_string(residual) + ")");
  return jacobian_vec(to_vec(state), fp);
}

BranchSet classify_stability(BranchSet set, const FlowParams& fp) {
  validate(fp);
  const double band = 1e-9 * fp.stiffness;
  for (SteadyStateBranch& branch : set.branches) {
    const Mat5 j = jacobian_vec(to_vec(branch_state(branch, fp)), fp);
    const Eigen::EigenSolver<Mat5> solver(j, /*computeEigenvectors=*/false);

    std::array<std::complex<double>, 5> eigs;
    double max_real = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 5; ++k) {
      eigs[k] = solver.eigenvalues()(k);
      max_real = std::max(max_real, eigs[k].real());
    }
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
      return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    branch.eigenvalues = eigs;
    branch.stability = max_real < -band  ? Stability::stable
                       : max_real > band ? Stability::unstable
                                         : Stability::marginal;
  }
  return set;
}

Trajectory integrate(const SemiclassicalState& initial, const FlowParams& fp,
                     double tau_end, double tol) {
  validate(fp);
  validate_tol(tol);
  Trajectory traj;
  run(to_vec(initial), fp, tau_end, tol, &traj);
  return traj;
}

SemiclassicalState evolve(const SemiclassicalState& initial,
                          const FlowParams& fp, double tau_end, double tol) {
  validate(fp);
  validate_tol(tol);
  return from_vec(run(to_vec(initial), fp, tau_end, tol, nullptr).state);
}

HysteresisResult hysteresis_sweep(double cooperativity,
                                  const HysteresisOptions& options,
                                  double stiffness, double gamma_t2) {
  if (!(cooperativity >= 0.0))
    throw std::invalid_argument("hysteresis_sweep: C must be >= 0");
  if (options.steps_per_leg < 2)
    throw std::invalid_argument("hysteresis_sweep: need at least 2 steps");

  double lo = options.drive_min;
  double hi = options.drive_max;
  if (lo <= 0.0 || hi <= 0.0) {
    // Default range brackets the bistable window with a factor-two margin on
    // each side (or the equivalent span when there is no window).
    const auto window = bistability_thresholds(cooperativity);
    if (window) {
      lo = 0.5 * window->lower;
      hi = 2.0 * window->upper;
    } else {
      lo = std::max(1.0, 2.0 * cooperativity);
      hi = std::max(64.0, 0.5 * cooperativity * cooperativity + 64.0);
    }
  }
  if (!(hi > lo && lo > 0.0))
    throw std::invalid_argument("hysteresis_sweep: bad drive range");

  HysteresisResult result;
  result.quasi_static_warning = options.dwell * gamma_t2 < 10.0;

  const int n = options.steps_per_leg;
  std::vector<double> drives(n);
  const double ratio = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) drives[i] = lo * std::exp(ratio * i);

  // Start relaxed onto the low branch at the lowest drive.
  const DimensionlessPoint start{cooperativity, drives[0], 0.0, 0.0};
  FlowParams fp = make_flow(start, stiffness, gamma_t2);
  BranchSet first = solve_branches(start, gamma_t2);
  SemiclassicalState state = branch_state(first.branches.front(), fp);

  const auto leg = [&](bool upward) {
    for (int i = 0; i < n; ++i) {
      const double drive = upward ? drives[i] : drives[n - 1 - i];
      fp.drive = drive;
      state = evolve(state, fp, options.dwell, options.tol);
      result.points.push_back(
          {drive, std::norm(state.field), upward ? +1 : -1});
    }
  };
  leg(true);
  leg(false);

  // A fold crossing shows up as a jump of the settled intensity between
  // consecutive drive steps; smooth single-branch sweeps stay well below
  // the factor-3 threshold at these step sizes.
  const auto detect = [&](int direction, bool up_jump) {
    const double factor = 3.0;
    for (std::size_t i = 1; i < result.points.size(); ++i) {
      const auto& prev = result.points[i - 1];
      const auto& cur = result.points[i];
      if (prev.direction != direction || cur.direction != direction) continue;
      const double a = std::max(prev.intensity, 1e-300);
      const double b = std::max(cur.intensity, 1e-300);
      if (up_jump ? (b / a > factor) : (a / b > factor)) return cur.drive;
    }
    return 0.0;
  };
  result.up_jump_drive = detect(+1, true);
  result.down_jump_drive = detect(-1, false);
  result.has_loop =
      result.up_jump_drive > 0.0 && result.down_jump_drive > 0.0 &&
      result.up_jump_drive > result.down_jump_drive;
  return result;
}

}  // namespace cavlock
