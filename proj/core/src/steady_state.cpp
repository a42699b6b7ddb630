#include "cavlock/steady_state.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavlock {

namespace {

// Relative imaginary part below which a companion eigenvalue is treated as a
// real root. Fold points produce conjugate pairs grazing the axis.
constexpr double kImagTol = 1e-8;

// Relative root separation below which a pair is flagged marginal.
constexpr double kMarginalTol = 1e-6;

struct CubicTerms {
  double m;  // 1 + delta^2
  // Monic coefficients of u^3 + c2 u^2 + c1 u + c0, after dividing the
  // expanded cubic by (1 + theta^2).
  double c2, c1, c0;
};

CubicTerms cubic_terms(const DimensionlessPoint& p) {
  const double c = p.cooperativity;
  const double i = p.drive;
  const double m = 1.0 + p.delta * p.delta;
  const double t = p.theta;
  const double lead = 1.0 + t * t;
  const double cross = t * m - c * p.delta;

  CubicTerms out;
  out.m = m;
  out.c2 = (2.0 * (m + c) + 2.0 * t * cross - i) / lead;
  out.c1 = ((m + c) * (m + c) + cross * cross - 2.0 * i * m) / lead;
  out.c0 = -i * m * m / lead;
  return out;
}

double mismatch(const DimensionlessPoint& p, double u, double* slope) {
  const double s = 1.0 + u + p.delta * p.delta;
  const double a = s + p.cooperativity;
  const double b = p.theta * s - p.cooperativity * p.delta;
  const double q = a * a + b * b;
  if (slope) {
    const double dq = 2.0 * a + 2.0 * p.theta * b;
    *slope = q / (s * s) + u * dq / (s * s) - 2.0 * u * q / (s * s * s);
  }
  return u * q / (s * s) - p.drive;
}

// One to three guarded Newton steps in the drive-mismatch form; keeps the
// best iterate. Near folds the slope vanishes and the guard bails out.
double polish_root(const DimensionlessPoint& p, double u) {
  double best = u;
  double best_res = std::abs(mismatch(p, u, nullptr));
  for (int it = 0; it < 3; ++it) {
    double slope = 0.0;
    const double res = mismatch(p, best, &slope);
    if (slope == 0.0) break;
    const double next = best - res / slope;
    if (!(next >= 0.0) || !std::isfinite(next)) break;
    const double next_res = std::abs(mismatch(p, next, nullptr));
    if (next_res >= best_res) break;
    best = next;
    best_res = next_res;
  }
  return best;
}

SteadyStateBranch make_branch(const DimensionlessPoint& p, double u,
                              double gamma_t2) {
  const double s = 1.0 + u + p.delta * p.delta;
  const std::complex<double> denom =
      1.0 + p.cooperativity * std::complex<double>(1.0, -p.delta) / s +
      std::complex<double>(0.0, p.theta);

  SteadyStateBranch b;
  b.intensity = u;
  b.field = std::sqrt(p.drive) / denom;
  b.inversion = -(1.0 + p.delta * p.delta) / s;
  b.dipole = 0.5 * std::sqrt(gamma_t2) * b.field * b.inversion /
             std::complex<double>(1.0, p.delta);
  return b;
}

}  // namespace

std::string_view to_string(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
    case Stability::unknown: break;
  }
  return "unknown";
}

double drive_mismatch(const DimensionlessPoint& point, double intensity) {
  return mismatch(point, intensity, nullptr);
}

BranchSet solve_branches(const DimensionlessPoint& point, double gamma_t2) {
  if (!(point.drive >= 0.0))
    throw std::invalid_argument("solve_branches: drive must be >= 0");
  if (!(point.cooperativity >= 0.0))
    throw std::invalid_argument("solve_branches: cooperativity must be >= 0");
  if (!(gamma_t2 > 0.0 && gamma_t2 <= 2.0))
    throw std::invalid_argument("solve_branches: gamma_t2 must be in (0, 2]");

  BranchSet out;
  out.point = point;

  if (point.drive == 0.0) {
    out.branches.push_back(make_branch(point, 0.0, gamma_t2));
    return out;
  }

  // Rescale u = alpha v so the companion matrix works near unit magnitude;
  // all roots satisfy 0 <= u <= I_in.
  const CubicTerms t = cubic_terms(point);
  const double alpha = std::max(1.0, point.drive);
  const double c2 = t.c2 / alpha;
  const double c1 = t.c1 / (alpha * alpha);
  const double c0 = t.c0 / (alpha * alpha * alpha);

  Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -c0;
  companion(1, 2) = -c1;
  companion(2, 2) = -c2;
  const Eigen::Vector3cd roots = companion.eigenvalues();

  std::vector<double> real_roots;
  for (int k = 0; k < 3; ++k) {
    const std::complex<double> r = roots(k) * alpha;
    if (std::abs(r.imag()) > kImagTol * (1.0 + std::abs(r.real()))) continue;
    double u = r.real();
    if (u < -1e-10 * alpha) continue;
    u = polish_root(point, std::max(u, 0.0));
    real_roots.push_back(u);
  }
  std::sort(real_roots.begin(), real_roots.end());

  // Drop exact duplicates (a polished conjugate pair can land on one value);
  // keep genuinely split fold pairs so the set still shows the tangency.
  real_roots.erase(std::unique(real_roots.begin(), real_roots.end(),
                               [](double a, double b) {
                                 return b - a <= 8.0 * 2.22e-16 *
                                                     std::max(1.0, std::abs(b));
                               }),
                   real_roots.end());
  if (real_roots.empty()) {
    // A physical solution always exists; fall back to a bracketed bisection
    // over [0, I_in].
    double lo = 0.0, hi = point.drive * (1.0 + 1e-12) + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mismatch(point, mid, nullptr) < 0.0 ? lo : hi) = mid;
    }
    real_roots.push_back(polish_root(point, 0.5 * (lo + hi)));
  }

  for (double u : real_roots)
    out.branches.push_back(make_branch(point, u, gamma_t2));

  for (std::size_t i = 0; i + 1 < out.branches.size(); ++i) {
    const double a = out.branches[i].intensity;
    const double b = out.branches[i + 1].intensity;
    if (b - a <= kMarginalTol * std::max({std::abs(a), std::abs(b), 1e-12})) {
      out.branches[i].stability = Stability::marginal;
      out.branches[i + 1].stability = Stability::marginal;
    }
  }
  return out;
}

std::optional<BistabilityWindow> bistability_thresholds(double cooperativity) {
  if (!(cooperativity >= 0.0))
    throw std::invalid_argument("bistability_thresholds: C must be >= 0");
  const double c = cooperativity;
  const double disc = c * (c - 8.0);
  if (c <= 8.0 || disc <= 0.0) return std::nullopt;

  const double root = std::sqrt(disc);
  const double u_low = 0.5 * ((c - 2.0) - root);   // fold of the low branch
  const double u_high = 0.5 * ((c - 2.0) + root);  // fold of the high branch
  const auto drive_at = [c](double u) {
    const double f = 1.0 + c / (1.0 + u);
    return u * f * f;
  };

  BistabilityWindow w;
  w.lower = drive_at(u_high);
  w.upper = drive_at(u_low);
  w.lower_asymptote = 4.0 * c;
  w.upper_asymptote = 0.25 * c * c;
  w.fold_intensity_at_lower = u_high;
  w.fold_intensity_at_upper = u_low;
  return w;
}

CriticalPoint critical_point() {
  CriticalPoint cp;
  cp.cooperativity = 8.0;
  cp.intensity = 0.5 * (cp.cooperativity - 2.0);
  const double f = 1.0 + cp.cooperativity / (1.0 + cp.intensity);
  cp.drive = cp.intensity * f * f;
  return cp;
}

std::vector<BranchSet> scan_drive(double cooperativity, double delta,
                                  std::span<const double> drives,
                                  double gamma_t2) {
  std::vector<BranchSet> out;
  out.reserve(drives.size());
  for (double drive : drives) {
    out.push_back(solve_branches(
        DimensionlessPoint{cooperativity, drive, delta, 0.0}, gamma_t2));
  }
  return out;
}

std::vector<BranchSet> scan_spectrum(double cooperativity, double drive,
                                     std::span<const double> deltas,
                                     double theta, double gamma_t2) {
  std::vector<BranchSet> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    out.push_back(solve_branches(
        DimensionlessPoint{cooperativity, drive, delta, theta}, gamma_t2));
  }
  return out;
}

SurfaceScan scan_surface(double cooperativity, double drive,
                         std::span<const double> deltas,
                         std::span<const double> thetas) {
  SurfaceScan out;
  out.cooperativity = cooperativity;
  out.drive = drive;
  out.delta.assign(deltas.begin(), deltas.end());
  out.theta.assign(thetas.begin(), thetas.end());
  out.top.reserve(deltas.size() * thetas.size());
  for (double delta : deltas) {
    for (double theta : thetas) {
      BranchSet set = solve_branches(
          DimensionlessPoint{cooperativity, drive, delta, theta});
      out.top.push_back(set.branches.back());
    }
  }
  return out;
}

NormalModeCurves normal_mode_overlay(double cooperativity,
                                     std::span<const double> deltas) {
  if (!(cooperativity >= 0.0))
    throw std::invalid_argument("normal_mode_overlay: C must be >= 0");
  NormalModeCurves out;
  out.delta.assign(deltas.begin(), deltas.end());
  out.upper.reserve(deltas.size());
  out.lower.reserve(deltas.size());
  for (double d : deltas) {
    const double split = std::sqrt(d * d + 4.0 * cooperativity);
    out.upper.push_back(0.5 * (-d + split));
    out.lower.push_back(0.5 * (-d - split));
  }
  return out;
}

double transmitted_phase(const DimensionlessPoint& point,
                         const SteadyStateBranch& branch) {
  const double s = 1.0 + branch.intensity + point.delta * point.delta;
  const std::complex<double> denom =
      1.0 + point.cooperativity * std::complex<double>(1.0, -point.delta) / s +
      std::complex<double>(0.0, point.theta);
  return -std::arg(denom);
}

}  // namespace cavlock
