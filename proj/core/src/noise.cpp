#include "cavlock/noise.hpp"

#include <fftw3.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cavlock/metrology.hpp"
#include "cavlock/steady_state.hpp"

namespace cavlock {

namespace {

using constants::elementary_charge;
using constants::pi;
using constants::planck;

// splitmix64: out_i = mix(seed + (i+1) * golden). Counter-based, so any
// partitioning of the sample range produces the same stream.
std::uint64_t splitmix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform_open(std::uint64_t seed, std::uint64_t counter) {
  constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
  const std::uint64_t bits = splitmix64(seed + (counter + 1) * golden);
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;  // (0, 1]
}

// One Gaussian per index via Box-Muller (the sine twin is discarded to keep
// the counter mapping one-to-one).
double gaussian(std::uint64_t seed, std::uint64_t index) {
  const double u1 = uniform_open(seed, 2 * index);
  const double u2 = uniform_open(seed, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
}

void validate_sim(const NoiseSimConfig& cfg) {
  if (!(cfg.h0 >= 0.0))
    throw std::invalid_argument("noise: h0 must be >= 0");
  if (!(cfg.sample_rate_hz > 0.0) || !(cfg.duration_s > 0.0))
    throw std::invalid_argument("noise: sample rate and duration must be > 0");
  if (cfg.segments < 1)
    throw std::invalid_argument("noise: segments must be >= 1");

  const double fwhm = 0.5 * pi * cfg.h0;
  const bool rate_ok = cfg.sample_rate_hz > 100.0 * fwhm;
  const bool span_ok = cfg.duration_s * fwhm > 100.0 || cfg.h0 == 0.0;
  if (!rate_ok || !span_ok) {
    std::string msg = "noise: unresolvable line for h0 = " +
                      std::to_string(cfg.h0) + " Hz^2/Hz (FWHM = pi h0/2):";
    if (!rate_ok)
      msg += "\n  violated: sample_rate > 100 * FWHM  (" +
             std::to_string(cfg.sample_rate_hz) + " <= " +
             std::to_string(100.0 * fwhm) + ")";
    if (!span_ok)
      msg += "\n  violated: duration * FWHM > 100  (" +
             std::to_string(cfg.duration_s * fwhm) + " <= 100)";
    throw std::invalid_argument(msg);
  }
}

std::size_t sample_count(const NoiseSimConfig& cfg) {
  const double n = std::round(cfg.sample_rate_hz * cfg.duration_s);
  if (!(n >= 64.0) || n > 1e9)
    throw std::invalid_argument("noise: sample count out of range");
  return static_cast<std::size_t>(n);
}

struct LorentzianFit {
  double amplitude, center, width, offset;  // a/((f-f0)^2 + w^2/4) + b
  double width_err;
  double residual;
};

// Levenberg-Marquardt with analytic Jacobian. The averaged periodogram has
// nearly uniform relative scatter, so unweighted residuals are adequate at
// the tolerances used here.
LorentzianFit fit_lorentzian(const std::vector<double>& f,
                             const std::vector<double>& p) {
  const std::size_t n = f.size();
  const auto max_it = std::max_element(p.begin(), p.end());
  const std::size_t peak = std::distance(p.begin(), max_it);

  std::vector<double> sorted = p;
  std::nth_element(sorted.begin(), sorted.begin() + n / 4, sorted.end());
  double b = sorted[n / 4];
  double f0 = f[peak];
  const double half = 0.5 * (*max_it + b);
  double w = 0.0;
  for (std::size_t i = peak; i < n; ++i) {
    if (p[i] < half) {
      w = 2.0 * (f[i] - f0);
      break;
    }
  }
  const double df = n > 1 ? f[1] - f[0] : 1.0;
  if (w <= 0.0) w = 4.0 * df;
  double a = (*max_it - b) * 0.25 * w * w;

  Eigen::VectorXd params(4);
  params << a, f0, w, b;

  double lambda = 1e-3;
  double prev_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd residual(n);
  Eigen::MatrixXd jac(n, 4);

  const auto eval = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r,
                        Eigen::MatrixXd* j) {
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (f[i] - q(1)) * (f[i] - q(1)) + 0.25 * q(2) * q(2);
      const double model = q(0) / d + q(3);
      r(i) = model - p[i];
      cost += r(i) * r(i);
      if (j) {
        (*j)(i, 0) = 1.0 / d;
        (*j)(i, 1) = 2.0 * q(0) * (f[i] - q(1)) / (d * d);
        (*j)(i, 2) = -0.5 * q(0) * q(2) / (d * d);
        (*j)(i, 3) = 1.0;
      }
    }
    return cost;
  };

  double cost = eval(params, residual, &jac);
  for (int it = 0; it < 200; ++it) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * residual;
    Eigen::MatrixXd damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal();
    const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
    if (!step.allFinite()) break;

    Eigen::VectorXd trial = params + step;
    Eigen::VectorXd trial_res(n);
    const double trial_cost = eval(trial, trial_res, nullptr);
    if (trial_cost < cost) {
      params = trial;
      residual = trial_res;
      prev_cost = cost;
      cost = eval(params, residual, &jac);
      lambda = std::max(lambda * 0.3, 1e-12);
      if (std::abs(prev_cost - cost) < 1e-14 * (cost + 1e-300)) break;
    } else {
      lambda *= 3.0;
      if (lambda > 1e12) break;
    }
  }

  if (!params.allFinite() || !(cost >= 0.0)) {
    throw std::runtime_error(
        "lineshape fit failed: non-finite parameters, residual cost = " +
        std::to_string(cost));
  }

  LorentzianFit out;
  out.amplitude = params(0);
  out.center = params(1);
  out.width = std::abs(params(2));
  out.offset = params(3);

  const double dof = static_cast<double>(n) - 4.0;
  const double var = dof > 0 ? cost / dof : 0.0;
  const Eigen::MatrixXd cov =
      (jac.transpose() * jac)
          .ldlt()
          .solve(Eigen::MatrixXd::Identity(4, 4)) * var;
  out.width_err = std::sqrt(std::max(cov(2, 2), 0.0));

  double data_norm = 0.0;
  for (double v : p) data_norm += v * v;
  out.residual = data_norm > 0.0 ? std::sqrt(cost / data_norm) : 0.0;
  if (!(out.width > 0.0) || !std::isfinite(out.residual))
    throw std::runtime_error(
        "lineshape fit failed: degenerate width, residual norm = " +
        std::to_string(out.residual));
  return out;
}

}  // namespace

std::string_view noise_rng_name() { return "splitmix64-boxmuller-v1"; }

ShotNoise shot_noise_psd(const HomodyneConfig& cfg) {
  if (!(cfg.lo_power_w >= 0.0) || !(cfg.signal_power_w >= 0.0))
    throw std::invalid_argument("homodyne: powers must be >= 0");
  if (!(cfg.optical_freq_hz > 0.0))
    throw std::invalid_argument("homodyne: optical frequency must be > 0");
  if (!(cfg.quantum_efficiency >= 0.0 && cfg.quantum_efficiency <= 1.0))
    throw std::invalid_argument("homodyne: quantum efficiency in [0, 1]");

  ShotNoise out;
  out.psd_a2_hz = elementary_charge * elementary_charge *
                  cfg.quantum_efficiency * cfg.lo_power_w /
                  (planck * cfg.optical_freq_hz);
  out.lo_dominant = cfg.lo_power_w >= 100.0 * cfg.signal_power_w;
  return out;
}

double frequency_error_psd(const HomodyneConfig& cfg) {
  if (cfg.phase_slope_rad_per_hz == 0.0)
    throw std::invalid_argument("homodyne: phase slope must be nonzero");
  if (!(cfg.signal_power_w > 0.0))
    throw std::invalid_argument("homodyne: signal power must be > 0");
  if (!(cfg.quantum_efficiency > 0.0))
    throw std::invalid_argument("homodyne: quantum efficiency must be > 0");
  const double slope_sq =
      cfg.phase_slope_rad_per_hz * cfg.phase_slope_rad_per_hz;
  return planck * cfg.optical_freq_hz /
         (4.0 * cfg.quantum_efficiency * cfg.signal_power_w * slope_sq);
}

double white_noise_level(const HomodyneConfig& cfg) {
  return 4.0 * frequency_error_psd(cfg);
}

std::vector<std::complex<double>> synthesize_locked_field(
    const NoiseSimConfig& cfg) {
  validate_sim(cfg);
  const std::size_t n = sample_count(cfg);
  const double dt = 1.0 / cfg.sample_rate_hz;
  const double sigma = std::sqrt(0.25 * cfg.h0 * cfg.sample_rate_hz);

  std::vector<std::complex<double>> field(n);
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    field[i] = std::polar(1.0, phase);
    phase += 2.0 * pi * sigma * gaussian(cfg.seed, i) * dt;
  }
  return field;
}

Periodogram averaged_periodogram(std::span<const std::complex<double>> series,
                                 double sample_rate_hz, int segments) {
  if (segments < 1)
    throw std::invalid_argument("periodogram: segments must be >= 1");
  const std::size_t len = series.size() / static_cast<std::size_t>(segments);
  if (len < 16)
    throw std::invalid_argument(
        "periodogram: fewer than 16 samples per segment");

  std::vector<std::complex<double>> buf(len);
  std::vector<double> acc(len, 0.0);
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(len), reinterpret_cast<fftw_complex*>(buf.data()),
      reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
      FFTW_ESTIMATE);

  for (int seg = 0; seg < segments; ++seg) {
    const auto* src = series.data() + static_cast<std::size_t>(seg) * len;
    std::complex<double> mean = 0.0;
    for (std::size_t i = 0; i < len; ++i) mean += src[i];
    mean /= static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i) buf[i] = src[i] - mean;
    fftw_execute(plan);
    for (std::size_t i = 0; i < len; ++i) acc[i] += std::norm(buf[i]);
  }
  fftw_destroy_plan(plan);

  // |X_k|^2 dt / L per segment, frequencies shifted to ascending order.
  const double scale =
      1.0 / (static_cast<double>(segments) * static_cast<double>(len) *
             sample_rate_hz);
  const double df = sample_rate_hz / static_cast<double>(len);
  const std::size_t half = len / 2;

  Periodogram out;
  out.freq_hz.resize(len);
  out.psd.resize(len);
  for (std::size_t i = 0; i < len; ++i) {
    const std::size_t k = (i + half) % len;  // negative frequencies first
    const double f = (static_cast<double>(i) - static_cast<double>(half)) * df;
    out.freq_hz[i] = f;
    out.psd[i] = acc[k] * scale;
  }
  return out;
}

LineshapeEstimate estimate_lineshape(
    std::span<const std::complex<double>> series, const NoiseSimConfig& cfg) {
  if (series.size() < 64)
    throw std::invalid_argument("lineshape: series too short");
  for (const auto& v : series) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw std::runtime_error(
          "lineshape fit failed: non-finite samples in input series");
  }

  LineshapeEstimate out;
  out.spectrum = averaged_periodogram(series, cfg.sample_rate_hz,
                                      cfg.segments);
  // Mean removal zeroes the f = 0 bin by construction; it carries no
  // information, so keep it out of the fit.
  std::vector<double> fit_freq, fit_psd;
  fit_freq.reserve(out.spectrum.freq_hz.size());
  fit_psd.reserve(out.spectrum.psd.size());
  for (std::size_t i = 0; i < out.spectrum.freq_hz.size(); ++i) {
    if (out.spectrum.freq_hz[i] == 0.0) continue;
    fit_freq.push_back(out.spectrum.freq_hz[i]);
    fit_psd.push_back(out.spectrum.psd[i]);
  }
  const LorentzianFit fit = fit_lorentzian(fit_freq, fit_psd);
  out.fwhm_hz = fit.width;
  out.fwhm_err_hz = fit.width_err;
  out.center_hz = fit.center;
  out.fit_residual = fit.residual;

  // Phase structure function from unwrapped increments; valid while the
  // per-step phase kick stays below pi, which the resolvability bounds
  // guarantee for synthesized input.
  const double dt = 1.0 / cfg.sample_rate_hz;
  std::vector<double> phase(series.size());
  phase[0] = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    phase[i] = phase[i - 1] + std::arg(series[i] * std::conj(series[i - 1]));
  }
  const std::size_t max_lag =
      std::min<std::size_t>(64, series.size() / 16);
  double num = 0.0, den = 0.0;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double acc = 0.0;
    const std::size_t count = series.size() - lag;
    for (std::size_t i = 0; i < count; ++i) {
      const double d = phase[i + lag] - phase[i];
      acc += d * d;
    }
    const double tau = static_cast<double>(lag) * dt;
    const double value = acc / static_cast<double>(count);
    out.lag_s.push_back(tau);
    out.structure.push_back(value);
    num += tau * value;
    den += tau * tau;
  }
  out.structure_slope = den > 0.0 ? num / den : 0.0;
  return out;
}

LockSimResult end_to_end_lock_sim(const PhysicalSystem& sys, double beta,
                                  NoiseSimConfig cfg, double h0_scale) {
  if (!(h0_scale > 0.0))
    throw std::invalid_argument("lock sim: h0 scale must be > 0");
  const DerivedParams d = derive_params(sys);
  const DimensionlessPoint point{d.cooperativity,
                                 drive_for_beta(d.cooperativity, beta), 0.0,
                                 0.0};
  const double gamma_t2 = sys.gamma / sys.dipole_decay;
  const SteadyStateBranch top = solve_branches(point, gamma_t2).top();

  HomodyneConfig hom;
  hom.signal_power_w = 2.0 * constants::hbar * d.laser_omega * d.kappa *
                       d.saturation_photons * top.intensity;
  hom.lo_power_w = 1e4 * hom.signal_power_w;
  hom.quantum_efficiency = sys.quantum_efficiency;
  hom.optical_freq_hz = d.laser_omega / (2.0 * pi);
  hom.phase_slope_rad_per_hz =
      2.0 * pi * sys.t2() *
      phase_slope_exact_scaled(d.cooperativity, top.inversion);

  LockSimResult out;
  out.h0 = white_noise_level(hom) * h0_scale;
  out.predicted_fwhm_hz = 0.5 * pi * out.h0;
  cfg.h0 = out.h0;
  const auto series = synthesize_locked_field(cfg);
  out.estimate = estimate_lineshape(series, cfg);
  return out;
}

}  // namespace cavlock
