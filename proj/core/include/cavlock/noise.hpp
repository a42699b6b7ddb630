#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "cavlock/model.hpp"

namespace cavlock {

// Balanced homodyne readout of the transmitted light.
struct HomodyneConfig {
  double signal_power_w = 0.0;
  double lo_power_w = 0.0;
  double quantum_efficiency = 1.0;
  double optical_freq_hz = 0.0;
  double lo_phase_rad = 0.5 * constants::pi;  // quadrature readout
  double phase_slope_rad_per_hz = 0.0;        // d(phi)/d(nu) at the lock point
};

struct ShotNoise {
  double psd_a2_hz = 0.0;  // two-sided photocurrent PSD
  // False when P_LO < 100 P_sig, where dropping P_sig from P_sig + P_LO
  // stops being a good approximation.
  bool lo_dominant = true;
};

/// Two-sided photocurrent shot noise, e^2 eta_qe P_LO / (h nu) [A^2/Hz].
ShotNoise shot_noise_psd(const HomodyneConfig& cfg);

/// Two-sided PSD of the lock frequency error,
/// h nu / (4 eta_qe P_sig (dphi/dnu)^2) [Hz^2/Hz]. Rejects zero slope.
double frequency_error_psd(const HomodyneConfig& cfg);

/// White-noise coefficient h0 = 4 x two-sided PSD. The locked line is
/// Lorentzian with FWHM = pi h0 / 2.
double white_noise_level(const HomodyneConfig& cfg);

// Monte-Carlo synthesis of a field with white frequency noise. h0 follows
// the same bookkeeping as white_noise_level: the per-sample frequency
// variance is h0 * rate / 4 (two-sided level h0/4 across the band), the
// phase accumulates as dphi = 2 pi dnu dt, and the resulting line has
// FWHM = pi h0 / 2 and phase structure function D(tau) = pi^2 h0 tau.
struct NoiseSimConfig {
  double h0 = 0.0;  // Hz^2/Hz
  double sample_rate_hz = 0.0;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  int segments = 64;  // periodogram averaging
};

/// Baseband field exp(i dphi(t)); deterministic per seed, independent of
/// how the work is partitioned (counter-based generator, see
/// noise_rng_name()).
std::vector<std::complex<double>> synthesize_locked_field(
    const NoiseSimConfig& cfg);

struct Periodogram {
  std::vector<double> freq_hz;  // ascending, two-sided
  std::vector<double> psd;
};

/// Mean-removed, windowless segment-averaged periodogram (the lines being
/// fit are Lorentzian, not narrowband).
Periodogram averaged_periodogram(std::span<const std::complex<double>> series,
                                 double sample_rate_hz, int segments);

struct LineshapeEstimate {
  double fwhm_hz = 0.0;
  double fwhm_err_hz = 0.0;  // 1-sigma fit uncertainty
  double center_hz = 0.0;
  double fit_residual = 0.0;  // residual norm / data norm
  Periodogram spectrum;
  // Phase structure function D(tau) and its through-origin slope (= pi^2 h0
  // for white frequency noise) -- an estimate independent of the fit.
  std::vector<double> lag_s;
  std::vector<double> structure;
  double structure_slope = 0.0;
};

/// Lorentzian least-squares fit of the averaged periodogram plus the
/// structure-function diagnostic. Throws std::runtime_error with residual
/// diagnostics when the fit fails to converge.
LineshapeEstimate estimate_lineshape(
    std::span<const std::complex<double>> series, const NoiseSimConfig& cfg);

struct LockSimResult {
  LineshapeEstimate estimate;
  double h0 = 0.0;                // after scaling
  double predicted_fwhm_hz = 0.0; // pi h0 / 2
};

/// Full chain: lock budget -> frequency-error PSD -> synthesis -> lineshape.
/// h0_scale rescales the physical h0 so sub-mHz lines become resolvable in
/// desk-scale runs; the predicted FWHM scales identically.
LockSimResult end_to_end_lock_sim(const PhysicalSystem& sys, double beta,
                                  NoiseSimConfig cfg, double h0_scale = 1.0);

/// Identifier of the noise generator, recorded in output metadata.
std::string_view noise_rng_name();

}  // namespace cavlock
