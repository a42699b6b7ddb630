#include "cavlock/noise.hpp"

#include <numeric>

#include "cavlock/catalog.hpp"
#include "cavlock/metrology.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cavlock;

namespace {

HomodyneConfig sr_homodyne() {
  HomodyneConfig cfg;
  cfg.signal_power_w = 3.31e-15;
  cfg.lo_power_w = 1e-3;
  cfg.optical_freq_hz = 299792458.0 / 698e-9;
  cfg.phase_slope_rad_per_hz = 0.17;
  return cfg;
}

NoiseSimConfig unit_sim(std::uint64_t seed) {
  NoiseSimConfig cfg;
  cfg.h0 = 1.0;
  cfg.sample_rate_hz = 256.0;
  cfg.duration_s = 1024.0;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("shot-noise PSD is e^2 eta P_LO / (h nu)") {
  HomodyneConfig cfg = sr_homodyne();
  const ShotNoise noise = shot_noise_psd(cfg);

  // Independent constants, typed from scratch.
  const double e = 1.602176634e-19;
  const double h = 6.62607015e-34;
  const double nu = 299792458.0 / 698e-9;
  CHECK(oracle::rel_diff(noise.psd_a2_hz, e * e * 1e-3 / (h * nu)) < 1e-12);
  CHECK(noise.lo_dominant);

  SUBCASE("linear in the LO power") {
    cfg.lo_power_w *= 2.0;
    CHECK(oracle::rel_diff(shot_noise_psd(cfg).psd_a2_hz,
                           2.0 * noise.psd_a2_hz) < 1e-12);
  }

  SUBCASE("vanishes with the efficiency") {
    cfg.quantum_efficiency = 0.0;
    CHECK(shot_noise_psd(cfg).psd_a2_hz == 0.0);
  }

  SUBCASE("weak LO is flagged") {
    cfg.lo_power_w = 50.0 * cfg.signal_power_w;
    CHECK(!shot_noise_psd(cfg).lo_dominant);
  }
}

TEST_CASE("frequency-error PSD scalings") {
  HomodyneConfig cfg = sr_homodyne();
  const double base = frequency_error_psd(cfg);
  CHECK(white_noise_level(cfg) == 4.0 * base);

  SUBCASE("quadrupling the signal power quarters the PSD") {
    cfg.signal_power_w *= 4.0;
    CHECK(oracle::rel_diff(frequency_error_psd(cfg), 0.25 * base) < 1e-12);
  }

  SUBCASE("doubling the slope quarters the PSD") {
    cfg.phase_slope_rad_per_hz *= 2.0;
    CHECK(oracle::rel_diff(frequency_error_psd(cfg), 0.25 * base) < 1e-12);
  }

  SUBCASE("zero discriminator slope is rejected") {
    cfg.phase_slope_rad_per_hz = 0.0;
    CHECK_THROWS_AS(frequency_error_psd(cfg), std::invalid_argument);
  }
}

TEST_CASE("budget-driven h0 is consistent with the tabulated linewidth") {
  const PhysicalSystem& sys =
      find_species(builtin_catalog(), "Sr")->system;
  const DerivedParams d = derive_params(sys);
  HomodyneConfig cfg;
  cfg.signal_power_w = signal_power(sys, 2.0);
  cfg.lo_power_w = 1e-3;
  cfg.optical_freq_hz = d.laser_omega / (2.0 * constants::pi);
  cfg.phase_slope_rad_per_hz =
      2.0 * constants::pi * phase_slope(sys, 2.0).exact_s;
  const double fwhm = 0.5 * constants::pi * white_noise_level(cfg);
  CHECK(oracle::rel_diff(fwhm, 4.7e-3) < 0.10);
}

TEST_CASE("synthesis is deterministic and respects h0 = 0") {
  const NoiseSimConfig cfg = unit_sim(42);
  const auto a = synthesize_locked_field(cfg);
  const auto b = synthesize_locked_field(cfg);
  REQUIRE(a.size() == b.size());
  CHECK(a == b);

  NoiseSimConfig quiet = cfg;
  quiet.h0 = 0.0;
  const auto field = synthesize_locked_field(quiet);
  for (std::size_t i = 0; i < field.size(); i += 1000)
    CHECK(field[i] == std::complex<double>(1.0, 0.0));
}

TEST_CASE("unresolvable configurations are rejected with both bounds") {
  NoiseSimConfig cfg = unit_sim(1);
  cfg.sample_rate_hz = 50.0;  // < 100 * FWHM
  CHECK_THROWS_WITH_AS(synthesize_locked_field(cfg),
                       doctest::Contains("sample_rate > 100 * FWHM"),
                       std::invalid_argument);
  cfg = unit_sim(1);
  cfg.duration_s = 10.0;  // duration * FWHM < 100
  CHECK_THROWS_WITH_AS(synthesize_locked_field(cfg),
                       doctest::Contains("duration * FWHM > 100"),
                       std::invalid_argument);
}

TEST_CASE("white frequency noise gives the expected Lorentzian") {
  const NoiseSimConfig cfg = unit_sim(7);
  const auto series = synthesize_locked_field(cfg);
  const LineshapeEstimate est = estimate_lineshape(series, cfg);

  const double expected = 0.5 * constants::pi;  // pi h0 / 2 at h0 = 1
  CHECK(oracle::rel_diff(est.fwhm_hz, expected) < 0.10);
  CHECK(std::abs(est.center_hz) < 0.1);
  CHECK(est.fwhm_err_hz > 0.0);
  CHECK(est.fwhm_err_hz < 0.2 * est.fwhm_hz);
  CHECK(est.fit_residual < 0.5);

  // Structure function D(tau) = pi^2 h0 tau, an estimate independent of the
  // periodogram fit.
  const double pi_sq = constants::pi * constants::pi;
  CHECK(oracle::rel_diff(est.structure_slope, pi_sq) < 0.05);
  REQUIRE(est.lag_s.size() == est.structure.size());
  for (std::size_t i = 0; i < est.lag_s.size(); i += 16)
    CHECK(oracle::rel_diff(est.structure[i], pi_sq * est.lag_s[i]) < 0.10);
}

TEST_CASE("linewidth estimate is linear in h0") {
  double fwhm[2] = {0.0, 0.0};
  const double levels[2] = {0.25, 16.0};
  for (int i = 0; i < 2; ++i) {
    NoiseSimConfig cfg;
    cfg.h0 = levels[i];
    cfg.sample_rate_hz = 256.0 * levels[i];
    cfg.duration_s = 1024.0 / levels[i];
    cfg.seed = 1000 + static_cast<std::uint64_t>(i);
    const auto series = synthesize_locked_field(cfg);
    fwhm[i] = estimate_lineshape(series, cfg).fwhm_hz;
  }
  const double slope = std::log(fwhm[1] / fwhm[0]) /
                       std::log(levels[1] / levels[0]);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("a pure tone pins the resolution floor") {
  NoiseSimConfig cfg;
  cfg.h0 = 0.0;
  cfg.sample_rate_hz = 256.0;
  cfg.duration_s = 64.0;
  cfg.segments = 16;
  std::vector<std::complex<double>> tone(16384);
  for (std::size_t i = 0; i < tone.size(); ++i) {
    tone[i] = std::polar(1.0, 2.0 * constants::pi * 13.0 *
                                  static_cast<double>(i) / 256.0);
  }
  const LineshapeEstimate est = estimate_lineshape(tone, cfg);
  const double resolution = 256.0 / 1024.0;  // fs / segment length
  CHECK(est.center_hz == doctest::Approx(13.0).epsilon(0.01));
  CHECK(est.fwhm_hz < 3.0 * resolution);
}

TEST_CASE("periodogram preserves the synthesized noise variance") {
  const NoiseSimConfig cfg = unit_sim(3);
  const auto field = synthesize_locked_field(cfg);

  // Recover the frequency-noise samples from the phase increments.
  const double dt = 1.0 / cfg.sample_rate_hz;
  std::vector<std::complex<double>> dnu(field.size() - 1);
  for (std::size_t i = 0; i + 1 < field.size(); ++i) {
    dnu[i] = std::arg(field[i + 1] * std::conj(field[i])) /
             (2.0 * constants::pi * dt);
  }
  double mean = 0.0, var = 0.0;
  for (const auto& v : dnu) mean += v.real();
  mean /= static_cast<double>(dnu.size());
  for (const auto& v : dnu)
    var += (v.real() - mean) * (v.real() - mean);
  var /= static_cast<double>(dnu.size());

  const Periodogram psd =
      averaged_periodogram(dnu, cfg.sample_rate_hz, cfg.segments);
  const double df = psd.freq_hz[1] - psd.freq_hz[0];
  const double integral =
      std::accumulate(psd.psd.begin(), psd.psd.end(), 0.0) * df;
  CHECK(oracle::rel_diff(integral, var) < 0.02);
  // Two-sided level h0/4 across the band.
  CHECK(oracle::rel_diff(var, 0.25 * cfg.h0 * cfg.sample_rate_hz) < 0.02);
}

TEST_CASE("end-to-end lock simulation matches the predicted linewidth") {
  NoiseSimConfig cfg;
  cfg.segments = 64;

  SUBCASE("Mg, rescaled to desk scale") {
    cfg.sample_rate_hz = 4194304.0;
    cfg.duration_s = 0.0625;
    cfg.seed = 3;
    const auto& mg = *find_species(builtin_catalog(), "Mg");
    const LockSimResult r = end_to_end_lock_sim(mg.system, 2.0, cfg, 1e6);
    CHECK(r.predicted_fwhm_hz ==
          doctest::Approx(1e6 *
                          quantum_limited_linewidth(mg.system, 2.0).branch_hz)
              .epsilon(1e-9));
    CHECK(oracle::rel_diff(r.estimate.fwhm_hz, r.predicted_fwhm_hz) < 0.15);
  }

  SUBCASE("Sr, rescaled to desk scale") {
    cfg.sample_rate_hz = 1048576.0;
    cfg.duration_s = 0.25;
    cfg.seed = 1;
    const auto& sr = *find_species(builtin_catalog(), "Sr");
    const LockSimResult r = end_to_end_lock_sim(sr.system, 2.0, cfg, 1e6);
    CHECK(oracle::rel_diff(r.estimate.fwhm_hz, r.predicted_fwhm_hz) < 0.15);
  }

  SUBCASE("halving the efficiency doubles h0 and the line") {
    cfg.sample_rate_hz = 1048576.0;
    cfg.duration_s = 0.25;
    cfg.seed = 2;
    const auto& sr = *find_species(builtin_catalog(), "Sr");
    PhysicalSystem lossy = sr.system;
    lossy.quantum_efficiency = 0.5;
    const LockSimResult full = end_to_end_lock_sim(sr.system, 2.0, cfg, 1e6);
    const LockSimResult half = end_to_end_lock_sim(lossy, 2.0, cfg, 5e5);
    // Same h0 by construction: eta halved, scale halved.
    CHECK(oracle::rel_diff(half.h0, full.h0) < 1e-12);
    const LockSimResult doubled = end_to_end_lock_sim(lossy, 2.0, cfg, 1e6);
    CHECK(oracle::rel_diff(doubled.h0, 2.0 * full.h0) < 1e-12);
    const double ratio = doubled.estimate.fwhm_hz / full.estimate.fwhm_hz;
    CHECK(ratio > 1.7);
    CHECK(ratio < 2.3);
  }
}

TEST_CASE("estimator failure paths") {
  NoiseSimConfig cfg = unit_sim(1);
  std::vector<std::complex<double>> tiny(16, {1.0, 0.0});
  CHECK_THROWS_AS(estimate_lineshape(tiny, cfg), std::invalid_argument);

  std::vector<std::complex<double>> bad(4096, {1.0, 0.0});
  bad[100] = {std::nan(""), 0.0};
  CHECK_THROWS_WITH_AS(estimate_lineshape(bad, cfg),
                       doctest::Contains("non-finite"), std::runtime_error);
}

TEST_CASE("generator is documented for reproducibility") {
  CHECK(noise_rng_name() == "splitmix64-boxmuller-v1");
}
