#include "cavlock/metrology.hpp"

#include <random>

#include "cavlock/steady_state.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cavlock;

namespace {

const PhysicalSystem& species(const char* name) {
  return find_species(builtin_catalog(), name)->system;
}

// Radiatively limited system with the collective cooperativity dialed to
// roughly the requested value.
PhysicalSystem synthetic_with_c(double target) {
  PhysicalSystem sys = species("Sr-rad");
  const double c0 = derive_params(sys).single_atom_cooperativity;
  sys.atom_number = std::round(target / c0);
  return sys;
}

}  // namespace

TEST_CASE("budget table matches the tabulated values to 10%") {
  const struct {
    const char* name;
    double c0, power_w, snr, linewidth_hz;
  } expected[] = {
      {"Mg", 9.6e-3, 20e-12, 9.8e3, 20e-3},
      {"Sr", 7.4e-4, 3e-15, 1.5e2, 4.7e-3},
      {"Yb", 1.1e-2, 27e-15, 3.9e2, 1.6e-3},
      {"Hg", 1.1e-2, 130e-15, 5.8e2, 0.68e-3},
      {"Sr-rad", 1.2e-2, 0.5e-15, 6.1e1, 0.74e-6},
  };
  const auto rows = table1(builtin_catalog());
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CAPTURE(expected[i].name);
    CHECK(rows[i].name == expected[i].name);
    CHECK(oracle::rel_diff(rows[i].single_atom_cooperativity,
                           expected[i].c0) < 0.10);
    CHECK(oracle::rel_diff(rows[i].signal_power_w, expected[i].power_w) <
          0.10);
    CHECK(oracle::rel_diff(rows[i].snr, expected[i].snr) < 0.10);
    CHECK(oracle::rel_diff(rows[i].linewidth_hz, expected[i].linewidth_hz) <
          0.10);
  }
}

TEST_CASE("kappa C^2 n0 = N^2 C0 gamma / 4 keeps budgets length-free") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 5.0);
  for (int k = 0; k < 200; ++k) {
    PhysicalSystem sys = species("Yb");
    sys.wavelength_m *= u(rng);
    sys.gamma *= u(rng);
    sys.dipole_decay = sys.gamma;  // stays above the radiative limit
    sys.atom_number *= u(rng);
    sys.finesse *= u(rng);
    sys.cavity_length_m *= u(rng);
    sys.mode_area_m2 *= u(rng);
    const DerivedParams d = derive_params(sys);
    const double lhs = d.kappa * d.cooperativity * d.cooperativity *
                       d.saturation_photons;
    const double rhs = 0.25 * sys.atom_number * sys.atom_number *
                       d.single_atom_cooperativity * sys.gamma;
    CHECK(oracle::rel_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("signal power") {
  CHECK(oracle::rel_diff(signal_power(species("Sr"), 2.0), 3e-15) < 0.10);
  CHECK(oracle::rel_diff(signal_power(species("Hg"), 2.0), 130e-15) < 0.10);

  PhysicalSystem empty = species("Sr");
  empty.atom_number = 0.0;
  CHECK(signal_power(empty, 2.0) == 0.0);
  CHECK(lock_bandwidth(empty, 2.0) == 0.0);
  CHECK(snr(empty, 2.0) == 0.0);

  CHECK_THROWS_AS(signal_power(species("Sr"), 0.5), std::invalid_argument);

  SUBCASE("formula tracks the power leaking from the solved branch") {
    for (const char* name : {"Sr", "Mg", "Hg"}) {
      const PhysicalSystem& sys = species(name);
      const DerivedParams d = derive_params(sys);
      const double u_top =
          solve_branches({d.cooperativity,
                          drive_for_beta(d.cooperativity, 2.0), 0.0, 0.0})
              .top()
              .intensity;
      const double branch_power = 2.0 * constants::hbar * d.laser_omega *
                                  d.kappa * d.saturation_photons * u_top;
      CHECK(oracle::rel_diff(signal_power(sys, 2.0), branch_power) <
            5.0 / d.cooperativity);
    }
  }
}

TEST_CASE("snr scales with the square root of the efficiency") {
  CHECK(oracle::rel_diff(snr(species("Sr"), 2.0), 1.5e2) < 0.10);
  CHECK(oracle::rel_diff(snr(species("Mg"), 2.0), 9.8e3) < 0.10);

  PhysicalSystem lossy = species("Sr");
  lossy.quantum_efficiency = 0.25;
  CHECK(oracle::rel_diff(snr(lossy, 2.0), 0.5 * snr(species("Sr"), 2.0)) <
        1e-12);
}

TEST_CASE("phase slope: exact, approximate, and numeric routes agree") {
  SUBCASE("approximation is good to O(1/C)") {
    for (double target : {50.0, 100.0, 300.0, 1000.0}) {
      const PhysicalSystem sys = synthetic_with_c(target);
      const double c = derive_params(sys).cooperativity;
      const PhaseSlope slope = phase_slope(sys, 2.0);
      CHECK(oracle::rel_diff(slope.exact_s, slope.approx_s) < 3.0 / c);
    }
  }

  SUBCASE("slope per unit detuning is ~ 4/(beta C) = 0.02 at C = 100") {
    const PhysicalSystem sys = synthetic_with_c(100.0);
    const double c = derive_params(sys).cooperativity;
    const PhaseSlope slope = phase_slope(sys, 2.0);
    CHECK(slope.approx_s / sys.t2() == doctest::Approx(4.0 / (2.0 * c)));
    CHECK(slope.exact_s / sys.t2() == doctest::Approx(0.02).epsilon(0.05));
  }

  SUBCASE("a bleached medium imparts no phase slope") {
    const PhysicalSystem sys = synthetic_with_c(1e5);
    CHECK(phase_slope(sys, 2.0).exact_s / sys.t2() < 1e-4);
  }

  SUBCASE("exact formula equals the numeric derivative of Arg[x/y]") {
    const double c = 100.0;
    const double drive = drive_for_beta(c, 2.0);
    const auto phi = [&](double delta) {
      const auto set = solve_branches({c, drive, delta, 0.0});
      return transmitted_phase(set.point, set.top());
    };
    const double numeric = oracle::derivative(phi, 0.0, 1e-3);
    const auto top = solve_branches({c, drive, 0.0, 0.0}).top();
    CHECK(oracle::rel_diff(numeric,
                           phase_slope_exact_scaled(c, top.inversion)) <
          1e-6);
  }
}

TEST_CASE("quantum-limited linewidth") {
  SUBCASE("tabulated rows") {
    CHECK(oracle::rel_diff(
              quantum_limited_linewidth(species("Sr"), 2.0).closed_hz,
              4.7e-3) < 0.10);
    CHECK(oracle::rel_diff(
              quantum_limited_linewidth(species("Yb"), 2.0).closed_hz,
              1.6e-3) < 0.10);
    CHECK(oracle::rel_diff(
              quantum_limited_linewidth(species("Hg"), 2.0).closed_hz,
              0.68e-3) < 0.10);
    CHECK(oracle::rel_diff(
              quantum_limited_linewidth(species("Sr-rad"), 2.0).closed_hz,
              0.74e-6) < 0.10);
  }

  SUBCASE("branch route converges to the closed form") {
    double prev_gap = 1.0;
    for (double target : {50.0, 100.0, 300.0, 1000.0}) {
      const PhysicalSystem sys = synthetic_with_c(target);
      const double c = derive_params(sys).cooperativity;
      const Linewidth lw = quantum_limited_linewidth(sys, 2.0);
      const double gap = oracle::rel_diff(lw.branch_hz, lw.closed_hz);
      CHECK(gap < 3.0 / c);
      CHECK(gap < prev_gap);
      prev_gap = gap;
    }
  }

  SUBCASE("radiative limit reduces to beta C0 gamma / (64 pi)") {
    const PhysicalSystem& sys = species("Sr-rad");
    const DerivedParams d = derive_params(sys);
    const double reduced = 2.0 * d.single_atom_cooperativity * sys.gamma /
                           (64.0 * constants::pi);
    CHECK(oracle::rel_diff(quantum_limited_linewidth(sys, 2.0).closed_hz,
                           reduced) < 1e-12);
  }

  SUBCASE("monotone in beta, C0, and coherence time") {
    const PhysicalSystem sys = species("Yb");
    const double base = quantum_limited_linewidth(sys, 2.0).closed_hz;
    CHECK(quantum_limited_linewidth(sys, 4.0).closed_hz > base);

    PhysicalSystem brighter = sys;
    brighter.finesse *= 2.0;  // doubles C0
    CHECK(quantum_limited_linewidth(brighter, 2.0).closed_hz > base);

    // Doubling T2 at fixed gamma and C0 (finesse halved to compensate)
    // quarters the linewidth.
    PhysicalSystem longer = sys;
    longer.dipole_decay *= 0.5;
    longer.finesse *= 0.5;
    const Linewidth quartered = quantum_limited_linewidth(longer, 2.0);
    CHECK(oracle::rel_diff(quartered.closed_hz, 0.25 * base) < 1e-12);
    CHECK(oracle::rel_diff(quartered.branch_hz,
                           0.25 * quantum_limited_linewidth(sys, 2.0)
                                      .branch_hz) < 0.01);
  }

  SUBCASE("efficiency enters as 1/eta") {
    PhysicalSystem lossy = species("Sr");
    lossy.quantum_efficiency = 0.5;
    CHECK(oracle::rel_diff(
              quantum_limited_linewidth(lossy, 2.0).closed_hz,
              2.0 * quantum_limited_linewidth(species("Sr"), 2.0).closed_hz) <
          1e-12);
  }
}

TEST_CASE("lock bandwidth clears the kHz requirement on every row") {
  for (const auto& rec : builtin_catalog()) {
    CAPTURE(rec.name);
    const double bw = lock_bandwidth(rec.system, 2.0);
    CHECK(bw > 1e3);
    // Equals SNR^2 at unit efficiency.
    const double s = snr(rec.system, 2.0);
    CHECK(oracle::rel_diff(bw, s * s) < 1e-12);
  }
  CHECK(lock_bandwidth(species("Sr"), 2.0) ==
        doctest::Approx(2.33e4).epsilon(0.01));
  CHECK(lock_bandwidth(species("Mg"), 2.0) ==
        doctest::Approx(9.84e7).epsilon(0.01));
}

TEST_CASE("line pulling") {
  CHECK(line_pulling(species("Sr"), 2.0, 0.0) == 0.0);
  // C = 100, beta = 2, T2 = 1 s, theta = 1e-4 sits just below a millihertz.
  const double shift = line_pulling_scaled(100.0, 2.0, 1.0, 1e-4);
  CHECK(shift == doctest::Approx(2e-2 / (8.0 * constants::pi)));
  CHECK(shift < 1e-3);
  CHECK(shift > 0.5e-3);

  SUBCASE("formula matches the numeric phase zero crossing to 1%") {
    const double c = 100.0, beta = 2.0, t2 = 1.0;
    const double u_op = 0.25 * beta * c * c;
    const double drive = u_op * std::pow(1.0 + c / (1.0 + u_op), 2);
    for (double theta : {1e-5, 1e-4, 1e-3}) {
      const auto phi = [&](double delta) {
        const auto set = solve_branches({c, drive, delta, theta});
        return transmitted_phase(set.point, set.top());
      };
      const double crossing = oracle::bisect(phi, 0.0, 200.0 * theta);
      const double numeric_hz = crossing / (2.0 * constants::pi * t2);
      CHECK(oracle::rel_diff(numeric_hz,
                             line_pulling_scaled(c, beta, t2, theta)) < 0.01);
    }
  }
}

TEST_CASE("collective dipole") {
  // (N^2/C^2)(T2 gamma / beta): 1e4 atoms at C = 100 in the radiative limit.
  CHECK(1e8 / 1e4 * (2.0 / 2.0) == 1e4);
  const PhysicalSystem sys = synthetic_with_c(100.0);
  const DerivedParams d = derive_params(sys);
  const double n = sys.atom_number;
  const double expected = (n * n / (d.cooperativity * d.cooperativity)) *
                          (sys.t2() * sys.gamma / 2.0);
  CHECK(oracle::rel_diff(collective_dipole(sys, 2.0), expected) < 1e-12);

  SUBCASE("matches N^2 |sigma_-|^2 from the solved branch") {
    for (const char* name : {"Sr", "Mg", "Yb"}) {
      const PhysicalSystem& row = species(name);
      const DerivedParams dp = derive_params(row);
      const auto top =
          solve_branches({dp.cooperativity,
                          drive_for_beta(dp.cooperativity, 2.0), 0.0, 0.0},
                         row.gamma / row.dipole_decay)
              .top();
      const double from_branch =
          row.atom_number * row.atom_number * std::norm(top.dipole);
      CHECK(oracle::rel_diff(collective_dipole(row, 2.0), from_branch) <
            6.0 / dp.cooperativity);
    }
  }

  SUBCASE("bleaches away at strong drive") {
    CHECK(collective_dipole(sys, 1e9) < 1e-5 * collective_dipole(sys, 2.0));
  }
}

TEST_CASE("active-device comparison constant") {
  const PhysicalSystem& sys = species("Sr");
  const DerivedParams d = derive_params(sys);
  CHECK(oracle::rel_diff(active_laser_linewidth(sys),
                         d.single_atom_cooperativity * sys.gamma /
                             constants::pi) < 1e-12);
}

TEST_CASE("lock budget bundles the chain consistently") {
  const LockBudget budget = lock_budget(species("Sr"), 2.0, "Sr");
  CHECK(budget.species == "Sr");
  CHECK(budget.signal_power_w == signal_power(species("Sr"), 2.0));
  CHECK(budget.snr_rt_hz == snr(species("Sr"), 2.0));
  CHECK(budget.lock_bandwidth_hz == lock_bandwidth(species("Sr"), 2.0));
  CHECK(budget.pulling_hz_per_theta ==
        line_pulling(species("Sr"), 2.0, 1.0));
  CHECK(budget.linewidth_hz > 0.0);
  CHECK(budget.collective_dipole > 0.0);
}
