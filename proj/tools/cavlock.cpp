// cavlock: drive a saturated atom-cavity system, in numbers.
//
// Subcommands expose the steady-state scans, stability analysis, lock-budget
// metrology and the shot-noise Monte Carlo as plot-ready CSV/JSON with a
// reproducibility manifest next to every output file.

#include <complex>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavlock/catalog.hpp"
#include "cavlock/dynamics.hpp"
#include "cavlock/io.hpp"
#include "cavlock/metrology.hpp"
#include "cavlock/model.hpp"
#include "cavlock/noise.hpp"
#include "cavlock/steady_state.hpp"

namespace {

constexpr const char* kToolVersion = "cavlock 0.1.0";
constexpr double kTwoPi = 2.0 * cavlock::constants::pi;

using nlohmann::json;

struct GlobalOptions {
  bool as_json = false;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string species;
  std::string config_path;
  bool gnuplot = false;
};

struct CommandContext {
  GlobalOptions* opts = nullptr;
  std::string subcommand;
  json parameters = json::object();
  std::vector<std::string> argv;  // resolved flags, without --out

  void param(const std::string& key, const json& value,
             const std::string& flag, const std::string& text) {
    parameters[key] = value;
    argv.push_back(flag);
    argv.push_back(text);
  }
  void param(const std::string& key, double value, const std::string& flag) {
    param(key, value, flag, cavlock::format_double(value));
  }
};

std::string catalog_version(const GlobalOptions& opts) {
  if (!opts.config_path.empty()) return "file:" + opts.config_path;
  return cavlock::builtin_catalog_version();
}

const cavlock::SpeciesRecord& resolve_species(const GlobalOptions& opts) {
  static std::vector<cavlock::SpeciesRecord> loaded;
  const std::vector<cavlock::SpeciesRecord>* catalog =
      &cavlock::builtin_catalog();
  if (!opts.config_path.empty()) {
    loaded = cavlock::load_catalog(opts.config_path);
    catalog = &loaded;
  }
  if (opts.species.empty()) {
    if (catalog->size() == 1) return catalog->front();
    throw std::invalid_argument(
        "--species required (catalog has more than one record)");
  }
  const cavlock::SpeciesRecord* rec =
      cavlock::find_species(*catalog, opts.species);
  if (!rec) {
    std::string names;
    for (const auto& r : *catalog) names += " " + r.name;
    throw std::invalid_argument("unknown species '" + opts.species +
                                "'; available:" + names);
  }
  return *rec;
}

void write_manifest(const CommandContext& ctx,
                    const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["subcommand"] = ctx.subcommand;
  manifest["parameters"] = ctx.parameters;
  manifest["catalog_version"] = catalog_version(*ctx.opts);
  if (ctx.opts->seed_set) manifest["seed"] = ctx.opts->seed;
  manifest["argv"] = ctx.argv;
  manifest["outputs"] = outputs;

  const std::string path = outputs.front() + ".manifest.json";
  std::ofstream out(path);
  out << manifest.dump(2) << '\n';
}

// Writes `body` to --out (with manifest) or stdout.
void emit(const CommandContext& ctx, const std::string& body) {
  if (ctx.opts->out_path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(ctx.opts->out_path, std::ios::binary);
  if (!out)
    throw std::invalid_argument("cannot open output file " +
                                ctx.opts->out_path);
  out << body;
  out.close();
  write_manifest(ctx, {ctx.opts->out_path});
}

void emit_gnuplot(const CommandContext& ctx, const std::string& script) {
  if (!ctx.opts->gnuplot || ctx.opts->out_path.empty()) return;
  std::ofstream out(ctx.opts->out_path + ".gp");
  out << script;
}

json branch_json(const cavlock::DimensionlessPoint& p, int index,
                 const cavlock::SteadyStateBranch& b) {
  json row;
  row["C"] = p.cooperativity;
  row["I_in"] = p.drive;
  row["delta"] = p.delta;
  row["theta"] = p.theta;
  row["branch_index"] = index;
  row["u"] = b.intensity;
  row["re_x"] = b.field.real();
  row["im_x"] = b.field.imag();
  row["sigma_z"] = b.inversion;
  row["stability"] = std::string(cavlock::to_string(b.stability));
  return row;
}

std::string scan_payload(const CommandContext& ctx,
                         std::span<const cavlock::BranchSet> sets) {
  if (ctx.opts->as_json) {
    json rows = json::array();
    for (const auto& set : sets)
      for (std::size_t i = 0; i < set.branches.size(); ++i)
        rows.push_back(
            branch_json(set.point, static_cast<int>(i), set.branches[i]));
    return rows.dump(2) + "\n";
  }
  std::ostringstream os;
  cavlock::write_scan_csv(os, sets);
  return os.str();
}

std::vector<cavlock::BranchSet> classify_all(
    std::vector<cavlock::BranchSet> sets, double stiffness, double gamma_t2) {
  for (auto& set : sets) {
    set = cavlock::classify_stability(
        std::move(set), cavlock::make_flow(set.point, stiffness, gamma_t2));
  }
  return sets;
}

json budget_json(const cavlock::LockBudget& budget) {
  json out;
  out["species"] = budget.species;
  out["beta"] = budget.beta;
  out["signal_power_w"] = budget.signal_power_w;
  out["snr_rt_hz"] = budget.snr_rt_hz;
  out["phase_slope_s"] = budget.phase_slope_s;
  out["phase_slope_approx_s"] = budget.phase_slope_approx_s;
  out["linewidth_hz"] = budget.linewidth_hz;
  out["linewidth_closed_hz"] = budget.linewidth_closed_hz;
  out["lock_bandwidth_hz"] = budget.lock_bandwidth_hz;
  out["pulling_hz_per_theta"] = budget.pulling_hz_per_theta;
  out["collective_dipole"] = budget.collective_dipole;
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_params(CommandContext& ctx, double beta, double delta_scaled,
                double delta_hz, double theta, double theta_hz) {
  const auto& rec = resolve_species(*ctx.opts);
  cavlock::PhysicalSystem sys = rec.system;
  if (beta > 0.0) sys.beta = beta;
  const cavlock::DerivedParams d = cavlock::derive_params(sys);

  double delta = delta_scaled;
  if (delta_hz != 0.0) delta = kTwoPi * delta_hz / sys.dipole_decay;
  double th = theta;
  if (theta_hz != 0.0) th = kTwoPi * theta_hz / d.kappa;

  cavlock::DimensionlessPoint point;
  point.cooperativity = d.cooperativity;
  point.drive = cavlock::drive_for_beta(d.cooperativity, sys.beta);
  point.delta = delta;
  point.theta = th;

  ctx.param("species", rec.name, "--species", rec.name);
  ctx.param("beta", sys.beta, "--beta");
  ctx.param("delta", delta, "--delta-scaled");
  ctx.param("theta", th, "--theta-scaled");

  if (ctx.opts->as_json) {
    json out;
    out["species"] = rec.name;
    out["transition"] = rec.transition;
    out["system"] = {{"lambda_m", sys.wavelength_m},
                     {"gamma_rad_s", sys.gamma},
                     {"T2_s", sys.t2()},
                     {"N", sys.atom_number},
                     {"finesse", sys.finesse},
                     {"cavity_length_m", sys.cavity_length_m},
                     {"mode_area_m2", sys.mode_area_m2},
                     {"quantum_efficiency", sys.quantum_efficiency},
                     {"beta", sys.beta}};
    out["derived"] = {{"coupling_rad_s", d.coupling},
                      {"kappa_1_s", d.kappa},
                      {"saturation_photons", d.saturation_photons},
                      {"C0", d.single_atom_cooperativity},
                      {"C", d.cooperativity},
                      {"laser_omega_rad_s", d.laser_omega}};
    out["point"] = {{"C", point.cooperativity},
                    {"I_in", point.drive},
                    {"delta", point.delta},
                    {"theta", point.theta}};
    emit(ctx, out.dump(2) + "\n");
    return;
  }

  std::ostringstream os;
  os << "species:            " << rec.name << " (" << rec.transition << ")\n"
     << "lambda:             " << cavlock::format_double(sys.wavelength_m)
     << " m\n"
     << "gamma:              " << cavlock::format_double(sys.gamma)
     << " rad/s\n"
     << "T2:                 " << cavlock::format_double(sys.t2()) << " s\n"
     << "N:                  " << cavlock::format_double(sys.atom_number)
     << "\n"
     << "finesse:            " << cavlock::format_double(sys.finesse) << "\n"
     << "coupling g:         " << cavlock::format_double(d.coupling)
     << " rad/s\n"
     << "kappa:              " << cavlock::format_double(d.kappa) << " 1/s\n"
     << "n0:                 " << cavlock::format_double(d.saturation_photons)
     << "\n"
     << "C0:                 "
     << cavlock::format_double(d.single_atom_cooperativity) << "\n"
     << "C:                  " << cavlock::format_double(d.cooperativity)
     << "\n"
     << "omega_L:            " << cavlock::format_double(d.laser_omega)
     << " rad/s\n"
     << "I_in (beta C^2/4):  " << cavlock::format_double(point.drive) << "\n"
     << "delta:              " << cavlock::format_double(point.delta) << "\n"
     << "theta:              " << cavlock::format_double(point.theta) << "\n";
  emit(ctx, os.str());
}

void cmd_bistability(CommandContext& ctx, double C, double delta, double imin,
                     double imax, std::size_t points, double stiffness,
                     double gamma_t2) {
  ctx.param("C", C, "--C");
  ctx.param("delta", delta, "--delta");
  ctx.param("imin", imin, "--imin");
  ctx.param("imax", imax, "--imax");
  ctx.param("points", static_cast<double>(points), "--points");

  const auto grid = cavlock::geomspace(imin, imax, points);
  auto sets = classify_all(cavlock::scan_drive(C, delta, grid, gamma_t2),
                           stiffness, gamma_t2);
  emit(ctx, scan_payload(ctx, sets));
  emit_gnuplot(ctx, "set logscale xy\nset xlabel 'I_in'\nset ylabel 'u'\n"
                    "plot '" +
                        ctx.opts->out_path +
                        "' using 2:6 with points title 'branches'\n");

  if (const auto w = cavlock::bistability_thresholds(C)) {
    std::cerr << "bistable window: [" << cavlock::format_double(w->lower)
              << ", " << cavlock::format_double(w->upper)
              << "] (asymptotes 4C = "
              << cavlock::format_double(w->lower_asymptote)
              << ", C^2/4 = " << cavlock::format_double(w->upper_asymptote)
              << ")\n";
  }
}

void cmd_spectrum(CommandContext& ctx, double C, double drive, double dmin,
                  double dmax, std::size_t points, double theta,
                  double stiffness, double gamma_t2) {
  ctx.param("C", C, "--C");
  ctx.param("I", drive, "--I");
  ctx.param("delta_min", dmin, "--delta-min");
  ctx.param("delta_max", dmax, "--delta-max");
  ctx.param("points", static_cast<double>(points), "--points");
  ctx.param("theta", theta, "--theta");

  const auto grid = cavlock::linspace(dmin, dmax, points);
  auto sets =
      classify_all(cavlock::scan_spectrum(C, drive, grid, theta, gamma_t2),
                   stiffness, gamma_t2);
  emit(ctx, scan_payload(ctx, sets));
  emit_gnuplot(ctx, "set xlabel 'delta'\nset ylabel 'u'\nplot '" +
                        ctx.opts->out_path +
                        "' using 3:6 with points title 'branches'\n");
}

void cmd_surface(CommandContext& ctx, double C, double drive, double dmin,
                 double dmax, std::size_t dpoints, double tmin, double tmax,
                 std::size_t tpoints, const std::string& overlay_out) {
  ctx.param("C", C, "--C");
  ctx.param("I", drive, "--I");
  ctx.param("delta_min", dmin, "--delta-min");
  ctx.param("delta_max", dmax, "--delta-max");
  ctx.param("delta_points", static_cast<double>(dpoints), "--delta-points");
  ctx.param("theta_min", tmin, "--theta-min");
  ctx.param("theta_max", tmax, "--theta-max");
  ctx.param("theta_points", static_cast<double>(tpoints), "--theta-points");

  const auto deltas = cavlock::linspace(dmin, dmax, dpoints);
  const auto thetas = cavlock::linspace(tmin, tmax, tpoints);
  const auto surface = cavlock::scan_surface(C, drive, deltas, thetas);

  if (ctx.opts->as_json) {
    json out;
    out["C"] = surface.cooperativity;
    out["I_in"] = surface.drive;
    out["delta"] = surface.delta;
    out["theta"] = surface.theta;
    json rows = json::array();
    std::size_t cell = 0;
    for (std::size_t i = 0; i < surface.delta.size(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < surface.theta.size(); ++j)
        row.push_back(surface.top[cell++].intensity);
      rows.push_back(std::move(row));
    }
    out["u"] = std::move(rows);
    emit(ctx, out.dump() + "\n");
  } else {
    std::ostringstream os;
    cavlock::write_surface_csv(os, surface);
    emit(ctx, os.str());
  }

  if (!overlay_out.empty()) {
    const auto curves = cavlock::normal_mode_overlay(C, deltas);
    std::ofstream out(overlay_out);
    if (!out)
      throw std::invalid_argument("cannot open overlay file " + overlay_out);
    cavlock::write_normal_modes_csv(out, curves);
  }
}

void cmd_stability(CommandContext& ctx, double C, double drive, double delta,
                   double theta, double stiffness, double gamma_t2,
                   const std::string& trajectory_out, double tau,
                   double tol) {
  ctx.param("C", C, "--C");
  ctx.param("I", drive, "--I");
  ctx.param("delta", delta, "--delta");
  ctx.param("theta", theta, "--theta");
  ctx.param("K", stiffness, "--K");
  ctx.param("gamma_t2", gamma_t2, "--gamma-t2");

  const cavlock::DimensionlessPoint point{C, drive, delta, theta};
  const auto fp = cavlock::make_flow(point, stiffness, gamma_t2);
  const auto set =
      cavlock::classify_stability(cavlock::solve_branches(point, gamma_t2), fp);

  if (!trajectory_out.empty()) {
    // Relaxation from vacuum onto the attracting branch at this point.
    const auto trajectory =
        cavlock::integrate(cavlock::vacuum_state(), fp, tau, tol);
    std::ofstream out(trajectory_out, std::ios::binary);
    if (!out)
      throw std::invalid_argument("cannot open trajectory file " +
                                  trajectory_out);
    cavlock::write_trajectory_csv(out, trajectory);
  }

  if (ctx.opts->as_json) {
    json rows = json::array();
    for (std::size_t i = 0; i < set.branches.size(); ++i) {
      json row = branch_json(point, static_cast<int>(i), set.branches[i]);
      json eigs = json::array();
      for (const auto& ev : *set.branches[i].eigenvalues)
        eigs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
      row["eigenvalues"] = std::move(eigs);
      rows.push_back(std::move(row));
    }
    emit(ctx, rows.dump(2) + "\n");
    return;
  }

  std::ostringstream os;
  cavlock::write_scan_csv(os, std::span(&set, 1));
  emit(ctx, os.str());
  for (std::size_t i = 0; i < set.branches.size(); ++i) {
    const auto& b = set.branches[i];
    std::cerr << "branch " << i
              << ": u = " << cavlock::format_double(b.intensity) << " -> "
              << cavlock::to_string(b.stability) << " (max Re eig = "
              << cavlock::format_double((*b.eigenvalues)[0].real()) << ")\n";
  }
}

void cmd_hysteresis(CommandContext& ctx, double C, double imin, double imax,
                    int steps, double dwell, double stiffness,
                    double gamma_t2) {
  ctx.param("C", C, "--C");
  ctx.param("imin", imin, "--imin");
  ctx.param("imax", imax, "--imax");
  ctx.param("steps", static_cast<double>(steps), "--steps");
  ctx.param("dwell", dwell, "--dwell");
  ctx.param("K", stiffness, "--K");
  ctx.param("gamma_t2", gamma_t2, "--gamma-t2");

  cavlock::HysteresisOptions options;
  options.drive_min = imin;
  options.drive_max = imax;
  options.steps_per_leg = steps;
  options.dwell = dwell;
  const auto result =
      cavlock::hysteresis_sweep(C, options, stiffness, gamma_t2);

  if (result.quasi_static_warning)
    std::cerr << "warning: dwell " << dwell
              << " tau is short against the atomic relaxation time "
                 "1/(gamma T2); the sweep may not be quasi-static\n";

  if (ctx.opts->as_json) {
    json out;
    out["has_loop"] = result.has_loop;
    out["up_jump_drive"] = result.up_jump_drive;
    out["down_jump_drive"] = result.down_jump_drive;
    json rows = json::array();
    for (const auto& p : result.points)
      rows.push_back(
          {{"I_in", p.drive}, {"u", p.intensity}, {"direction", p.direction}});
    out["points"] = std::move(rows);
    emit(ctx, out.dump() + "\n");
  } else {
    std::ostringstream os;
    cavlock::write_hysteresis_csv(os, result);
    emit(ctx, os.str());
  }
  if (result.has_loop) {
    std::cerr << "jumps: up at I_in = "
              << cavlock::format_double(result.up_jump_drive)
              << ", down at I_in = "
              << cavlock::format_double(result.down_jump_drive) << "\n";
  } else {
    std::cerr << "no hysteresis loop detected\n";
  }
}

void cmd_metrology(CommandContext& ctx, double beta) {
  const auto& rec = resolve_species(*ctx.opts);
  cavlock::PhysicalSystem sys = rec.system;
  if (beta > 0.0) sys.beta = beta;
  ctx.param("species", rec.name, "--species", rec.name);
  ctx.param("beta", sys.beta, "--beta");

  const auto budget = cavlock::lock_budget(sys, sys.beta, rec.name);
  if (ctx.opts->as_json) {
    emit(ctx, budget_json(budget).dump(2) + "\n");
    return;
  }
  std::ostringstream os;
  os << "species:                 " << budget.species << "\n"
     << "beta:                    " << cavlock::format_double(budget.beta)
     << "\n"
     << "signal power:            "
     << cavlock::format_double(budget.signal_power_w) << " W\n"
     << "SNR (1 Hz bandwidth):    " << cavlock::format_double(budget.snr_rt_hz)
     << "\n"
     << "phase slope dphi/dDelta: "
     << cavlock::format_double(budget.phase_slope_s) << " s (approx "
     << cavlock::format_double(budget.phase_slope_approx_s) << ")\n"
     << "linewidth:               "
     << cavlock::format_double(budget.linewidth_hz) << " Hz (closed form "
     << cavlock::format_double(budget.linewidth_closed_hz) << ")\n"
     << "lock bandwidth:          "
     << cavlock::format_double(budget.lock_bandwidth_hz) << " Hz\n"
     << "pulling per unit theta:  "
     << cavlock::format_double(budget.pulling_hz_per_theta) << " Hz\n"
     << "collective dipole:       "
     << cavlock::format_double(budget.collective_dipole) << "\n";
  emit(ctx, os.str());
}

void cmd_table1(CommandContext& ctx) {
  const std::vector<cavlock::SpeciesRecord>* catalog =
      &cavlock::builtin_catalog();
  std::vector<cavlock::SpeciesRecord> loaded;
  if (!ctx.opts->config_path.empty()) {
    loaded = cavlock::load_catalog(ctx.opts->config_path);
    catalog = &loaded;
  }
  const auto rows = cavlock::table1(*catalog);

  if (ctx.opts->as_json) {
    json out = json::array();
    for (const auto& row : rows)
      out.push_back({{"name", row.name},
                     {"C0", row.single_atom_cooperativity},
                     {"P_w", row.signal_power_w},
                     {"SNR", row.snr},
                     {"linewidth_hz", row.linewidth_hz}});
    emit(ctx, out.dump(2) + "\n");
    return;
  }

  std::ostringstream os;
  if (ctx.opts->out_path.empty()) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-8s %-12s %-14s %-12s %-14s\n",
                  "species", "C0", "P(beta=2) [W]", "SNR", "linewidth [Hz]");
    os << buf;
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof(buf), "%-8s %-12.3g %-14.3g %-12.3g %-14.3g\n",
                    row.name.c_str(), row.single_atom_cooperativity,
                    row.signal_power_w, row.snr, row.linewidth_hz);
      os << buf;
    }
  } else {
    os << "name,C0,P_w,SNR,linewidth_hz\n";
    for (const auto& row : rows) {
      os << row.name << ','
         << cavlock::format_double(row.single_atom_cooperativity) << ','
         << cavlock::format_double(row.signal_power_w) << ','
         << cavlock::format_double(row.snr) << ','
         << cavlock::format_double(row.linewidth_hz) << '\n';
    }
  }
  emit(ctx, os.str());
}

void cmd_pulling(CommandContext& ctx, double beta, double theta) {
  const auto& rec = resolve_species(*ctx.opts);
  cavlock::PhysicalSystem sys = rec.system;
  if (beta > 0.0) sys.beta = beta;
  ctx.param("species", rec.name, "--species", rec.name);
  ctx.param("beta", sys.beta, "--beta");
  ctx.param("theta", theta, "--theta");

  const double shift = cavlock::line_pulling(sys, sys.beta, theta);
  if (ctx.opts->as_json) {
    json out;
    out["species"] = rec.name;
    out["beta"] = sys.beta;
    out["theta"] = theta;
    out["pulling_hz"] = shift;
    emit(ctx, out.dump(2) + "\n");
    return;
  }
  emit(ctx, "lock shift: " + cavlock::format_double(shift) + " Hz (theta = " +
                cavlock::format_double(theta) + ")\n");
}

void cmd_locksim(CommandContext& ctx, double h0, double rate, double duration,
                 int segments, double beta, double scale,
                 const std::string& series_out, const std::string& series_in) {
  cavlock::NoiseSimConfig cfg;
  cfg.sample_rate_hz = rate;
  cfg.duration_s = duration;
  cfg.seed = ctx.opts->seed;
  cfg.segments = segments;

  ctx.param("rate", rate, "--rate");
  ctx.param("duration", duration, "--duration");
  ctx.param("segments", static_cast<double>(segments), "--segments");

  double predicted = 0.0;
  std::vector<std::complex<double>> series;
  cavlock::LineshapeEstimate estimate;

  if (!series_in.empty()) {
    std::ifstream in(series_in);
    if (!in)
      throw std::invalid_argument("cannot open series file " + series_in);
    series = cavlock::read_series_csv(in);
    cfg.h0 = h0;
    estimate = cavlock::estimate_lineshape(series, cfg);
  } else if (!ctx.opts->species.empty()) {
    const auto& rec = resolve_species(*ctx.opts);
    cavlock::PhysicalSystem sys = rec.system;
    if (beta > 0.0) sys.beta = beta;
    ctx.param("species", rec.name, "--species", rec.name);
    ctx.param("beta", sys.beta, "--beta");
    ctx.param("scale", scale, "--scale");
    const auto result = cavlock::end_to_end_lock_sim(sys, sys.beta, cfg, scale);
    estimate = result.estimate;
    cfg.h0 = result.h0;
    predicted = result.predicted_fwhm_hz;
    if (!series_out.empty()) series = cavlock::synthesize_locked_field(cfg);
  } else {
    cfg.h0 = h0;
    ctx.param("h0", h0, "--h0");
    predicted = 0.5 * cavlock::constants::pi * h0;
    series = cavlock::synthesize_locked_field(cfg);
    estimate = cavlock::estimate_lineshape(series, cfg);
  }

  if (!series_out.empty() && !series.empty()) {
    std::ofstream out(series_out, std::ios::binary);
    if (!out)
      throw std::invalid_argument("cannot open series file " + series_out);
    cavlock::write_series_csv(out, series, cfg.sample_rate_hz);
  }

  std::ostringstream os;
  cavlock::write_lineshape_csv(os, estimate.spectrum);
  emit(ctx, os.str());
  emit_gnuplot(ctx, "set xlabel 'f [Hz]'\nset ylabel 'PSD'\nplot '" +
                        ctx.opts->out_path + "' using 1:2 with lines\n");

  json summary;
  summary["fwhm_hz"] = estimate.fwhm_hz;
  summary["err_hz"] = estimate.fwhm_err_hz;
  summary["h0_hz2_per_hz"] = cfg.h0;
  summary["seed"] = cfg.seed;
  summary["rng"] = std::string(cavlock::noise_rng_name());
  summary["fit_residual"] = estimate.fit_residual;
  summary["structure_slope"] = estimate.structure_slope;
  if (predicted > 0.0) summary["predicted_fwhm_hz"] = predicted;
  std::ostream& dest = ctx.opts->out_path.empty() ? std::cerr : std::cout;
  dest << summary.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saturated cavity spectroscopy toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.fallthrough();
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_flag("--json", opts.as_json, "emit JSON instead of CSV/text");
  app.add_option("--out", opts.out_path,
                 "output file; a .manifest.json sidecar is written next to it");
  app.add_option("--seed", opts.seed, "RNG seed for stochastic subcommands")
      ->check([&opts](const std::string&) {
        opts.seed_set = true;
        return std::string();
      });
  app.add_option("--species", opts.species, "catalog species name");
  app.add_option("--config", opts.config_path, "JSON catalog file");
  app.add_flag("--gnuplot", opts.gnuplot,
               "also write a gnuplot script next to --out");

  CommandContext ctx;
  ctx.opts = &opts;

  // params
  double beta = 0.0, delta_scaled = 0.0, delta_hz = 0.0, theta = 0.0,
         theta_hz = 0.0;
  auto* params = app.add_subcommand(
      "params", "derived parameters and the dimensionless operating point");
  params->add_option("--beta", beta, "override the catalog beta");
  params->add_option("--delta-scaled", delta_scaled, "T2 (omega_a - omega_c)");
  params->add_option("--delta-hz", delta_hz, "atom-cavity detuning in Hz");
  params->add_option("--theta-scaled", theta, "(omega_c - omega_L)/kappa");
  params->add_option("--theta-hz", theta_hz, "cavity-laser offset in Hz");
  params->callback([&] {
    ctx.subcommand = "params";
    cmd_params(ctx, beta, delta_scaled, delta_hz, theta, theta_hz);
  });

  // bistability
  double bi_c = 100.0, bi_delta = 0.0, bi_imin = 1.0, bi_imax = 1e5;
  std::size_t bi_points = 400;
  double stiffness = 1e3, gamma_t2 = 2.0;
  auto* bist = app.add_subcommand(
      "bistability", "intensity branches against drive at fixed detuning");
  bist->add_option("--C", bi_c, "collective cooperativity");
  bist->add_option("--delta", bi_delta, "scaled atomic detuning");
  bist->add_option("--imin", bi_imin, "lowest drive");
  bist->add_option("--imax", bi_imax, "highest drive");
  bist->add_option("--points", bi_points, "grid size (log-spaced)");
  bist->add_option("--K", stiffness, "kappa T2 for stability verdicts");
  bist->add_option("--gamma-t2", gamma_t2, "gamma T2 in (0, 2]");
  bist->callback([&] {
    ctx.subcommand = "bistability";
    cmd_bistability(ctx, bi_c, bi_delta, bi_imin, bi_imax, bi_points,
                    stiffness, gamma_t2);
  });

  // spectrum
  double sp_c = 100.0, sp_i = 5e3, sp_dmin = -300.0, sp_dmax = 300.0,
         sp_theta = 0.0;
  std::size_t sp_points = 1201;
  auto* spec =
      app.add_subcommand("spectrum", "intensity branches against detuning");
  spec->add_option("--C", sp_c, "collective cooperativity");
  spec->add_option("--I", sp_i, "drive I_in");
  spec->add_option("--delta-min", sp_dmin, "lowest scaled detuning");
  spec->add_option("--delta-max", sp_dmax, "highest scaled detuning");
  spec->add_option("--points", sp_points, "grid size (linear)");
  spec->add_option("--theta", sp_theta, "scaled cavity-laser offset");
  spec->add_option("--K", stiffness, "kappa T2 for stability verdicts");
  spec->add_option("--gamma-t2", gamma_t2, "gamma T2 in (0, 2]");
  spec->callback([&] {
    ctx.subcommand = "spectrum";
    cmd_spectrum(ctx, sp_c, sp_i, sp_dmin, sp_dmax, sp_points, sp_theta,
                 stiffness, gamma_t2);
  });

  // surface
  double su_c = 100.0, su_i = 5e3, su_dmin = -300.0, su_dmax = 300.0,
         su_tmin = -2.0, su_tmax = 2.0;
  std::size_t su_dpoints = 301, su_tpoints = 301;
  std::string overlay_out;
  auto* surf = app.add_subcommand(
      "surface", "largest-intensity branch over a delta x theta grid");
  surf->add_option("--C", su_c, "collective cooperativity");
  surf->add_option("--I", su_i, "drive I_in");
  surf->add_option("--delta-min", su_dmin, "lowest scaled detuning");
  surf->add_option("--delta-max", su_dmax, "highest scaled detuning");
  surf->add_option("--delta-points", su_dpoints, "detuning grid size");
  surf->add_option("--theta-min", su_tmin, "lowest cavity-laser offset");
  surf->add_option("--theta-max", su_tmax, "highest cavity-laser offset");
  surf->add_option("--theta-points", su_tpoints, "offset grid size");
  surf->add_option("--overlay-out", overlay_out,
                   "also write the weak-drive normal-mode curves");
  surf->callback([&] {
    ctx.subcommand = "surface";
    cmd_surface(ctx, su_c, su_i, su_dmin, su_dmax, su_dpoints, su_tmin,
                su_tmax, su_tpoints, overlay_out);
  });

  // stability
  double st_c = 100.0, st_i = 1e3, st_delta = 0.0, st_theta = 0.0,
         st_tau = 100.0, st_tol = 1e-8;
  std::string trajectory_out;
  auto* stab =
      app.add_subcommand("stability", "branch verdicts and flow eigenvalues");
  stab->add_option("--C", st_c, "collective cooperativity");
  stab->add_option("--I", st_i, "drive I_in");
  stab->add_option("--delta", st_delta, "scaled atomic detuning");
  stab->add_option("--theta", st_theta, "scaled cavity-laser offset");
  stab->add_option("--K", stiffness, "kappa T2");
  stab->add_option("--gamma-t2", gamma_t2, "gamma T2 in (0, 2]");
  stab->add_option("--trajectory-out", trajectory_out,
                   "write the vacuum-start relaxation trajectory CSV");
  stab->add_option("--tau", st_tau, "trajectory length in scaled time");
  stab->add_option("--tol", st_tol, "integrator tolerance");
  stab->callback([&] {
    ctx.subcommand = "stability";
    cmd_stability(ctx, st_c, st_i, st_delta, st_theta, stiffness, gamma_t2,
                  trajectory_out, st_tau, st_tol);
  });

  // hysteresis
  double hy_c = 100.0, hy_imin = 0.0, hy_imax = 0.0, hy_dwell = 60.0;
  int hy_steps = 400;
  auto* hyst =
      app.add_subcommand("hysteresis", "quasi-static drive ramp, up then down");
  hyst->add_option("--C", hy_c, "collective cooperativity");
  hyst->add_option("--imin", hy_imin, "lowest drive (0 = auto)");
  hyst->add_option("--imax", hy_imax, "highest drive (0 = auto)");
  hyst->add_option("--steps", hy_steps, "drive steps per leg");
  hyst->add_option("--dwell", hy_dwell, "tau spent per step");
  hyst->add_option("--K", stiffness, "kappa T2");
  hyst->add_option("--gamma-t2", gamma_t2, "gamma T2 in (0, 2]");
  hyst->callback([&] {
    ctx.subcommand = "hysteresis";
    cmd_hysteresis(ctx, hy_c, hy_imin, hy_imax, hy_steps, hy_dwell, stiffness,
                   gamma_t2);
  });

  // metrology
  double me_beta = 0.0;
  auto* metr = app.add_subcommand("metrology", "full lock budget");
  metr->add_option("--beta", me_beta, "override the catalog beta");
  metr->callback([&] {
    ctx.subcommand = "metrology";
    cmd_metrology(ctx, me_beta);
  });

  // table1
  auto* table =
      app.add_subcommand("table1", "budget table over the whole catalog");
  table->callback([&] {
    ctx.subcommand = "table1";
    cmd_table1(ctx);
  });

  // pulling
  double pu_beta = 0.0, pu_theta = 1e-4;
  auto* pull =
      app.add_subcommand("pulling", "lock shift from cavity-laser offset");
  pull->add_option("--beta", pu_beta, "override the catalog beta");
  pull->add_option("--theta", pu_theta, "scaled cavity-laser offset");
  pull->callback([&] {
    ctx.subcommand = "pulling";
    cmd_pulling(ctx, pu_beta, pu_theta);
  });

  // locksim
  double lo_h0 = 1.0, lo_rate = 256.0, lo_duration = 1024.0, lo_beta = 0.0,
         lo_scale = 1e6;
  int lo_segments = 64;
  std::string series_out, series_in;
  auto* lock = app.add_subcommand(
      "locksim", "white-frequency-noise Monte Carlo and lineshape fit");
  lock->add_option("--h0", lo_h0, "white frequency noise level [Hz^2/Hz]");
  lock->add_option("--rate", lo_rate, "sample rate [Hz]");
  lock->add_option("--duration", lo_duration, "duration [s]");
  lock->add_option("--segments", lo_segments, "periodogram segments");
  lock->add_option("--beta", lo_beta, "override the catalog beta");
  lock->add_option("--scale", lo_scale,
                   "h0 multiplier for species runs (desk-scale rescaling)");
  lock->add_option("--series-out", series_out, "write the time series CSV");
  lock->add_option("--series-in", series_in,
                   "estimate a lineshape from an existing [t,re,im] CSV");
  lock->callback([&] {
    ctx.subcommand = "locksim";
    cmd_locksim(ctx, lo_h0, lo_rate, lo_duration, lo_segments, lo_beta,
                lo_scale, series_out, series_in);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
