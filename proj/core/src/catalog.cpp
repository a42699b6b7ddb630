#include "cavlock/catalog.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace cavlock {

namespace {

constexpr double two_pi = 2.0 * constants::pi;

PhysicalSystem make_system(double wavelength_m, double gamma,
                           double dipole_decay, double atoms, double finesse) {
  PhysicalSystem sys;
  sys.wavelength_m = wavelength_m;
  sys.gamma = gamma;
  sys.dipole_decay = dipole_decay;
  sys.atom_number = atoms;
  sys.finesse = finesse;
  return sys;
}

}  // namespace

const std::vector<SpeciesRecord>& builtin_catalog() {
  static const std::vector<SpeciesRecord> catalog = [] {
    std::vector<SpeciesRecord> rows;
    // Radiatively limited rows use Gamma_2 = gamma/2; the others assume a
    // 1 s coherence time.
    rows.push_back({"Mg", "1S0-3P1",
                    make_system(457e-9, two_pi * 31.0, two_pi * 31.0 / 2.0,
                                1e4, 1e4)});
    rows.push_back({"Sr", "1S0-3P0",
                    make_system(698e-9, two_pi * 1e-3, 1.0, 1e5, 1e5)});
    rows.push_back({"Yb", "1S0-3P0",
                    make_system(578e-9, two_pi * 44e-3, 1.0, 1e4, 5e4)});
    rows.push_back({"Hg", "1S0-3P0",
                    make_system(265.6e-9, two_pi * 100e-3, 1.0, 1e4, 1e5)});
    rows.push_back({"Sr-rad", "1S0-3P0",
                    make_system(698e-9, two_pi * 1e-3, two_pi * 1e-3 / 2.0,
                                1e4, 5e3)});
    return rows;
  }();
  return catalog;
}

std::string builtin_catalog_version() { return "builtin-1"; }

std::vector<SpeciesRecord> load_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("catalog: cannot open " + path);

  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("catalog: invalid JSON in " + path + ": " +
                                e.what());
  }
  if (!doc.is_array()) {
    throw std::invalid_argument("catalog: expected a JSON array of records");
  }

  std::vector<SpeciesRecord> rows;
  for (const auto& rec : doc) {
    try {
      SpeciesRecord row;
      row.name = rec.at("name").get<std::string>();
      if (rec.contains("transition"))
        row.transition = rec["transition"].get<std::string>();
      PhysicalSystem& sys = row.system;
      sys.wavelength_m = rec.at("lambda_m").get<double>();
      sys.gamma = rec.at("gamma_rad_s").get<double>();
      const auto& t2 = rec.at("T2_s");
      if (t2.is_string()) {
        if (t2.get<std::string>() != "radiative")
          throw std::invalid_argument("T2_s must be seconds or \"radiative\"");
        sys.dipole_decay = 0.5 * sys.gamma;
      } else {
        sys.dipole_decay = 1.0 / t2.get<double>();
      }
      sys.atom_number = rec.at("N").get<double>();
      sys.finesse = rec.at("finesse").get<double>();
      if (rec.contains("mode_area_m2"))
        sys.mode_area_m2 = rec["mode_area_m2"].get<double>();
      if (rec.contains("beta")) sys.beta = rec["beta"].get<double>();
      derive_params(sys);  // reject non-physical rows up front
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument("catalog: bad record in " + path + ": " +
                                  e.what());
    }
  }
  return rows;
}

const SpeciesRecord* find_species(const std::vector<SpeciesRecord>& catalog,
                                  std::string_view name) {
  for (const auto& row : catalog) {
    if (row.name == name) return &row;
  }
  return nullptr;
}

}  // namespace cavlock
