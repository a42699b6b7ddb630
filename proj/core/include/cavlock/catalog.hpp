#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cavlock/model.hpp"

namespace cavlock {

struct SpeciesRecord {
  std::string name;
  std::string transition;  // informational, e.g. "1S0-3P0"
  PhysicalSystem system;
};

// Built-in catalog of lattice-clock transitions, each with a finesse chosen
// so that the collective cooperativity N*C0 is near 100.
const std::vector<SpeciesRecord>& builtin_catalog();

std::string builtin_catalog_version();

// Loads a JSON catalog: an array of records with keys
//   {name, lambda_m, gamma_rad_s, T2_s, N, finesse, mode_area_m2, beta}
// where T2_s is either seconds or the string "radiative" (T2 = 2/gamma).
// mode_area_m2 and beta are optional. Throws std::invalid_argument on
// malformed input.
std::vector<SpeciesRecord> load_catalog(const std::string& path);

const SpeciesRecord* find_species(const std::vector<SpeciesRecord>& catalog,
                                  std::string_view name);

}  // namespace cavlock
