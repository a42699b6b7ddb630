#pragma once

#include <numbers>

// Fundamental constants, SI (2019 redefinition; h, c, e are exact).
namespace cavlock::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double speed_of_light = 299'792'458.0;         // m/s
inline constexpr double planck = 6.626'070'15e-34;              // J s
inline constexpr double hbar = planck / (2.0 * pi);             // J s
inline constexpr double elementary_charge = 1.602'176'634e-19;  // C

}  // namespace cavlock::constants
