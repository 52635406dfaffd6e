#pragma once

#include <string>

#include "optomech/config.hpp"
#include "optomech/experiments.hpp"
#include "optomech/units.hpp"

namespace optomech {

enum class Preset { none, fig2, fig3, fig4 };

Preset preset_from_string(const std::string& text);
std::string to_string(Preset p);

/// Laboratory set: 1064 nm, L = 0.5 cm, kappa_c = 2 pi x 50 kHz, 40 ng mirror
/// at 2 pi x 1 MHz, 0.5 um silica sphere at 2 pi x 200 kHz on a node,
/// w = 40 um, gamma1 = 2 pi x 140 Hz, gamma2 = 2 pi x 0.5 mHz. Baths at 0 K,
/// no drive.
PhysicalParams nominal_physical();

/// Hybridization set: omega1 = 10, omega2 = 3.4, detuning -27.2 with the
/// reference couplings and both baths at 1 K.
ModelParams fig3_model();
PowerGrid fig3_grid();

/// Squeezing set: omega1 = 20, omega2 = 10, detuning -10, zero-temperature
/// baths. `scaled_g2` selects the enlarged g2 = -8e-9; otherwise g2 / 100.
ModelParams fig4_model(bool scaled_g2 = true);
PowerGrid fig4_grid();

/// Cooling landscape: nominal set with the mirror bath at 50 mK and the
/// sphere bath at 1 K, 20 x 20 grid, 25 x 25 coarse optimizer.
LandscapeSpec fig2_landscape();

/// Configuration equivalent to the preset, as the CLI consumes it.
RunInput preset_input(Preset p);

}  // namespace optomech
