#pragma once

#include <complex>
#include <string>
#include <vector>

#include "optomech/units.hpp"

namespace optomech {

/// Which port drives the cavity.
enum class PumpGeometry { symmetric, from_fixed_mirror, from_moving_mirror };

/// Identical lossless-or-lossy mirrors of a one-dimensional Fabry-Perot cavity.
/// Reflection phases are absorbed into the length, so k L (mod 2 pi) is the
/// tuning knob.
struct CavitySpec {
    double length = 0.0;          // L
    double wavenumber = 0.0;      // k
    double reflectivity = 0.0;    // r, |r| < 1
    double transmissivity = 0.0;  // t, r^2 + t^2 <= 1
};

/// Sphere part of the interaction written as (alpha x1 - beta x2)^2.
struct InteractionForm {
    double alpha = 0.0;
    double beta = 0.0;
};

struct FieldSample {
    double z = 0.0;
    double intensity = 0.0;   // |E(z)|^2
};

void validate(const CavitySpec& spec);

/// chi, chi/2 or 0 for pumping from the fixed mirror, both ends, or the moving mirror.
double chi_for_geometry(PumpGeometry g, double chi);

/// Model with chi replaced by its geometry-specific value. g2 is unchanged.
ModelParams apply_geometry(const ModelParams& m, PumpGeometry g);

InteractionForm interaction_form(PumpGeometry g);

/// Spectral factor t e^{ikL} / (1 - r^2 e^{2ikL}). Throws PhysicsError where
/// the denominator vanishes.
std::complex<double> lineshape(const CavitySpec& spec);

/// Standing-wave profile r e^{ikz} + e^{-ikz}, z measured from the moving mirror.
std::complex<double> mode_profile(double z, const CavitySpec& spec);

/// Intracavity field normalized to the input, lineshape() * mode_profile().
std::complex<double> intracavity_field(double z, const CavitySpec& spec);

/// pi |r| / (1 - r^2).
double finesse(const CavitySpec& spec);

/// |E(z)|^2 on `samples` equally spaced points of [0, L].
std::vector<FieldSample> sample_field(const CavitySpec& spec, int samples);

std::string to_string(PumpGeometry g);
PumpGeometry pump_geometry_from_string(const std::string& text);

}  // namespace optomech
