#pragma once

#include <string>

namespace optomech {

enum class SphereSite { node, antinode };

enum class DetuningMode { effective, bare };

/// Laboratory parameter set in SI units. Every frequency and rate is an
/// angular quantity (rad/s); the config layer converts from ordinary Hz.
struct PhysicalParams {
    double wavelength = 0.0;          // m
    double cavity_length = 0.0;       // m
    double cavity_decay = 0.0;        // rad/s, amplitude decay rate kappa_c
    double mirror_mass = 0.0;         // kg
    double mirror_freq = 0.0;         // rad/s
    double mirror_damping = 0.0;      // rad/s
    double sphere_radius = 0.0;       // m
    double sphere_density = 0.0;      // kg/m^3
    double refractive_index = 0.0;
    double sphere_freq = 0.0;         // rad/s
    double sphere_damping = 0.0;      // rad/s
    double cavity_waist = 0.0;        // m
    double bath_temp_mirror = 0.0;    // K
    double bath_temp_sphere = 0.0;    // K
    double input_power = 0.0;         // W
    SphereSite sphere_site = SphereSite::node;
};

/// Detuning handed to nondimensionalize(), in rad/s.
struct DetuningSpec {
    DetuningMode mode = DetuningMode::effective;
    double value = 0.0;
};

/// Dimensionless model in units of the cavity decay rate (kappa_c == 1).
struct ModelParams {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    double chi = 0.0;
    double drive = 0.0;   // |a_in|^2, photon flux per unit kappa_c
    double n1 = 0.0;
    double n2 = 0.0;
    DetuningMode detuning_mode = DetuningMode::effective;
    double detuning = 0.0;
};

/// Throws InvalidParameter naming the first field that breaks an invariant.
void validate(const PhysicalParams& p);
void validate(const ModelParams& m);

double sphere_mass(const PhysicalParams& p);
double cavity_frequency(const PhysicalParams& p);
double zero_point_length(double mass, double angular_freq);

/// Linear coupling g1 = (omega_c / L) x_{0,1}, rad/s.
double derive_g1(const PhysicalParams& p);

/// Quadratic coupling, rad/s. Negative at a node, positive at an antinode;
/// independent of the sphere radius.
double derive_g2(const PhysicalParams& p);

/// Ratio of zero-point lengths x_{0,1} / x_{0,2}.
double derive_chi(const PhysicalParams& p);

/// Bose-Einstein occupation at angular frequency omega (rad/s) and temperature T (K).
double bath_occupation(double omega, double temperature);

/// Temperature that gives occupation n at angular frequency omega. Inverse of
/// bath_occupation; n == 0 maps to T == 0.
double bath_temperature(double omega, double occupation);

ModelParams nondimensionalize(const PhysicalParams& p, DetuningSpec detuning = {});

/// Recovers the frequency-like and thermodynamic fields of PhysicalParams from
/// a model produced by nondimensionalize(); geometry and material fields are
/// copied from `reference`, which also supplies kappa_c and omega_c.
PhysicalParams redimensionalize(const ModelParams& m, const PhysicalParams& reference);

/// Detuning of a model back in rad/s.
double redimensionalize_detuning(const ModelParams& m, const PhysicalParams& reference);

/// Couplings at new mechanical frequencies by the scaling laws
/// g1 ~ omega1^{-1/2}, g2 ~ omega2^{-1}, chi ~ (omega2/omega1)^{1/2}.
/// Bath occupations are left untouched.
ModelParams rescale_frequencies(const ModelParams& reference, double omega1, double omega2);

/// A family of models sharing one physical setup, indexed by the mechanical
/// frequencies. Bath occupations follow the fixed bath temperatures.
struct FrequencyFamily {
    ModelParams reference;
    double cavity_decay = 0.0;      // rad/s, converts model frequencies back to SI
    double bath_temp_mirror = 0.0;  // K
    double bath_temp_sphere = 0.0;  // K

    static FrequencyFamily from_physical(const PhysicalParams& p, DetuningSpec detuning = {});
    ModelParams at(double omega1, double omega2) const;
};

std::string to_string(SphereSite site);
std::string to_string(DetuningMode mode);

}  // namespace optomech
