#include "optomech/units.hpp"

#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require_positive(double value, const char* name) {
    if (!(std::isfinite(value) && value > 0.0))
        throw InvalidParameter(std::string(name) + " must be finite and strictly positive");
}

void require_non_negative(double value, const char* name) {
    if (!(std::isfinite(value) && value >= 0.0))
        throw InvalidParameter(std::string(name) + " must be finite and non-negative");
}

}  // namespace

void validate(const PhysicalParams& p) {
    require_positive(p.wavelength, "wavelength");
    require_positive(p.cavity_length, "cavity_length");
    require_positive(p.cavity_decay, "cavity_decay");
    require_positive(p.mirror_mass, "mirror_mass");
    require_positive(p.mirror_freq, "mirror_freq");
    require_positive(p.mirror_damping, "mirror_damping");
    require_positive(p.sphere_radius, "sphere_radius");
    require_positive(p.sphere_density, "sphere_density");
    if (!(std::isfinite(p.refractive_index) && p.refractive_index > 1.0))
        throw InvalidParameter("refractive_index must be finite and greater than 1");
    require_positive(p.sphere_freq, "sphere_freq");
    require_positive(p.sphere_damping, "sphere_damping");
    require_positive(p.cavity_waist, "cavity_waist");
    require_non_negative(p.bath_temp_mirror, "bath_temp_mirror");
    require_non_negative(p.bath_temp_sphere, "bath_temp_sphere");
    require_non_negative(p.input_power, "input_power");
    require_positive(sphere_mass(p), "sphere mass");
}

void validate(const ModelParams& m) {
    require_positive(m.omega1, "omega1");
    require_positive(m.omega2, "omega2");
    require_non_negative(m.gamma1, "gamma1");
    require_non_negative(m.gamma2, "gamma2");
    require_non_negative(m.chi, "chi");
    require_non_negative(m.drive, "drive");
    require_non_negative(m.n1, "n1");
    require_non_negative(m.n2, "n2");
    if (!std::isfinite(m.g1)) throw InvalidParameter("g1 must be finite");
    if (!std::isfinite(m.g2)) throw InvalidParameter("g2 must be finite");
    if (!std::isfinite(m.detuning)) throw InvalidParameter("detuning must be finite");
}

double sphere_mass(const PhysicalParams& p) {
    return p.sphere_density * (4.0 / 3.0) * constants::pi * std::pow(p.sphere_radius, 3);
}

double cavity_frequency(const PhysicalParams& p) {
    return constants::two_pi * constants::speed_of_light / p.wavelength;
}

double zero_point_length(double mass, double angular_freq) {
    return std::sqrt(constants::hbar / (mass * angular_freq));
}

double derive_g1(const PhysicalParams& p) {
    validate(p);
    return cavity_frequency(p) / p.cavity_length * zero_point_length(p.mirror_mass, p.mirror_freq);
}

double derive_g2(const PhysicalParams& p) {
    validate(p);
    const double n2 = p.refractive_index * p.refractive_index;
    const double clausius_mossotti = (n2 - 1.0) / (n2 + 2.0);
    const double spot = p.wavelength * p.cavity_waist;
    const double magnitude = 12.0 * constants::pi * clausius_mossotti * cavity_frequency(p) /
                             p.cavity_length * constants::hbar /
                             (p.sphere_density * spot * spot * p.sphere_freq);
    return p.sphere_site == SphereSite::node ? -magnitude : magnitude;
}

double derive_chi(const PhysicalParams& p) {
    validate(p);
    return std::sqrt(sphere_mass(p) * p.sphere_freq / (p.mirror_mass * p.mirror_freq));
}

double bath_occupation(double omega, double temperature) {
    require_positive(omega, "bath frequency");
    require_non_negative(temperature, "bath temperature");
    if (temperature == 0.0) return 0.0;
    const double x = constants::hbar * omega / (constants::boltzmann * temperature);
    return 1.0 / std::expm1(x);
}

double bath_temperature(double omega, double occupation) {
    require_positive(omega, "bath frequency");
    require_non_negative(occupation, "bath occupation");
    if (occupation == 0.0) return 0.0;
    return constants::hbar * omega / (constants::boltzmann * std::log1p(1.0 / occupation));
}

ModelParams nondimensionalize(const PhysicalParams& p, DetuningSpec detuning) {
    validate(p);
    const double kappa = p.cavity_decay;
    ModelParams m;
    m.omega1 = p.mirror_freq / kappa;
    m.omega2 = p.sphere_freq / kappa;
    m.gamma1 = p.mirror_damping / kappa;
    m.gamma2 = p.sphere_damping / kappa;
    m.g1 = derive_g1(p) / kappa;
    m.g2 = derive_g2(p) / kappa;
    m.chi = derive_chi(p);
    // The laser is taken on the cavity carrier when converting power to photon flux.
    m.drive = p.input_power / (constants::hbar * cavity_frequency(p) * kappa);
    m.n1 = bath_occupation(p.mirror_freq, p.bath_temp_mirror);
    m.n2 = bath_occupation(p.sphere_freq, p.bath_temp_sphere);
    m.detuning_mode = detuning.mode;
    m.detuning = detuning.value / kappa;
    return m;
}

PhysicalParams redimensionalize(const ModelParams& m, const PhysicalParams& reference) {
    PhysicalParams p = reference;
    const double kappa = reference.cavity_decay;
    p.mirror_freq = m.omega1 * kappa;
    p.sphere_freq = m.omega2 * kappa;
    p.mirror_damping = m.gamma1 * kappa;
    p.sphere_damping = m.gamma2 * kappa;
    p.input_power = m.drive * constants::hbar * cavity_frequency(reference) * kappa;
    p.bath_temp_mirror = bath_temperature(p.mirror_freq, m.n1);
    p.bath_temp_sphere = bath_temperature(p.sphere_freq, m.n2);
    p.sphere_site = m.g2 < 0.0 ? SphereSite::node : SphereSite::antinode;
    return p;
}

double redimensionalize_detuning(const ModelParams& m, const PhysicalParams& reference) {
    return m.detuning * reference.cavity_decay;
}

ModelParams rescale_frequencies(const ModelParams& reference, double omega1, double omega2) {
    validate(reference);
    require_positive(omega1, "omega1");
    require_positive(omega2, "omega2");
    ModelParams m = reference;
    m.omega1 = omega1;
    m.omega2 = omega2;
    m.g1 = reference.g1 * std::sqrt(reference.omega1 / omega1);
    m.g2 = reference.g2 * (reference.omega2 / omega2);
    m.chi = reference.chi * std::sqrt((omega2 / reference.omega2) * (reference.omega1 / omega1));
    return m;
}

FrequencyFamily FrequencyFamily::from_physical(const PhysicalParams& p, DetuningSpec detuning) {
    FrequencyFamily family;
    family.reference = nondimensionalize(p, detuning);
    family.cavity_decay = p.cavity_decay;
    family.bath_temp_mirror = p.bath_temp_mirror;
    family.bath_temp_sphere = p.bath_temp_sphere;
    return family;
}

ModelParams FrequencyFamily::at(double omega1, double omega2) const {
    ModelParams m = rescale_frequencies(reference, omega1, omega2);
    m.n1 = bath_occupation(omega1 * cavity_decay, bath_temp_mirror);
    m.n2 = bath_occupation(omega2 * cavity_decay, bath_temp_sphere);
    return m;
}

std::string to_string(SphereSite site) {
    return site == SphereSite::node ? "node" : "antinode";
}

std::string to_string(DetuningMode mode) {
    return mode == DetuningMode::effective ? "effective" : "bare";
}

}  // namespace optomech
