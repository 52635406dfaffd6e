#include "optomech/presets.hpp"

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kappa_c = constants::two_pi * 50e3;
constexpr double gamma1_model = 140.0 / 50e3;
constexpr double gamma2_model = 0.5e-3 / 50e3;

}  // namespace

Preset preset_from_string(const std::string& text) {
    if (text == "none" || text.empty()) return Preset::none;
    if (text == "fig2") return Preset::fig2;
    if (text == "fig3") return Preset::fig3;
    if (text == "fig4") return Preset::fig4;
    throw InvalidParameter("unknown preset '" + text + "' (none, fig2, fig3, fig4)");
}

std::string to_string(Preset p) {
    switch (p) {
        case Preset::none: return "none";
        case Preset::fig2: return "fig2";
        case Preset::fig3: return "fig3";
        case Preset::fig4: return "fig4";
    }
    return "none";
}

PhysicalParams nominal_physical() {
    PhysicalParams p;
    p.wavelength = 1064e-9;
    p.cavity_length = 0.5e-2;
    p.cavity_decay = kappa_c;
    p.mirror_mass = 40e-12;
    p.mirror_freq = constants::two_pi * 1e6;
    p.mirror_damping = constants::two_pi * 140.0;
    p.sphere_radius = 0.5e-6;
    p.sphere_density = 2650.0;
    p.refractive_index = 1.5;
    p.sphere_freq = constants::two_pi * 200e3;
    p.sphere_damping = constants::two_pi * 0.5e-3;
    p.cavity_waist = 40e-6;
    p.bath_temp_mirror = 0.0;
    p.bath_temp_sphere = 0.0;
    p.input_power = 0.0;
    p.sphere_site = SphereSite::node;
    return p;
}

ModelParams fig3_model() {
    ModelParams m;
    m.omega1 = 10.0;
    m.omega2 = 3.4;
    m.gamma1 = gamma1_model;
    m.gamma2 = gamma2_model;
    m.g1 = 1.0e-3;
    m.g2 = -2.4e-10;
    m.chi = 3.7e-3;
    m.drive = 0.0;
    m.n1 = bath_occupation(m.omega1 * kappa_c, 1.0);
    m.n2 = bath_occupation(m.omega2 * kappa_c, 1.0);
    m.detuning_mode = DetuningMode::effective;
    m.detuning = -27.2;
    return m;
}

PowerGrid fig3_grid() {
    return PowerGrid{1e9, 1e11, 200, true};
}

ModelParams fig4_model(bool scaled_g2) {
    ModelParams m;
    m.omega1 = 20.0;
    m.omega2 = 10.0;
    m.gamma1 = gamma1_model;
    m.gamma2 = gamma2_model;
    m.g1 = 7.2e-4;
    m.g2 = scaled_g2 ? -8.0e-9 : -8.0e-11;
    m.chi = 4.5e-3;
    m.drive = 0.0;
    m.n1 = 0.0;
    m.n2 = 0.0;
    m.detuning_mode = DetuningMode::effective;
    m.detuning = -10.0;
    return m;
}

PowerGrid fig4_grid() {
    return PowerGrid{1e8, 1e11, 400, true};
}

LandscapeSpec fig2_landscape() {
    PhysicalParams p = nominal_physical();
    p.bath_temp_mirror = 50e-3;
    p.bath_temp_sphere = 1.0;
    LandscapeSpec spec;
    spec.family = FrequencyFamily::from_physical(p);
    return spec;
}

RunInput preset_input(Preset p) {
    RunInput in;
    switch (p) {
        case Preset::none:
            break;
        case Preset::fig2: {
            PhysicalParams phys = nominal_physical();
            phys.bath_temp_mirror = 50e-3;
            phys.bath_temp_sphere = 1.0;
            in.physical = phys;
            in.sweep = SweepConfig{SweepKind::landscape, {}, fig2_landscape()};
            break;
        }
        case Preset::fig3:
            in.model = fig3_model();
            in.sweep = SweepConfig{SweepKind::power, fig3_grid(), {}};
            break;
        case Preset::fig4:
            in.model = fig4_model(true);
            in.sweep = SweepConfig{SweepKind::squeezing, fig4_grid(), {}};
            break;
    }
    return in;
}

}  // namespace optomech
