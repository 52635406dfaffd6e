#include "optomech/pump_geometry.hpp"

#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kDivergenceFloor = 1e-14;

}  // namespace

void validate(const CavitySpec& spec) {
    if (!(std::isfinite(spec.length) && spec.length > 0.0))
        throw InvalidParameter("cavity length must be positive");
    if (!(std::isfinite(spec.wavenumber) && spec.wavenumber > 0.0))
        throw InvalidParameter("wavenumber must be positive");
    if (!(std::abs(spec.reflectivity) < 1.0))
        throw InvalidParameter("reflectivity must satisfy |r| < 1");
    if (!(std::isfinite(spec.transmissivity) && spec.transmissivity >= 0.0))
        throw InvalidParameter("transmissivity must be non-negative");
    if (spec.reflectivity * spec.reflectivity + spec.transmissivity * spec.transmissivity > 1.0 + 1e-12)
        throw InvalidParameter("passive mirrors need r^2 + t^2 <= 1");
}

double chi_for_geometry(PumpGeometry g, double chi) {
    if (!(chi >= 0.0)) throw InvalidParameter("chi must be non-negative");
    switch (g) {
        case PumpGeometry::symmetric: return 0.5 * chi;
        case PumpGeometry::from_fixed_mirror: return chi;
        case PumpGeometry::from_moving_mirror: return 0.0;
    }
    return chi;
}

ModelParams apply_geometry(const ModelParams& m, PumpGeometry g) {
    ModelParams out = m;
    out.chi = chi_for_geometry(g, m.chi);
    return out;
}

InteractionForm interaction_form(PumpGeometry g) {
    switch (g) {
        case PumpGeometry::symmetric: return {0.5, 1.0};
        case PumpGeometry::from_fixed_mirror: return {1.0, 1.0};
        case PumpGeometry::from_moving_mirror: return {0.0, 1.0};
    }
    return {1.0, 1.0};
}

std::complex<double> lineshape(const CavitySpec& spec) {
    validate(spec);
    using namespace std::complex_literals;
    const double r2 = spec.reflectivity * spec.reflectivity;
    const double kL = spec.wavenumber * spec.length;
    const std::complex<double> denominator = 1.0 - r2 * std::exp(2.0i * kL);
    if (std::abs(denominator) < kDivergenceFloor)
        throw PhysicsError("intracavity field diverges: 1 - r^2 e^{2ikL} = 0");
    return spec.transmissivity * std::exp(1.0i * kL) / denominator;
}

std::complex<double> mode_profile(double z, const CavitySpec& spec) {
    using namespace std::complex_literals;
    const double kz = spec.wavenumber * z;
    return spec.reflectivity * std::exp(1.0i * kz) + std::exp(-1.0i * kz);
}

std::complex<double> intracavity_field(double z, const CavitySpec& spec) {
    if (!(z >= 0.0 && z <= spec.length))
        throw InvalidParameter("field position must lie in [0, L]");
    return lineshape(spec) * mode_profile(z, spec);
}

double finesse(const CavitySpec& spec) {
    const double r2 = spec.reflectivity * spec.reflectivity;
    return constants::pi * std::abs(spec.reflectivity) / (1.0 - r2);
}

std::vector<FieldSample> sample_field(const CavitySpec& spec, int samples) {
    if (samples < 2) throw InvalidParameter("field sampling needs at least 2 points");
    const std::complex<double> spectral = lineshape(spec);
    std::vector<FieldSample> out;
    out.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double z = spec.length * i / (samples - 1);
        out.push_back({z, std::norm(spectral * mode_profile(z, spec))});
    }
    return out;
}

std::string to_string(PumpGeometry g) {
    switch (g) {
        case PumpGeometry::symmetric: return "symmetric";
        case PumpGeometry::from_fixed_mirror: return "from_fixed_mirror";
        case PumpGeometry::from_moving_mirror: return "from_moving_mirror";
    }
    return "from_fixed_mirror";
}

PumpGeometry pump_geometry_from_string(const std::string& text) {
    if (text == "symmetric") return PumpGeometry::symmetric;
    if (text == "from_fixed_mirror") return PumpGeometry::from_fixed_mirror;
    if (text == "from_moving_mirror") return PumpGeometry::from_moving_mirror;
    throw InvalidParameter("unknown pump geometry '" + text +
                           "' (expected symmetric, from_fixed_mirror or from_moving_mirror)");
}

}  // namespace optomech
