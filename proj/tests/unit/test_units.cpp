#include "catch_amalgamated.hpp"

#include <cmath>

#include "optomech/constants.hpp"
#include "optomech/errors.hpp"
#include "optomech/presets.hpp"
#include "optomech/units.hpp"

using namespace optomech;
using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double two_pi = 6.283185307179586;

// Independent CODATA values for the oracles below.
constexpr double hbar = 1.054571817e-34;
constexpr double c_light = 299792458.0;
constexpr double k_boltzmann = 1.380649e-23;

double oracle_g2(double n, double wavelength, double length, double density, double waist, double omega2) {
    const double omega_c = two_pi * c_light / wavelength;
    return -12.0 * 3.141592653589793 * (n * n - 1.0) / (n * n + 2.0) * (omega_c / length) * hbar /
           (density * std::pow(wavelength * waist, 2) * omega2);
}

PhysicalParams at_frequencies(double f1_hz, double f2_hz) {
    PhysicalParams p = nominal_physical();
    p.mirror_freq = two_pi * f1_hz;
    p.sphere_freq = two_pi * f2_hz;
    return p;
}

}  // namespace

TEST_CASE("g1 of the nominal mirror is about 2 pi x 36 Hz", "[units]") {
    const double g1 = derive_g1(nominal_physical());
    CHECK_THAT(g1 / two_pi, WithinRel(36.0, 0.03));
    // Oracle: (2 pi c / lambda) / L * sqrt(hbar / (m omega)).
    const double oracle = two_pi * c_light / 1064e-9 / 0.5e-2 * std::sqrt(hbar / (40e-12 * two_pi * 1e6));
    CHECK_THAT(g1, WithinRel(oracle, 1e-9));
}

TEST_CASE("g1 scales as omega1^-1/2", "[units]") {
    PhysicalParams p = nominal_physical();
    const double base = derive_g1(p);
    p.mirror_freq *= 4.0;
    CHECK_THAT(derive_g1(p), WithinRel(base / 2.0, 1e-14));
}

TEST_CASE("g1 at omega1 = 10 kappa_c is about 1.0e-3 kappa_c", "[units]") {
    const PhysicalParams p = at_frequencies(500e3, 170e3);
    CHECK_THAT(derive_g1(p) / p.cavity_decay, WithinRel(1.0e-3, 0.15));
}

TEST_CASE("g2 at a node is about -2 pi x 10 uHz and independent of radius", "[units]") {
    PhysicalParams p = nominal_physical();
    const double g2 = derive_g2(p);
    CHECK(g2 < 0.0);
    CHECK_THAT(g2 / two_pi, WithinRel(-10e-6, 0.10));
    CHECK_THAT(g2, WithinRel(oracle_g2(1.5, 1064e-9, 0.5e-2, 2650.0, 40e-6, two_pi * 200e3), 1e-9));

    p.sphere_radius *= 3.0;
    CHECK(derive_g2(p) == g2);

    p.sphere_site = SphereSite::antinode;
    CHECK_THAT(derive_g2(p), WithinRel(-g2, 1e-15));
}

TEST_CASE("g2 at omega2 = 3.4 kappa_c lies near the reference -2.4e-10", "[units]") {
    const PhysicalParams p = at_frequencies(500e3, 170e3);
    const double g2 = derive_g2(p) / p.cavity_decay;
    CHECK_THAT(g2, WithinRel(oracle_g2(1.5, 1064e-9, 0.5e-2, 2650.0, 40e-6, two_pi * 170e3) / p.cavity_decay, 1e-9));
    CHECK(g2 < -2.4e-10);
    CHECK(g2 > -2.6e-10);
    CHECK_THAT(g2, WithinRel(-2.4e-10, 0.15));
}

TEST_CASE("chi is the ratio of zero-point lengths", "[units]") {
    SECTION("identical oscillators give chi = 1") {
        PhysicalParams p = nominal_physical();
        p.sphere_freq = p.mirror_freq;
        p.mirror_mass = sphere_mass(p);
        CHECK_THAT(derive_chi(p), WithinRel(1.0, 1e-14));
    }
    SECTION("nominal set gives about 2.6e-3, not 2.9e-2") {
        const double m2 = 2650.0 * 4.0 / 3.0 * 3.141592653589793 * std::pow(0.5e-6, 3);
        const double oracle = std::sqrt(m2 * 200e3 / (40e-12 * 1e6));
        const double chi = derive_chi(nominal_physical());
        CHECK_THAT(chi, WithinRel(oracle, 1e-12));
        CHECK_THAT(chi, WithinRel(2.6e-3, 0.05));
    }
    SECTION("omega1 = 10, omega2 = 3.4 gives 3.4 to 3.7e-3") {
        const double chi = derive_chi(at_frequencies(500e3, 170e3));
        CHECK(chi > 3.3e-3);
        CHECK(chi < 3.8e-3);
        CHECK_THAT(chi, WithinRel(3.7e-3, 0.15));
    }
    SECTION("chi depends on the radius") {
        PhysicalParams p = nominal_physical();
        const double chi = derive_chi(p);
        p.sphere_radius *= 2.0;
        CHECK_THAT(derive_chi(p), WithinRel(chi * std::pow(2.0, 1.5), 1e-13));
    }
}

TEST_CASE("bath occupation", "[units]") {
    CHECK(bath_occupation(two_pi * 1e6, 0.0) == 0.0);
    CHECK(bath_occupation(1.0, 0.0) == 0.0);

    const double omega = two_pi * 170e3;
    // Oracle: direct Bose-Einstein evaluation in long double.
    const long double x = static_cast<long double>(hbar) * omega / (static_cast<long double>(k_boltzmann) * 1.0L);
    const double oracle = static_cast<double>(1.0L / std::expm1(x));
    CHECK_THAT(bath_occupation(omega, 1.0), WithinRel(oracle, 1e-8));
    CHECK_THAT(bath_occupation(omega, 1.0), WithinRel(1.2e5, 0.05));

    for (double T : {1e-3, 0.05, 1.0, 300.0}) {
        const double ratio = k_boltzmann * T / (hbar * omega);
        if (ratio > 50.0) CHECK_THAT(bath_occupation(omega, T), WithinRel(ratio, 0.01));
    }

    double previous = 0.0;
    for (double T = 1e-4; T < 10.0; T *= 1.7) {
        const double n = bath_occupation(omega, T);
        CHECK(n > previous);
        previous = n;
    }
    CHECK_THROWS_AS(bath_occupation(omega, -1.0), InvalidParameter);
    CHECK_THROWS_AS(bath_occupation(0.0, 1.0), InvalidParameter);
    CHECK_THAT(bath_temperature(omega, bath_occupation(omega, 0.37)), WithinRel(0.37, 1e-12));
}

TEST_CASE("nondimensionalize expresses everything in units of kappa_c", "[units]") {
    PhysicalParams p = at_frequencies(500e3, 170e3);
    ModelParams m = nondimensionalize(p);
    CHECK_THAT(m.omega1, WithinRel(10.0, 1e-14));
    CHECK_THAT(m.omega2, WithinRel(3.4, 1e-14));
    CHECK_THAT(m.gamma1, WithinRel(2.8e-3, 1e-12));
    CHECK_THAT(m.gamma2, WithinRel(1e-8, 1e-12));
    CHECK(m.drive == 0.0);

    p.input_power = 1e-3;
    m = nondimensionalize(p);
    const double oracle = 1e-3 / (hbar * two_pi * c_light / 1064e-9 * two_pi * 50e3);
    CHECK_THAT(m.drive, WithinRel(oracle, 1e-8));

    const ModelParams fig4 = nondimensionalize(at_frequencies(1e6, 500e3));
    CHECK_THAT(fig4.omega1, WithinRel(20.0, 1e-14));
    CHECK_THAT(fig4.g1, WithinRel(7.2e-4, 0.15));

    PhysicalParams bad = p;
    bad.cavity_decay = 0.0;
    CHECK_THROWS_AS(nondimensionalize(bad), InvalidParameter);
}

TEST_CASE("round trip through model units keeps 12 significant digits", "[units]") {
    PhysicalParams p = nominal_physical();
    p.bath_temp_mirror = 0.05;
    p.bath_temp_sphere = 1.0;
    p.input_power = 2.5e-4;
    const PhysicalParams back = redimensionalize(nondimensionalize(p), p);
    CHECK_THAT(back.mirror_freq, WithinRel(p.mirror_freq, 1e-12));
    CHECK_THAT(back.sphere_freq, WithinRel(p.sphere_freq, 1e-12));
    CHECK_THAT(back.mirror_damping, WithinRel(p.mirror_damping, 1e-12));
    CHECK_THAT(back.sphere_damping, WithinRel(p.sphere_damping, 1e-12));
    CHECK_THAT(back.input_power, WithinRel(p.input_power, 1e-12));
    CHECK_THAT(back.bath_temp_mirror, WithinRel(p.bath_temp_mirror, 1e-12));
    CHECK_THAT(back.bath_temp_sphere, WithinRel(p.bath_temp_sphere, 1e-12));
    CHECK(back.sphere_site == p.sphere_site);

    DetuningSpec d{DetuningMode::bare, -two_pi * 1.36e6};
    CHECK_THAT(redimensionalize_detuning(nondimensionalize(p, d), p), WithinRel(d.value, 1e-12));
}

TEST_CASE("scaling laws agree with a fresh derivation at new frequencies", "[units]") {
    const ModelParams reference = nondimensionalize(nominal_physical());
    for (auto [f1, f2] : {std::pair{500e3, 170e3}, std::pair{1e6, 500e3}, std::pair{750e3, 75e3}}) {
        const ModelParams direct = nondimensionalize(at_frequencies(f1, f2));
        const ModelParams scaled = rescale_frequencies(reference, f1 / 50e3, f2 / 50e3);
        CHECK_THAT(scaled.g1, WithinRel(direct.g1, 1e-12));
        CHECK_THAT(scaled.g2, WithinRel(direct.g2, 1e-12));
        CHECK_THAT(scaled.chi, WithinRel(direct.chi, 1e-12));
    }
}

TEST_CASE("preset parameter sets follow from the nominal set within 15%", "[units]") {
    const ModelParams reference = nondimensionalize(nominal_physical());
    const ModelParams fig3 = rescale_frequencies(reference, 10.0, 3.4);
    CHECK_THAT(fig3.g1, WithinRel(1.0e-3, 0.15));
    CHECK_THAT(fig3.g2, WithinRel(-2.4e-10, 0.15));
    CHECK_THAT(fig3.chi, WithinRel(3.7e-3, 0.15));
    const ModelParams fig4 = rescale_frequencies(reference, 20.0, 10.0);
    CHECK_THAT(fig4.g1, WithinRel(7.2e-4, 0.15));
    CHECK_THAT(100.0 * fig4.g2, WithinRel(-8.0e-9, 0.15));
    CHECK_THAT(fig4.chi, WithinRel(4.5e-3, 0.15));
}

TEST_CASE("frequency families recompute bath occupations", "[units]") {
    PhysicalParams p = nominal_physical();
    p.bath_temp_mirror = 0.05;
    p.bath_temp_sphere = 1.0;
    const FrequencyFamily family = FrequencyFamily::from_physical(p);
    const ModelParams m = family.at(10.0, 3.4);
    CHECK_THAT(m.n1, WithinRel(bath_occupation(10.0 * p.cavity_decay, 0.05), 1e-14));
    CHECK_THAT(m.n2, WithinRel(bath_occupation(3.4 * p.cavity_decay, 1.0), 1e-14));
}

TEST_CASE("invalid physical parameters are rejected", "[units]") {
    auto rejects = [](auto mutate) {
        PhysicalParams p = nominal_physical();
        mutate(p);
        CHECK_THROWS_AS(validate(p), InvalidParameter);
    };
    rejects([](PhysicalParams& p) { p.mirror_mass = -1.0; });
    rejects([](PhysicalParams& p) { p.refractive_index = 1.0; });
    rejects([](PhysicalParams& p) { p.bath_temp_sphere = -1.0; });
    rejects([](PhysicalParams& p) { p.wavelength = 0.0; });
    rejects([](PhysicalParams& p) { p.sphere_density = std::nan(""); });
    CHECK_NOTHROW(validate(nominal_physical()));

    ModelParams m = fig3_model();
    m.chi = -1e-3;
    CHECK_THROWS_AS(validate(m), InvalidParameter);
}
