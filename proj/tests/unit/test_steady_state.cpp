#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "optomech/errors.hpp"
#include "optomech/presets.hpp"
#include "optomech/steady_state.hpp"

using namespace optomech;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelParams simple_model() {
    ModelParams m;
    m.omega1 = 10.0;
    m.omega2 = 3.4;
    m.gamma1 = 1e-3;
    m.gamma2 = 1e-6;
    m.g1 = 1e-3;
    m.g2 = -2.4e-10;
    m.chi = 3.7e-3;
    m.drive = 1e9;
    m.detuning = -20.0;
    return m;
}

ModelParams random_model(std::mt19937_64& rng) {
    auto u = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    ModelParams m;
    m.omega1 = u(1.0, 30.0);
    m.omega2 = u(0.5, 30.0);
    m.gamma1 = std::pow(10.0, u(-5, -1));
    m.gamma2 = std::pow(10.0, u(-8, -1));
    m.g1 = std::pow(10.0, u(-5, -2));
    m.g2 = (u(0, 1) < 0.5 ? -1 : 1) * std::pow(10.0, u(-11, -8));
    m.chi = std::pow(10.0, u(-4, -1));
    m.drive = std::pow(10.0, u(0, 9));
    m.detuning = u(-40.0, 40.0);
    return m;
}

}  // namespace

TEST_CASE("intracavity amplitude", "[steady]") {
    const auto a0 = intracavity_amplitude(0.0, 1.0);
    CHECK_THAT(a0.real(), WithinAbs(-std::sqrt(2.0), 1e-15));
    CHECK_THAT(a0.imag(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::norm(intracavity_amplitude(-1.0, 1.0)), WithinRel(1.0, 1e-14));
    CHECK(std::norm(intracavity_amplitude(1e8, 1.0)) < 1e-15);
    for (double d : {-27.2, -3.0, 0.5, 12.0}) {
        const std::complex<double> a_in(0.3, -1.1);
        CHECK_THAT(std::norm(intracavity_amplitude(d, a_in)), WithinRel(2.0 * std::norm(a_in) / (d * d + 1.0), 1e-13));
    }
}

TEST_CASE("effective frequencies", "[steady]") {
    ModelParams m = simple_model();
    SECTION("no quadratic coupling leaves the bare frequencies") {
        m.g2 = 0.0;
        const auto f = effective_frequencies(m, 1e9);
        CHECK(f.omega1 == m.omega1);
        CHECK(f.omega2 == m.omega2);
    }
    SECTION("chi = 0 leaves omega1 unchanged") {
        m.chi = 0.0;
        const auto f = effective_frequencies(m, 1e8);
        CHECK(f.omega1 == m.omega1);
        CHECK_THAT(f.omega2, WithinRel(m.omega2 + 2.0 * m.g2 * 1e8, 1e-15));
    }
    SECTION("hybridization numbers") {
        const auto f = effective_frequencies(m, 1e8);
        CHECK_THAT(f.omega2, WithinRel(3.352, 1e-12));
        const double chi2 = m.chi * m.chi;
        const double oracle = 10.0 + 2.0 * m.g2 * chi2 * 1e8 - 4.0 * m.g2 * m.g2 * chi2 * 1e16 / 3.352;
        CHECK_THAT(f.omega1, WithinRel(oracle, 1e-14));
    }
    SECTION("an inverted sphere trap is a physics error") {
        CHECK_THROWS_AS(effective_frequencies(m, m.omega2 / (2.0 * std::abs(m.g2))), PhysicsError);
        CHECK_THROWS_AS(effective_frequencies(m, 2e10), PhysicsError);
    }
}

TEST_CASE("classical fixed point", "[steady]") {
    SECTION("no linear coupling means no displacement") {
        ModelParams m = simple_model();
        m.g1 = 0.0;
        const auto s = classical_fixed_point(m);
        CHECK(s.x1_bar == 0.0);
        CHECK(s.x2_bar == 0.0);
    }
    SECTION("chi = 0 gives the standard mirror displacement") {
        ModelParams m = simple_model();
        m.chi = 0.0;
        const auto s = classical_fixed_point(m);
        CHECK(s.x2_bar == 0.0);
        CHECK_THAT(s.x1_bar, WithinRel(m.g1 * s.photon_number / m.omega1, 1e-15));
    }
    SECTION("g2 = 0 is linear optomechanics") {
        ModelParams m = simple_model();
        m.g2 = 0.0;
        const auto s = classical_fixed_point(m);
        CHECK(s.x2_bar == 0.0);
        CHECK_THAT(s.x1_bar, WithinRel(m.g1 * s.photon_number / m.omega1, 1e-15));
    }
    SECTION("the amplitude is real and positive") {
        const auto s = classical_fixed_point(simple_model());
        CHECK(s.a_bar.imag() == 0.0);
        CHECK(s.a_bar.real() > 0.0);
        CHECK_THAT(std::norm(s.a_in), WithinRel(1e9, 1e-13));
        const auto back = intracavity_amplitude(s.delta_eff, s.a_in);
        CHECK_THAT(back.real(), WithinRel(s.a_bar.real(), 1e-13));
        CHECK_THAT(back.imag(), WithinAbs(0.0, 1e-9));
    }
    SECTION("bare detuning is rejected") {
        ModelParams m = simple_model();
        m.detuning_mode = DetuningMode::bare;
        CHECK_THROWS_AS(classical_fixed_point(m), InvalidParameter);
    }
}

TEST_CASE("fixed points are stationary and self-consistent", "[steady][property]") {
    std::mt19937_64 rng(7);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const ModelParams m = random_model(rng);
        ClassicalSteadyState s;
        try {
            s = classical_fixed_point(m);
        } catch (const PhysicsError&) {
            continue;
        }
        ++checked;
        CHECK(stationarity_residuals(m, s).max() < 1e-10);
        const double photons = s.photon_number;
        CHECK_THAT(photons, WithinRel(2.0 * m.drive / (m.detuning * m.detuning + 1.0), 1e-14));
        CHECK_THAT(s.x2_bar * s.omega2_eff, WithinRel(2.0 * m.g2 * m.chi * photons * s.x1_bar, 1e-14));
        const double closed = 2.0 * m.g1 * m.g2 * m.chi * photons * photons / (s.omega1_eff * s.omega2_eff);
        CHECK_THAT(s.x2_bar, WithinRel(closed, 1e-14));
        CHECK_THAT(effective_detuning(s.delta_bare, s.x1_bar, s.x2_bar, m), WithinAbs(s.delta_eff, 1e-9 * std::max(1.0, std::abs(s.delta_bare))));
    }
    CHECK(checked > 900);
}

TEST_CASE("effective detuning", "[steady]") {
    ModelParams m = simple_model();
    CHECK(effective_detuning(-3.0, 0.0, 0.0, m) == -3.0);
    m.g2 = 0.0;
    CHECK_THAT(effective_detuning(-10.0, 1e3, 5.0, m), WithinRel(-9.0, 1e-15));
    m.g2 = -2.4e-10;
    CHECK_THAT(effective_detuning(-10.0, 1e3, 0.0, m), WithinRel(-9.0, 1e-6));
}

TEST_CASE("photon number is continuous in the detuning", "[steady]") {
    const ModelParams m = simple_model();
    double previous = fixed_point_at(m, -40.0).photon_number;
    for (double d = -40.0; d <= -1.0; d += 1e-3) {
        const double n = fixed_point_at(m, d).photon_number;
        CHECK(std::abs(n - previous) <= 1e-2 * std::max(n, previous));
        previous = n;
    }
}

TEST_CASE("self-consistent solver", "[steady]") {
    SECTION("without couplings the effective detuning is the bare one") {
        ModelParams m = simple_model();
        m.g1 = m.g2 = 0.0;
        m.detuning_mode = DetuningMode::bare;
        m.detuning = -7.5;
        const auto states = solve_self_consistent(m);
        REQUIRE(states.size() == 1);
        CHECK_THAT(states[0].delta_eff, WithinAbs(-7.5, 1e-11));
    }
    SECTION("weak drive") {
        ModelParams m = simple_model();
        m.detuning_mode = DetuningMode::bare;
        m.detuning = -12.0;
        m.drive = 1e-3;
        const auto states = solve_self_consistent(m);
        REQUIRE(states.size() == 1);
        CHECK_THAT(states[0].delta_eff, WithinAbs(-12.0, 1e-9));
        CHECK(stationarity_residuals(m, states[0]).max() < 1e-10);
    }
    SECTION("strong red-detuned drive is bistable") {
        ModelParams m = simple_model();
        m.g2 = 0.0;
        m.detuning_mode = DetuningMode::bare;
        m.detuning = -10.0;
        m.drive = 1.5e8;   // g1^2 * 2 drive / omega1 = 30
        const auto states = solve_self_consistent(m);

        // Oracle: count sign changes of delta - Delta - g1^2 n(delta) / omega1 on a fine grid.
        int sign_changes = 0;
        auto f = [&](double d) { return d - m.detuning - m.g1 * m.g1 * 2.0 * m.drive / (d * d + 1.0) / m.omega1; };
        double prev = f(-60.0);
        for (double d = -60.0 + 1e-4; d <= 60.0; d += 1e-4) {
            const double v = f(d);
            if (std::signbit(v) != std::signbit(prev)) ++sign_changes;
            prev = v;
        }
        CHECK(sign_changes == 3);
        REQUIRE(states.size() == 3);
        for (std::size_t i = 0; i < states.size(); ++i) {
            CHECK(std::abs(f(states[i].delta_eff)) < 1e-9);
            CHECK(stationarity_residuals(m, states[i]).max() < 1e-10);
            if (i > 0) CHECK(states[i].photon_number > states[i - 1].photon_number);
        }
    }
    SECTION("effective mode is rejected") {
        CHECK_THROWS_AS(solve_self_consistent(simple_model()), InvalidParameter);
    }
}
