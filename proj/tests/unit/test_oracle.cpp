#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "optomech/errors.hpp"
#include "optomech/linear_dynamics.hpp"
#include "optomech/oracle.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/validation.hpp"

using namespace optomech;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_diff(const Matrix6& a, const Matrix6& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("moment flow for pure relaxation", "[oracle]") {
    const Matrix6 A = -Matrix6::Identity();
    const Matrix6 D = 2.0 * Matrix6::Identity();
    const Matrix6 V0 = 5.0 * Matrix6::Identity();
    IntegrationSpec spec;
    spec.dt = 1e-3;
    spec.horizon = 1.0;
    spec.convergence_tol = 1e-300;
    const auto r = integrate_moments(A, D, V0, spec);
    CHECK(r.steps == 1000);
    CHECK_THAT(r.time, WithinRel(1.0, 1e-12));
    CHECK_FALSE(r.diverged);
    // V(t) = I + (V0 - I) e^{-2t}
    CHECK_THAT(r.V(2, 2), WithinRel(1.0 + 4.0 * std::exp(-2.0), 1e-12));
    CHECK_THAT(r.V(0, 3), WithinAbs(0.0, 1e-15));
}

TEST_CASE("moment flow reaches the stationary covariance", "[oracle]") {
    const Matrix6 A = -Matrix6::Identity();
    const Matrix6 D = 2.0 * Matrix6::Identity();
    const auto r = integrate_moments(A, D, Matrix6::Zero(), default_integration(A));
    CHECK(max_diff(r.V, Matrix6::Identity()) < 1e-12);
}

TEST_CASE("moment flow detects divergence", "[oracle]") {
    Matrix6 A = -Matrix6::Identity();
    A(3, 3) = 0.5;
    IntegrationSpec spec;
    spec.dt = 1e-2;
    spec.horizon = 1e4;
    const auto r = integrate_moments(A, Matrix6::Identity(), Matrix6::Identity(), spec);
    CHECK(r.diverged);
    CHECK_FALSE(r.converged);
    CHECK(r.time < spec.horizon);
}

TEST_CASE("integration spec validation", "[oracle]") {
    IntegrationSpec spec;
    spec.dt = 0.0;
    CHECK_THROWS_AS(integrate_moments(-Matrix6::Identity(), Matrix6::Identity(), Matrix6::Zero(), spec),
                    InvalidParameter);
}

TEST_CASE("composed steps equal step-by-step integration", "[oracle]") {
    ModelParams m;
    m.omega1 = 10.0;
    m.omega2 = 3.4;
    m.gamma1 = 1e-2;
    m.gamma2 = 1e-2;
    m.g1 = 1e-3;
    m.g2 = -2.4e-10;
    m.chi = 3.7e-3;
    m.drive = 1e9;
    m.n1 = 10.0;
    m.n2 = 20.0;
    m.detuning = -20.0;
    const auto lm = linearize(m, classical_fixed_point(m));
    const Matrix6 V0 = thermal_start(m);
    IntegrationSpec spec;
    spec.dt = 1e-3;
    spec.horizon = 1.237;   // 1237 steps: a mix of doubled chunks and a remainder
    spec.convergence_tol = 1e-300;
    const auto composed = integrate_moments(lm.drift, lm.diffusion, V0, spec);
    const Matrix6 stepped = propagate_moments(lm.drift, lm.diffusion, V0, spec.dt, 1237);
    CHECK(composed.steps == 1237);
    CHECK(max_diff(composed.V, stepped) <= 1e-11 * stepped.cwiseAbs().maxCoeff());
}

TEST_CASE("vectorized solve on a diagonal drift", "[oracle]") {
    Matrix6 A = Matrix6::Zero();
    Matrix6 D = Matrix6::Zero();
    for (int i = 0; i < 6; ++i) {
        A(i, i) = -(i + 1.0);
        D(i, i) = i + 2.0;
    }
    const Matrix6 V = lyapunov_vectorized(A, D);
    for (int i = 0; i < 6; ++i) CHECK_THAT(V(i, i), WithinRel((i + 2.0) / (2.0 * (i + 1.0)), 1e-14));
    CHECK(max_diff(V, Matrix6(V.diagonal().asDiagonal())) < 1e-15);
}

TEST_CASE("thermal start", "[oracle]") {
    ModelParams m;
    m.n1 = 3.0;
    m.n2 = 7.0;
    const Matrix6 V = thermal_start(m);
    CHECK(V(0, 0) == 0.5);
    CHECK(V(1, 1) == 0.5);
    CHECK(V(2, 2) == 3.5);
    CHECK(V(3, 3) == 3.5);
    CHECK(V(4, 4) == 7.5);
    CHECK(V(5, 5) == 7.5);
    CHECK(V(0, 1) == 0.0);
}

TEST_CASE("three solvers agree on random stable models", "[oracle][property]") {
    std::mt19937_64 rng(20140101);
    for (int i = 0; i < 60; ++i) {
        const ModelParams m = random_stable_model(rng);
        const auto lm = linearize(m, classical_fixed_point(m));
        REQUIRE(lm.stable);
        const auto c = compare_solvers(lm.drift, lm.diffusion, thermal_start(m));
        CHECK(c.algebraic <= kAlgebraicTolerance);
        CHECK(c.moment_flow <= kMomentFlowTolerance);
        CHECK(c.flow_settled);
        CHECK(c.physicality_floor > -1e-8);
    }
}

TEST_CASE("random draws are reproducible", "[oracle]") {
    std::mt19937_64 a(5), b(5);
    for (int i = 0; i < 10; ++i) {
        const ModelParams x = random_stable_model(a);
        const ModelParams y = random_stable_model(b);
        CHECK(x.omega1 == y.omega1);
        CHECK(x.drive == y.drive);
        CHECK(x.g2 == y.g2);
    }
}
