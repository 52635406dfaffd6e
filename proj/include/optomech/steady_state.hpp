#pragma once

#include <complex>
#include <vector>

#include "optomech/units.hpp"

namespace optomech {

/// Mean-field fixed point in model units (kappa_c == 1).
struct ClassicalSteadyState {
    std::complex<double> a_bar;      // intracavity amplitude
    std::complex<double> a_in;       // input amplitude that produces a_bar
    double x1_bar = 0.0;             // mirror displacement
    double x2_bar = 0.0;             // sphere displacement
    double omega1_eff = 0.0;         // Omega_1
    double omega2_eff = 0.0;         // Omega_2
    double delta_eff = 0.0;          // effective detuning
    double delta_bare = 0.0;         // laser-cavity detuning Delta
    double photon_number = 0.0;      // |a_bar|^2
};

struct EffectiveFrequencies {
    double omega1 = 0.0;
    double omega2 = 0.0;
};

/// Relative residuals of the zero-noise, zero-derivative equations of motion.
/// Each residual is divided by max(1, largest term in its equation).
struct StationarityResiduals {
    double cavity = 0.0;
    double mirror = 0.0;
    double sphere = 0.0;

    double max() const;
};

/// a = sqrt(2) a_in / (i delta_eff - 1).
std::complex<double> intracavity_amplitude(double delta_eff, std::complex<double> a_in);

/// Omega_1, Omega_2 at the given photon number. Throws PhysicsError when
/// Omega_2 <= 0: the sphere trap is flat or inverted.
EffectiveFrequencies effective_frequencies(const ModelParams& m, double photon_number);

/// Delta + g1 x1 - g2 (chi x1 - x2)^2.
double effective_detuning(double delta_bare, double x1_bar, double x2_bar, const ModelParams& m);

/// Fixed point for a model parameterized by its effective detuning. The input
/// phase is chosen so that a_bar is real and positive.
ClassicalSteadyState classical_fixed_point(const ModelParams& m);

/// Same, at an explicit effective detuning; the detuning fields of `m` are ignored.
ClassicalSteadyState fixed_point_at(const ModelParams& m, double delta_eff);

/// All fixed points of a model parameterized by its bare detuning, sorted by
/// photon number. More than one entry means optical bistability.
std::vector<ClassicalSteadyState> solve_self_consistent(const ModelParams& m);

/// Residual of delta_eff - effective_detuning(...) at the fixed point for
/// delta_eff. Zero on the self-consistent branch. NaN where the trap is degenerate.
double self_consistency_residual(const ModelParams& m, double delta_eff);

StationarityResiduals stationarity_residuals(const ModelParams& m, const ClassicalSteadyState& s);

}  // namespace optomech
