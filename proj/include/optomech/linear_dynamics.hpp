#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "optomech/steady_state.hpp"
#include "optomech/units.hpp"

namespace optomech {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Spectrum = Eigen::Matrix<std::complex<double>, 6, 1>;

/// Fluctuation vector ordering: (dx, dp, dx1, dp1, dx2, dp2).
enum Quadrature : int { cav_x = 0, cav_p = 1, mirror_x = 2, mirror_p = 3, sphere_x = 4, sphere_p = 5 };

enum class Oscillator { mirror, sphere };

inline constexpr double kDefaultStabilityMargin = 1e-12;

struct StabilityReport {
    bool stable = false;
    Spectrum eigenvalues;
    double max_real = 0.0;
};

struct LinearModel {
    Matrix6 drift;
    Matrix6 diffusion;
    Spectrum eigenvalues;
    bool stable = false;
};

struct NormalMode {
    double frequency = 0.0;
    double damping = 0.0;
};

struct NormalModes {
    std::array<NormalMode, 3> modes;
    bool paired = true;   // false when some eigenvalues are real (overdamped)
};

struct SteadyCovariance {
    Matrix6 V;
    double n1 = 0.0;
    double n2 = 0.0;
    double var_x1 = 0.0;
    double var_p1 = 0.0;
    double var_x2 = 0.0;
    double var_p2 = 0.0;
    double S1 = 0.0;
    double S2 = 0.0;
};

struct LyapunovDiagnostics {
    double residual = 0.0;       // max-norm of A V + V A^T + D
    bool used_fallback = false;  // vectorized solve replaced the eigenbasis solve
};

/// Drift matrix of the linearized fluctuations. The cavity mean quadratures
/// are x = sqrt(2) Re(a_bar), p = sqrt(2) Im(a_bar).
Matrix6 build_drift(const ModelParams& m, const ClassicalSteadyState& s);

/// diag(1, 1, 0, 2 gamma1 (2 n1 + 1), 0, 2 gamma2 (2 n2 + 1)).
Matrix6 build_diffusion(const ModelParams& m);

/// stable <=> max Re(lambda) < -margin. Throws NumericalError when the
/// spectrum is not closed under conjugation.
StabilityReport stability(const Matrix6& A, double margin = kDefaultStabilityMargin);

LinearModel linearize(const ModelParams& m, const ClassicalSteadyState& s,
                      double margin = kDefaultStabilityMargin);

/// Three (frequency, damping) pairs sorted by frequency.
NormalModes normal_modes(const Matrix6& A);
NormalModes normal_modes(const Spectrum& eigenvalues);

/// Reorders `current` so that entry k continues entry k of `previous`, picking
/// the permutation with the smallest total frequency jump.
NormalModes track_modes(const NormalModes& previous, const NormalModes& current);

/// Solves A V + V A^T = -D through the eigensystem of A. Throws PhysicsError
/// for unstable A. Falls back to the vectorized solve (with a warning) when a
/// pair of eigenvalues nearly cancels or the eigenbasis is too ill-conditioned.
Matrix6 solve_lyapunov(const Matrix6& A, const Matrix6& D, LyapunovDiagnostics* diagnostics = nullptr);

double lyapunov_residual(const Matrix6& A, const Matrix6& V, const Matrix6& D);

/// (V_xx + V_pp - 1) / 2 without clamping.
double raw_occupation(const Matrix6& V, Oscillator j);

/// raw_occupation clamped at zero; warns when it is below -1e-9.
double occupation(const Matrix6& V, Oscillator j);

/// 1 / (2 min(<x_j^2>, <p_j^2>)).
double squeezing(const Matrix6& V, Oscillator j);

/// Smallest eigenvalue of the Hermitian matrix V + (i/2) sigma.
double physicality_floor(const Matrix6& V);

Matrix6 symplectic_form();

SteadyCovariance steady_covariance(const Matrix6& A, const Matrix6& D, LyapunovDiagnostics* diagnostics = nullptr);

}  // namespace optomech
