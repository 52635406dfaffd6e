#pragma once

#include <cstdint>

#include "optomech/linear_dynamics.hpp"

namespace optomech {

/// Time grid for the covariance flow dV/dt = A V + V A^T + D, in units of 1/kappa_c.
struct IntegrationSpec {
    double dt = 1e-2;
    double horizon = 1.0;
    /// Stop once ||dV/dt||_F / ||V||_F drops below this rate.
    double convergence_tol = 1e-12;
};

struct MomentFlowResult {
    Matrix6 V;
    double time = 0.0;
    std::int64_t steps = 0;
    bool converged = false;
    bool diverged = false;   // ||V||_max exceeded 1e12
};

/// dt = 1e-2 / max(|lambda|_max, 1), horizon = 50 / |max Re lambda|,
/// tolerance 1e-12 |max Re lambda| so the remaining relative error is ~1e-12.
IntegrationSpec default_integration(const Matrix6& A);

/// Classical RK4 on the moment equation, stepping V in the 21 independent
/// entries of a symmetric matrix. The one-step map is affine, so 2^k steps are
/// composed by repeated squaring; the result equals stepping one step at a time
/// up to rounding, which lets horizons of 1e9 / kappa_c finish in microseconds.
MomentFlowResult integrate_moments(const Matrix6& A, const Matrix6& D, const Matrix6& V0,
                                   const IntegrationSpec& spec);

/// Plain step-by-step RK4 on the full matrix, symmetrizing after every step.
Matrix6 propagate_moments(const Matrix6& A, const Matrix6& D, const Matrix6& V0, double dt,
                          std::int64_t steps);

/// Direct solve of (I (x) A + A (x) I) vec(V) = -vec(D). Throws NumericalError
/// when the 36x36 system is singular (marginal A).
Matrix6 lyapunov_vectorized(const Matrix6& A, const Matrix6& D);

}  // namespace optomech
