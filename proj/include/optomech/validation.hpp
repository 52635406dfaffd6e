#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "optomech/linear_dynamics.hpp"
#include "optomech/units.hpp"

namespace optomech {

inline constexpr double kAlgebraicTolerance = 1e-10;
inline constexpr double kMomentFlowTolerance = 1e-8;

/// Agreement of the three covariance solvers on one (A, D) pair. Differences
/// are max-norm relative to the production solution.
struct SolverComparison {
    double algebraic = 0.0;        // eigenbasis vs vectorized
    double moment_flow = 0.0;      // eigenbasis vs moment-ODE limit
    bool flow_settled = false;    // reached the horizon or converged, no divergence
    double residual = 0.0;         // ||A V + V A^T + D||_max / ||D||_max
    double physicality_floor = 0.0;
    double min_raw_occupation = 0.0;
};

SolverComparison compare_solvers(const Matrix6& A, const Matrix6& D, const Matrix6& V0);

/// Uncoupled thermal state diag(1/2, 1/2, n1 + 1/2, ..., n2 + 1/2).
Matrix6 thermal_start(const ModelParams& m);

/// Random model with an effective detuning whose drift matrix is stable.
/// Deterministic for a given generator state.
ModelParams random_stable_model(std::mt19937_64& rng);

struct ValidationCase {
    std::string label;
    ModelParams params;
    SolverComparison result;
};

struct ValidationReport {
    std::vector<ValidationCase> cases;
    double max_algebraic = 0.0;
    double max_moment_flow = 0.0;
    double max_residual = 0.0;
    double min_physicality_floor = 0.0;
    double min_raw_occupation = 0.0;
    std::string worst_algebraic;
    std::string worst_moment_flow;
    bool all_flows_settled = true;

    bool passed() const;
};

/// Fixed preset points followed by `instances` random stable draws.
ValidationReport run_validation(int instances, std::uint64_t seed, int threads = 1);

}  // namespace optomech
