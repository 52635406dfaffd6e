#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "optomech/linear_dynamics.hpp"
#include "optomech/steady_state.hpp"
#include "optomech/units.hpp"

namespace optomech {

enum class GridScale { linear, log };

struct Axis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int points = 2;
    GridScale scale = GridScale::linear;

    void validate() const;
    std::vector<double> values() const;
};

/// Everything derived from one model with an effective detuning.
struct PointEvaluation {
    ModelParams params;
    bool stable = false;
    std::string failure;                 // why no steady state exists, if any
    ClassicalSteadyState steady;
    Spectrum eigenvalues;
    NormalModes modes;
    std::optional<SteadyCovariance> covariance;  // stable points only
    double physicality_floor = 0.0;
    double raw_n1 = 0.0;
    double raw_n2 = 0.0;
    LyapunovDiagnostics lyapunov;
};

/// classical_fixed_point -> linearize -> steady_covariance. Deterministic:
/// the same params always give bit-identical numbers. A degenerate trap or an
/// unstable drift matrix is reported through `stable`/`failure`, not thrown.
PointEvaluation evaluate_point(const ModelParams& m);

/// Same model at another drive |a_in|^2 and effective detuning.
ModelParams with_drive(ModelParams m, double drive, std::optional<double> detuning = std::nullopt);

bool is_stable_at(const ModelParams& m, double drive);

// ---------------------------------------------------------------------------
// Instability threshold

struct ThresholdBracket {
    double stable_drive = 0.0;
    double unstable_drive = 0.0;
    double estimate() const;   // geometric midpoint
};

inline constexpr double kThresholdRelativeWidth = 1e-4;

/// Bisection on the stability verdict until unstable/stable - 1 < 1e-4.
/// Throws PhysicsError unless `lower` is stable and `upper` is unstable.
ThresholdBracket instability_threshold(const ModelParams& m, double lower, double upper);

/// Scans upward from `start` by decades up to `limit` for the first unstable
/// drive, then bisects. Empty when the model stays stable up to `limit`.
std::optional<ThresholdBracket> locate_threshold(const ModelParams& m, double start = 1.0,
                                                 double limit = 1e30);

// ---------------------------------------------------------------------------
// Two-parameter optimizer over (effective detuning, drive)

struct OptimizeBounds {
    double detuning_min = -50.0;
    double detuning_max = -1.0;
    double power_min = 1.0;     // log-spaced axis, must be > 0
    double power_max = 1e12;
    int detuning_points = 25;
    int power_points = 25;
    double step_floor = 1e-3;   // relative step at which refinement stops

    void validate() const;
};

struct OptimizeResult {
    double detuning = 0.0;
    double power = 0.0;
    double value = 0.0;          // +inf when nothing evaluable was found
    bool boundary_optimum = false;
    int evaluations = 0;
    std::string diagnostic;
};

using Objective2D = std::function<double(double detuning, double power)>;

/// Coarse grid (linear in detuning, logarithmic in power) followed by compass
/// coordinate descent with successive halving from the best grid point.
/// Deterministic. Never returns a value above the best probed grid value.
OptimizeResult optimize_scalar(const Objective2D& objective, const OptimizeBounds& bounds);

enum class ObjectiveKind { sphere_occupation, sphere_squeezing };

/// Scalar to minimize from a stable steady state: n2, or 1/S2 for squeezing.
using CovarianceObjective = std::function<double(const SteadyCovariance&)>;
CovarianceObjective make_objective(ObjectiveKind kind);

/// How the optimizer's power coordinate maps to a drive.
enum class PowerAxis {
    absolute,             // the coordinate is |a_in|^2
    threshold_fraction    // the coordinate is a fraction of the instability threshold at that detuning
};

/// Objective over (detuning, power coordinate) for a base model; +inf where the
/// model is unstable or has no steady state. Not thread-safe (threshold cache).
Objective2D covariance_objective(const ModelParams& base, CovarianceObjective objective, PowerAxis axis);

/// Drive the power coordinate maps to under `axis`.
double resolve_drive(const ModelParams& base, double detuning, double coordinate, PowerAxis axis);

// ---------------------------------------------------------------------------
// Power sweeps

struct PowerGrid {
    double min = 1.0;
    double max = 1e10;
    int points = 200;           // logarithmic
    bool include_zero = true;   // prepend an undriven reference row

    void validate() const;
    std::vector<double> values() const;
};

/// Normal modes in tracked order.
enum ModeBranch : int { cavity_branch = 0, mirror_branch = 1, sphere_branch = 2 };

struct PowerSweepRow {
    double drive = 0.0;
    bool stable = false;
    NormalModes modes;     // ordered by ModeBranch
    double n1 = 0.0;       // NaN when unstable
    double n2 = 0.0;
    ModelParams params;
};

struct HybridizationWindow {
    bool found = false;
    std::size_t index = 0;          // grid row with the smallest mechanical separation
    double drive = 0.0;             // refined drive of the smallest separation
    double separation = 0.0;
    double n1 = 0.0;
    double n2 = 0.0;
    double occupation_gap = 0.0;    // |n1 - n2| / max(n1, n2)
    std::vector<std::size_t> equal_occupation_rows;   // rows with gap < 0.1
};

struct PowerSweepResult {
    std::vector<PowerSweepRow> rows;
    std::optional<ThresholdBracket> threshold;
    HybridizationWindow hybridization;
    /// Row minimizing the sphere occupation.
    std::optional<std::size_t> best_cooling_row;
};

/// Drive sweep at fixed detuning with mode tracking; stops at the first
/// unstable drive and bisects the threshold between it and its predecessor.
PowerSweepResult power_sweep(const ModelParams& m, const PowerGrid& grid);

struct SqueezingRow {
    double drive = 0.0;
    bool stable = false;
    double var_x1 = 0.0, var_p1 = 0.0, var_x2 = 0.0, var_p2 = 0.0;
    double S1 = 0.0, S2 = 0.0;
    ModelParams params;
};

/// Largest S2 of the sweep, refined between the neighbouring grid rows.
struct SqueezingMaximum {
    std::size_t index = 0;       // best grid row
    double drive = 0.0;          // refined drive
    double S2 = 0.0;
    double min_variance = 0.0;   // min(<x2^2>, <p2^2>) at the maximum
    bool momentum_squeezed = false;
};

struct SqueezingSweepResult {
    std::vector<SqueezingRow> rows;
    std::optional<ThresholdBracket> threshold;
    std::optional<SqueezingMaximum> maximum;
};

SqueezingSweepResult squeezing_sweep(const ModelParams& m, const PowerGrid& grid);

// ---------------------------------------------------------------------------
// Occupation landscape over (omega1, omega2)

struct LandscapeSpec {
    FrequencyFamily family;
    Axis omega1{"omega1", 5.0, 30.0, 20, GridScale::linear};
    Axis omega2{"omega2", 1.25, 25.0, 20, GridScale::log};
    /// Power coordinate bounds are fractions of the instability threshold.
    OptimizeBounds bounds{-50.0, -1.0, 0.03, 0.999, 25, 25, 1e-3};
    ObjectiveKind objective = ObjectiveKind::sphere_occupation;
    int threads = 1;

    void validate() const;
};

struct LandscapePoint {
    double omega1 = 0.0;
    double omega2 = 0.0;
    bool excluded = false;       // omega2 >= omega1 or omega2 <= kappa_c
    bool stable = false;         // an evaluable optimum exists
    OptimizeResult optimum;
    ModelParams params;          // echo at the optimum
    double n1 = 0.0, n2 = 0.0, S1 = 0.0, S2 = 0.0;
    double thermal_n2 = 0.0;     // bath occupation of the sphere
    NormalModes modes;
};

struct RidgePoint {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double n2 = 0.0;
};

struct LandscapeResult {
    std::vector<LandscapePoint> points;   // omega1-major
    std::vector<RidgePoint> ridge;        // omega2 minimizing n2 per omega1
};

LandscapeResult occupation_landscape(const LandscapeSpec& spec);

// ---------------------------------------------------------------------------

/// Calls fn(i) for i in [0, count) on `threads` workers. Each index is handled
/// exactly once; callers write into preallocated slots, so output order does
/// not depend on scheduling.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

std::string to_string(ObjectiveKind kind);
std::string to_string(GridScale scale);

}  // namespace optomech
