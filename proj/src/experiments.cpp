#include "optomech/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "optomech/diagnostics.hpp"
#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxDescentIterations = 10000;
constexpr double kEqualOccupationGap = 0.1;
constexpr const char* kUnstableDrift = "drift matrix is unstable";

double occupation_gap(double n1, double n2) {
    const double scale = std::max(std::abs(n1), std::abs(n2));
    return scale > 0.0 ? std::abs(n1 - n2) / scale : 0.0;
}

NormalModes uncoupled_reference(const ModelParams& m) {
    NormalModes ref;
    ref.modes[cavity_branch] = {std::abs(m.detuning), 1.0};
    ref.modes[mirror_branch] = {m.omega1, m.gamma1};
    ref.modes[sphere_branch] = {m.omega2, m.gamma2};
    return ref;
}

double mechanical_separation(const NormalModes& modes) {
    return std::abs(modes.modes[mirror_branch].frequency - modes.modes[sphere_branch].frequency);
}

/// Golden-section minimization of f on [a, b].
template <class F>
double golden_section(F&& f, double a, double b, double tolerance) {
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < 200 && b - a > tolerance; ++i) {
        if (fc <= fd) {
            b = d; d = c; fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

std::optional<ThresholdBracket> bracket_between(const ModelParams& m, double stable_drive, double unstable_drive) {
    if (stable_drive > 0.0) {
        try {
            return instability_threshold(m, stable_drive, unstable_drive);
        } catch (const PhysicsError&) {
        }
    }
    return ThresholdBracket{stable_drive, unstable_drive};
}

}  // namespace

// ---------------------------------------------------------------------------

void Axis::validate() const {
    if (points < 2) throw InvalidParameter("axis '" + name + "' needs at least 2 points");
    if (!(std::isfinite(min) && std::isfinite(max) && min < max))
        throw InvalidParameter("axis '" + name + "' needs finite bounds with min < max");
    if (scale == GridScale::log && !(min > 0.0))
        throw InvalidParameter("logarithmic axis '" + name + "' needs a positive lower bound");
}

std::vector<double> Axis::values() const {
    validate();
    std::vector<double> out(points);
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        out[i] = scale == GridScale::linear
                     ? min + t * (max - min)
                     : std::exp(std::log(min) + t * (std::log(max) - std::log(min)));
    }
    out.front() = min;
    out.back() = max;
    return out;
}

ModelParams with_drive(ModelParams m, double drive, std::optional<double> detuning) {
    m.drive = drive;
    if (detuning) m.detuning = *detuning;
    return m;
}

PointEvaluation evaluate_point(const ModelParams& m) {
    if (m.detuning_mode != DetuningMode::effective)
        throw InvalidParameter("point evaluation needs an effective detuning");
    validate(m);
    PointEvaluation ev;
    ev.params = m;
    try {
        ev.steady = classical_fixed_point(m);
    } catch (const PhysicsError& e) {
        ev.failure = e.what();
        return ev;
    }
    const LinearModel model = linearize(m, ev.steady);
    ev.eigenvalues = model.eigenvalues;
    ev.modes = normal_modes(model.eigenvalues);
    if (!model.stable) {
        ev.failure = kUnstableDrift;
        return ev;
    }
    try {
        ev.covariance = steady_covariance(model.drift, model.diffusion, &ev.lyapunov);
    } catch (const std::exception& e) {
        ev.failure = e.what();
        return ev;
    }
    ev.stable = true;
    ev.raw_n1 = raw_occupation(ev.covariance->V, Oscillator::mirror);
    ev.raw_n2 = raw_occupation(ev.covariance->V, Oscillator::sphere);
    ev.physicality_floor = physicality_floor(ev.covariance->V);
    return ev;
}

bool is_stable_at(const ModelParams& m, double drive) {
    const ModelParams probe = with_drive(m, drive);
    try {
        const auto s = fixed_point_at(probe, probe.detuning);
        return stability(build_drift(probe, s)).stable;
    } catch (const PhysicsError&) {
        return false;
    }
}

// ---------------------------------------------------------------------------

double ThresholdBracket::estimate() const {
    return std::sqrt(stable_drive * unstable_drive);
}

ThresholdBracket instability_threshold(const ModelParams& m, double lower, double upper) {
    if (!(lower > 0.0 && upper > lower && std::isfinite(upper)))
        throw InvalidParameter("threshold bracket needs 0 < lower < upper");
    if (!is_stable_at(m, lower))
        throw PhysicsError("threshold bracket precondition failed: unstable at the lower drive " +
                           std::to_string(lower));
    if (is_stable_at(m, upper))
        throw PhysicsError("threshold bracket precondition failed: stable at the upper drive " +
                           std::to_string(upper));
    ThresholdBracket b{lower, upper};
    while (b.unstable_drive / b.stable_drive - 1.0 > kThresholdRelativeWidth) {
        const double mid = b.estimate();
        if (is_stable_at(m, mid)) b.stable_drive = mid;
        else b.unstable_drive = mid;
    }
    return b;
}

std::optional<ThresholdBracket> locate_threshold(const ModelParams& m, double start, double limit) {
    double drive = start;
    while (!is_stable_at(m, drive)) {
        drive /= 10.0;
        if (drive < 1e-30) return std::nullopt;
    }
    while (drive <= limit) {
        const double next = drive * 10.0;
        if (!is_stable_at(m, next)) return instability_threshold(m, drive, next);
        drive = next;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

void OptimizeBounds::validate() const {
    if (!(std::isfinite(detuning_min) && std::isfinite(detuning_max) && detuning_min <= detuning_max))
        throw InvalidParameter("optimizer detuning bounds must be finite with min <= max");
    if (!(std::isfinite(power_min) && std::isfinite(power_max) && power_min > 0.0 && power_min <= power_max))
        throw InvalidParameter("optimizer power bounds must be finite and positive with min <= max");
    if (detuning_points < 1 || power_points < 1) throw InvalidParameter("optimizer grids need >= 1 point");
    if (!(step_floor > 0.0)) throw InvalidParameter("optimizer step floor must be positive");
}

OptimizeResult optimize_scalar(const Objective2D& objective, const OptimizeBounds& b) {
    b.validate();
    OptimizeResult result;
    const double log_lo = std::log10(b.power_min);
    const double log_hi = std::log10(b.power_max);
    const double dx = b.detuning_points > 1 ? (b.detuning_max - b.detuning_min) / (b.detuning_points - 1) : 0.0;
    const double dy = b.power_points > 1 ? (log_hi - log_lo) / (b.power_points - 1) : 0.0;

    auto eval = [&](double x, double y) {
        ++result.evaluations;
        const double v = objective(x, std::pow(10.0, y));
        return std::isnan(v) ? kInf : v;
    };

    double best_x = b.detuning_min, best_y = log_lo, best = kInf;
    bool any_finite = false;
    for (int i = 0; i < b.detuning_points; ++i) {
        const double x = i + 1 == b.detuning_points ? b.detuning_max : b.detuning_min + i * dx;
        for (int j = 0; j < b.power_points; ++j) {
            const double y = j + 1 == b.power_points ? log_hi : log_lo + j * dy;
            const double v = eval(x, y);
            if (std::isfinite(v)) any_finite = true;
            if (v < best) {
                best = v;
                best_x = x;
                best_y = y;
            }
        }
    }
    if (!any_finite) {
        result.detuning = 0.5 * (b.detuning_min + b.detuning_max);
        result.power = std::pow(10.0, 0.5 * (log_lo + log_hi));
        result.value = kInf;
        result.diagnostic = "objective is not finite anywhere on the coarse grid (all points unstable)";
        return result;
    }

    // Compass search with successive halving. The power step is in decades;
    // its floor corresponds to a relative change of step_floor in the drive.
    double sx = dx > 0.0 ? dx : 0.0;
    double sy = dy > 0.0 ? dy : 0.0;
    const double floor_y = std::log10(1.0 + b.step_floor);
    for (int iter = 0; iter < kMaxDescentIterations; ++iter) {
        const double floor_x = b.step_floor * std::max(1.0, std::abs(best_x));
        if (sx < floor_x && sy < floor_y) break;
        double cand_x = best_x, cand_y = best_y, cand = best;
        const double moves[4][2] = {{sx, 0.0}, {-sx, 0.0}, {0.0, sy}, {0.0, -sy}};
        for (const auto& mv : moves) {
            if (mv[0] == 0.0 && mv[1] == 0.0) continue;
            const double x = std::clamp(best_x + mv[0], b.detuning_min, b.detuning_max);
            const double y = std::clamp(best_y + mv[1], log_lo, log_hi);
            if (x == best_x && y == best_y) continue;
            const double v = eval(x, y);
            if (v < cand) {
                cand = v;
                cand_x = x;
                cand_y = y;
            }
        }
        if (cand < best) {
            best = cand;
            best_x = cand_x;
            best_y = cand_y;
        } else {
            sx *= 0.5;
            sy *= 0.5;
        }
    }

    result.detuning = best_x;
    result.power = best_y == log_lo ? b.power_min : best_y == log_hi ? b.power_max : std::pow(10.0, best_y);
    result.value = best;
    const bool on_x = b.detuning_max > b.detuning_min && (best_x == b.detuning_min || best_x == b.detuning_max);
    const bool on_y = log_hi > log_lo && (best_y == log_lo || best_y == log_hi);
    if (on_x || on_y) {
        result.boundary_optimum = true;
        result.diagnostic = std::string("optimum lies on the ") + (on_x ? "detuning" : "power") + " bound";
        warn(result.diagnostic);
    }
    return result;
}

CovarianceObjective make_objective(ObjectiveKind kind) {
    switch (kind) {
        case ObjectiveKind::sphere_occupation:
            return [](const SteadyCovariance& c) { return c.n2; };
        case ObjectiveKind::sphere_squeezing:
            return [](const SteadyCovariance& c) { return 1.0 / c.S2; };
    }
    return [](const SteadyCovariance& c) { return c.n2; };
}

double resolve_drive(const ModelParams& base, double detuning, double coordinate, PowerAxis axis) {
    if (axis == PowerAxis::absolute) return coordinate;
    const auto threshold = locate_threshold(with_drive(base, base.drive, detuning));
    return coordinate * (threshold ? threshold->stable_drive : 1e30);
}

Objective2D covariance_objective(const ModelParams& base, CovarianceObjective objective, PowerAxis axis) {
    auto cache = std::make_shared<std::map<double, double>>();
    return [base, objective = std::move(objective), axis, cache](double detuning, double coordinate) {
        double drive = coordinate;
        if (axis == PowerAxis::threshold_fraction) {
            auto it = cache->find(detuning);
            if (it == cache->end()) it = cache->emplace(detuning, resolve_drive(base, detuning, 1.0, axis)).first;
            drive = coordinate * it->second;
        }
        const PointEvaluation ev = evaluate_point(with_drive(base, drive, detuning));
        if (!ev.stable || !ev.covariance) return kInf;
        const double v = objective(*ev.covariance);
        return std::isfinite(v) ? v : kInf;
    };
}

// ---------------------------------------------------------------------------

void PowerGrid::validate() const {
    if (points < 2) throw InvalidParameter("power grid needs at least 2 points");
    if (!(std::isfinite(min) && std::isfinite(max) && min > 0.0 && min < max))
        throw InvalidParameter("power grid needs finite bounds with 0 < min < max");
}

std::vector<double> PowerGrid::values() const {
    validate();
    std::vector<double> out;
    if (include_zero) out.push_back(0.0);
    const auto grid = Axis{"drive", min, max, points, GridScale::log}.values();
    out.insert(out.end(), grid.begin(), grid.end());
    return out;
}

PowerSweepResult power_sweep(const ModelParams& m, const PowerGrid& grid) {
    validate(m);
    PowerSweepResult result;
    NormalModes previous = uncoupled_reference(m);
    double last_stable = 0.0;

    for (double drive : grid.values()) {
        PowerSweepRow row;
        row.drive = drive;
        row.params = with_drive(m, drive);
        const PointEvaluation ev = evaluate_point(row.params);
        row.stable = ev.stable;
        // A degenerate trap leaves no spectrum; keep the last labels.
        const bool has_spectrum = ev.stable || ev.failure == kUnstableDrift;
        row.modes = has_spectrum ? track_modes(previous, ev.modes) : previous;
        previous = row.modes;
        if (ev.stable) {
            row.n1 = ev.covariance->n1;
            row.n2 = ev.covariance->n2;
            last_stable = drive;
        } else {
            row.n1 = row.n2 = kNaN;
        }
        result.rows.push_back(row);
        if (!ev.stable) {
            result.threshold = bracket_between(m, last_stable, drive);
            break;
        }
    }

    // Cooling optimum and hybridization window.
    std::optional<std::size_t> best_sep;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        if (!row.stable || row.drive <= 0.0) continue;
        if (!result.best_cooling_row || row.n2 < result.rows[*result.best_cooling_row].n2)
            result.best_cooling_row = i;
        if (!best_sep || mechanical_separation(row.modes) < mechanical_separation(result.rows[*best_sep].modes))
            best_sep = i;
        if (occupation_gap(row.n1, row.n2) < kEqualOccupationGap)
            result.hybridization.equal_occupation_rows.push_back(i);
    }
    if (!best_sep) return result;

    auto& hyb = result.hybridization;
    hyb.found = true;
    hyb.index = *best_sep;
    const auto& centre = result.rows[*best_sep];
    auto stable_positive = [&](std::size_t i) { return result.rows[i].stable && result.rows[i].drive > 0.0; };
    const double lo = *best_sep > 0 && stable_positive(*best_sep - 1) ? result.rows[*best_sep - 1].drive : centre.drive;
    const double hi = *best_sep + 1 < result.rows.size() && stable_positive(*best_sep + 1)
                          ? result.rows[*best_sep + 1].drive
                          : centre.drive;

    auto separation_at = [&](double log_drive) {
        const PointEvaluation ev = evaluate_point(with_drive(m, std::pow(10.0, log_drive)));
        if (!ev.stable) return kInf;
        return mechanical_separation(track_modes(centre.modes, ev.modes));
    };
    double refined = std::log10(centre.drive);
    if (hi > lo) refined = golden_section(separation_at, std::log10(lo), std::log10(hi), 1e-10);
    if (!(separation_at(refined) <= mechanical_separation(centre.modes))) refined = std::log10(centre.drive);

    const PointEvaluation at = evaluate_point(with_drive(m, std::pow(10.0, refined)));
    hyb.drive = std::pow(10.0, refined);
    hyb.separation = mechanical_separation(track_modes(centre.modes, at.modes));
    hyb.n1 = at.covariance->n1;
    hyb.n2 = at.covariance->n2;
    hyb.occupation_gap = occupation_gap(hyb.n1, hyb.n2);
    return result;
}

SqueezingSweepResult squeezing_sweep(const ModelParams& m, const PowerGrid& grid) {
    validate(m);
    SqueezingSweepResult result;
    double last_stable = 0.0;
    for (double drive : grid.values()) {
        SqueezingRow row;
        row.drive = drive;
        row.params = with_drive(m, drive);
        const PointEvaluation ev = evaluate_point(row.params);
        row.stable = ev.stable;
        if (ev.stable) {
            const auto& c = *ev.covariance;
            row.var_x1 = c.var_x1;
            row.var_p1 = c.var_p1;
            row.var_x2 = c.var_x2;
            row.var_p2 = c.var_p2;
            row.S1 = c.S1;
            row.S2 = c.S2;
            last_stable = drive;
        } else {
            row.var_x1 = row.var_p1 = row.var_x2 = row.var_p2 = row.S1 = row.S2 = kNaN;
        }
        result.rows.push_back(row);
        if (!ev.stable) {
            result.threshold = bracket_between(m, last_stable, drive);
            break;
        }
    }
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        if (!row.stable) continue;
        if (!result.maximum || row.S2 > result.maximum->S2) {
            result.maximum = SqueezingMaximum{i, row.drive, row.S2, std::min(row.var_x2, row.var_p2),
                                              row.var_p2 < row.var_x2};
        }
    }
    if (!result.maximum || result.maximum->drive <= 0.0) return result;

    // The peak sits just below threshold, usually between two grid rows.
    const std::size_t i = result.maximum->index;
    const auto usable = [&](std::size_t k) { return result.rows[k].stable && result.rows[k].drive > 0.0; };
    const double lo = i > 0 && usable(i - 1) ? result.rows[i - 1].drive : result.rows[i].drive;
    double hi = i + 1 < result.rows.size() && usable(i + 1) ? result.rows[i + 1].drive : result.rows[i].drive;
    if (hi == result.rows[i].drive && result.threshold) hi = std::max(hi, result.threshold->stable_drive);
    if (hi <= lo) return result;
    auto negative_s2 = [&](double log_drive) {
        const PointEvaluation ev = evaluate_point(with_drive(m, std::pow(10.0, log_drive)));
        return ev.stable ? -ev.covariance->S2 : kInf;
    };
    const double best = golden_section(negative_s2, std::log10(lo), std::log10(hi), 1e-10);
    const PointEvaluation ev = evaluate_point(with_drive(m, std::pow(10.0, best)));
    if (ev.stable && ev.covariance->S2 > result.maximum->S2) {
        const auto& c = *ev.covariance;
        result.maximum->drive = std::pow(10.0, best);
        result.maximum->S2 = c.S2;
        result.maximum->min_variance = std::min(c.var_x2, c.var_p2);
        result.maximum->momentum_squeezed = c.var_p2 < c.var_x2;
    }
    return result;
}

// ---------------------------------------------------------------------------

void LandscapeSpec::validate() const {
    omega1.validate();
    omega2.validate();
    bounds.validate();
    if (bounds.power_max > 1.0)
        throw InvalidParameter("landscape power bounds are threshold fractions and must not exceed 1");
    if (threads < 1) throw InvalidParameter("thread count must be >= 1");
}

LandscapeResult occupation_landscape(const LandscapeSpec& spec) {
    spec.validate();
    const auto w1 = spec.omega1.values();
    const auto w2 = spec.omega2.values();
    LandscapeResult result;
    result.points.resize(w1.size() * w2.size());

    parallel_for(result.points.size(), spec.threads, [&](std::size_t k) {
        LandscapePoint& pt = result.points[k];
        pt.omega1 = w1[k / w2.size()];
        pt.omega2 = w2[k % w2.size()];
        if (pt.omega2 >= pt.omega1 || pt.omega2 <= 1.0) {
            pt.excluded = true;
            return;
        }
        const ModelParams base = spec.family.at(pt.omega1, pt.omega2);
        pt.thermal_n2 = base.n2;
        const auto objective = covariance_objective(base, make_objective(spec.objective), PowerAxis::threshold_fraction);
        pt.optimum = optimize_scalar(objective, spec.bounds);
        if (!std::isfinite(pt.optimum.value)) {
            pt.params = base;
            return;
        }
        const double drive = resolve_drive(base, pt.optimum.detuning, pt.optimum.power, PowerAxis::threshold_fraction);
        pt.params = with_drive(base, drive, pt.optimum.detuning);
        const PointEvaluation ev = evaluate_point(pt.params);
        pt.stable = ev.stable;
        pt.modes = ev.modes;
        if (ev.stable) {
            pt.n1 = ev.covariance->n1;
            pt.n2 = ev.covariance->n2;
            pt.S1 = ev.covariance->S1;
            pt.S2 = ev.covariance->S2;
        }
    });

    for (std::size_t i = 0; i < w1.size(); ++i) {
        std::optional<RidgePoint> best;
        for (std::size_t j = 0; j < w2.size(); ++j) {
            const auto& pt = result.points[i * w2.size() + j];
            if (pt.excluded || !pt.stable) continue;
            if (!best || pt.n2 < best->n2) best = RidgePoint{pt.omega1, pt.omega2, pt.n2};
        }
        if (best) result.ridge.push_back(*best);
    }
    return result;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::string to_string(ObjectiveKind kind) {
    return kind == ObjectiveKind::sphere_occupation ? "sphere_occupation" : "sphere_squeezing";
}

std::string to_string(GridScale scale) {
    return scale == GridScale::linear ? "linear" : "log";
}

}  // namespace optomech
