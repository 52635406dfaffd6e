#include "optomech/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr int kScanPoints = 2001;
constexpr double kWindowPadding = 50.0;
constexpr double kRootTolerance = 1e-12;

double max_of(std::initializer_list<double> values) {
    double out = 1.0;
    for (double v : values) out = std::max(out, std::abs(v));
    return out;
}

}  // namespace

double StationarityResiduals::max() const {
    return std::max({cavity, mirror, sphere});
}

std::complex<double> intracavity_amplitude(double delta_eff, std::complex<double> a_in) {
    return std::sqrt(2.0) * a_in / std::complex<double>(-1.0, delta_eff);
}

EffectiveFrequencies effective_frequencies(const ModelParams& m, double photon_number) {
    const double n = photon_number;
    const double omega2 = m.omega2 + 2.0 * m.g2 * n;
    if (!(omega2 > 0.0))
        throw PhysicsError("degenerate sphere trap: Omega2 = " + std::to_string(omega2) +
                           " <= 0 at photon number " + std::to_string(n));
    const double chi2 = m.chi * m.chi;
    const double omega1 = m.omega1 + 2.0 * m.g2 * chi2 * n - 4.0 * m.g2 * m.g2 * chi2 * n * n / omega2;
    return {omega1, omega2};
}

double effective_detuning(double delta_bare, double x1_bar, double x2_bar, const ModelParams& m) {
    const double relative = m.chi * x1_bar - x2_bar;
    return delta_bare + m.g1 * x1_bar - m.g2 * relative * relative;
}

ClassicalSteadyState fixed_point_at(const ModelParams& m, double delta_eff) {
    ClassicalSteadyState s;
    s.delta_eff = delta_eff;
    const double photons = 2.0 * m.drive / (delta_eff * delta_eff + 1.0);
    // Real, positive a_bar: the input carries the phase of (i delta_eff - 1).
    s.a_bar = std::sqrt(photons);
    s.a_in = s.a_bar * std::complex<double>(-1.0, delta_eff) / std::sqrt(2.0);
    s.photon_number = photons;

    const auto freqs = effective_frequencies(m, photons);
    if (freqs.omega1 == 0.0 || !std::isfinite(freqs.omega1))
        throw PhysicsError("degenerate mirror trap: Omega1 = 0");
    s.omega1_eff = freqs.omega1;
    s.omega2_eff = freqs.omega2;
    s.x1_bar = m.g1 * photons / freqs.omega1;
    s.x2_bar = 2.0 * m.g2 * m.chi * photons * s.x1_bar / freqs.omega2;
    // Delta_eff = Delta + g1 x1 - g2 (chi x1 - x2)^2, solved for Delta.
    const double relative = m.chi * s.x1_bar - s.x2_bar;
    s.delta_bare = delta_eff - m.g1 * s.x1_bar + m.g2 * relative * relative;
    return s;
}

ClassicalSteadyState classical_fixed_point(const ModelParams& m) {
    if (m.detuning_mode != DetuningMode::effective)
        throw InvalidParameter("classical_fixed_point needs an effective detuning; "
                               "use solve_self_consistent for a bare detuning");
    validate(m);
    return fixed_point_at(m, m.detuning);
}

double self_consistency_residual(const ModelParams& m, double delta_eff) {
    try {
        const auto s = fixed_point_at(m, delta_eff);
        return delta_eff - effective_detuning(m.detuning, s.x1_bar, s.x2_bar, m);
    } catch (const PhysicsError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

std::vector<ClassicalSteadyState> solve_self_consistent(const ModelParams& m) {
    if (m.detuning_mode != DetuningMode::bare)
        throw InvalidParameter("solve_self_consistent needs a bare detuning");
    validate(m);

    const double half_width = std::abs(m.detuning) + kWindowPadding;
    const double lo = -half_width;
    const double step = 2.0 * half_width / (kScanPoints - 1);

    std::vector<double> roots;
    double prev_x = lo;
    double prev_f = self_consistency_residual(m, lo);
    if (prev_f == 0.0) roots.push_back(lo);
    for (int i = 1; i < kScanPoints; ++i) {
        const double x = lo + step * i;
        const double f = self_consistency_residual(m, x);
        if (f == 0.0) {
            roots.push_back(x);
        } else if (std::isfinite(prev_f) && std::isfinite(f) && prev_f != 0.0 &&
                   std::signbit(prev_f) != std::signbit(f)) {
            double a = prev_x, b = x, fa = prev_f;
            while (b - a > kRootTolerance) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                const double fm = self_consistency_residual(m, mid);
                if (!std::isfinite(fm)) break;
                if (fm == 0.0) { a = b = mid; break; }
                if (std::signbit(fm) == std::signbit(fa)) { a = mid; fa = fm; } else { b = mid; }
            }
            const double root = 0.5 * (a + b);
            // A sign change across a pole of x1_bar (Omega1 -> 0) is not a root.
            const auto s = fixed_point_at(m, root);
            const double scale = max_of({root, m.detuning, m.g1 * s.x1_bar});
            if (std::abs(self_consistency_residual(m, root)) <= 1e-8 * scale) roots.push_back(root);
        }
        prev_x = x;
        prev_f = f;
    }

    if (roots.empty())
        throw NumericalError("self-consistent solver found no fixed point in the window [" +
                             std::to_string(lo) + ", " + std::to_string(-lo) + "]");

    std::vector<ClassicalSteadyState> out;
    out.reserve(roots.size());
    for (double r : roots) out.push_back(fixed_point_at(m, r));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.photon_number < b.photon_number;
    });
    return out;
}

StationarityResiduals stationarity_residuals(const ModelParams& m, const ClassicalSteadyState& s) {
    using cd = std::complex<double>;
    const cd a = s.a_bar;
    const double photons = std::norm(a);
    const double relative = m.chi * s.x1_bar - s.x2_bar;
    const double shift = m.g1 * s.x1_bar - m.g2 * relative * relative;

    StationarityResiduals r;
    // da/dt = (i Delta - 1) a + i [g1 x1 - g2 (chi x1 - x2)^2] a - sqrt(2) a_in
    const cd t_det = cd(-1.0, s.delta_bare) * a;
    const cd t_shift = cd(0.0, shift) * a;
    const cd t_in = -std::sqrt(2.0) * s.a_in;
    r.cavity = std::abs(t_det + t_shift + t_in) /
               max_of({std::abs(t_det), std::abs(t_shift), std::abs(t_in)});

    // dp1/dt = -omega1 x1 + (g1 - 2 g2 chi (chi x1 - x2)) |a|^2
    const double m_spring = -m.omega1 * s.x1_bar;
    const double m_force = (m.g1 - 2.0 * m.g2 * m.chi * relative) * photons;
    r.mirror = std::abs(m_spring + m_force) / max_of({m_spring, m.g1 * photons, 2.0 * m.g2 * m.chi * relative * photons});

    // dp2/dt = -omega2 x2 + 2 g2 (chi x1 - x2) |a|^2
    const double s_spring = -m.omega2 * s.x2_bar;
    const double s_force = 2.0 * m.g2 * relative * photons;
    r.sphere = std::abs(s_spring + s_force) /
               max_of({s_spring, 2.0 * m.g2 * m.chi * s.x1_bar * photons, 2.0 * m.g2 * s.x2_bar * photons});
    return r;
}

}  // namespace optomech
