#include "optomech/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optomech/errors.hpp"
#include "optomech/experiments.hpp"
#include "optomech/oracle.hpp"
#include "optomech/presets.hpp"

namespace optomech {

namespace {

double relative_max(const Matrix6& a, const Matrix6& reference) {
    return (a - reference).cwiseAbs().maxCoeff() / reference.cwiseAbs().maxCoeff();
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log10(lo), std::log10(hi));
    return std::pow(10.0, u(rng));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<std::pair<std::string, ModelParams>> preset_points() {
    std::vector<std::pair<std::string, ModelParams>> out;
    for (double drive : {1e9, 1e10, 4.0e10, 4.4e10})
        out.push_back({"fig3 drive=" + std::to_string(drive), with_drive(fig3_model(), drive)});
    for (double drive : {1e9, 5e9, 9.8e9})
        out.push_back({"fig4 drive=" + std::to_string(drive), with_drive(fig4_model(true), drive)});
    const LandscapeSpec fig2 = fig2_landscape();
    for (double omega2 : {1.5, 3.4})
        out.push_back({"fig2 omega1=10 omega2=" + std::to_string(omega2),
                       with_drive(fig2.family.at(10.0, omega2), 1e9, -20.0)});
    return out;
}

}  // namespace

Matrix6 thermal_start(const ModelParams& m) {
    Matrix6 V = Matrix6::Zero();
    V(cav_x, cav_x) = V(cav_p, cav_p) = 0.5;
    V(mirror_x, mirror_x) = V(mirror_p, mirror_p) = m.n1 + 0.5;
    V(sphere_x, sphere_x) = V(sphere_p, sphere_p) = m.n2 + 0.5;
    return V;
}

SolverComparison compare_solvers(const Matrix6& A, const Matrix6& D, const Matrix6& V0) {
    SolverComparison c;
    LyapunovDiagnostics diag;
    const Matrix6 V = solve_lyapunov(A, D, &diag);
    const Matrix6 Vvec = lyapunov_vectorized(A, D);
    const MomentFlowResult flow = integrate_moments(A, D, V0, default_integration(A));
    c.algebraic = relative_max(Vvec, V);
    c.moment_flow = relative_max(flow.V, V);
    c.flow_settled = !flow.diverged;
    c.residual = lyapunov_residual(A, V, D) / D.cwiseAbs().maxCoeff();
    c.physicality_floor = physicality_floor(V);
    c.min_raw_occupation = std::min(raw_occupation(V, Oscillator::mirror), raw_occupation(V, Oscillator::sphere));
    return c;
}

ModelParams random_stable_model(std::mt19937_64& rng) {
    // Working regime: sphere on a node, red detuning, weak damping, warm baths.
    // Far outside it the momentum-only Brownian noise can give covariances
    // that violate the uncertainty bound, which is a property of the model.
    for (int attempt = 0; attempt < 100000; ++attempt) {
        ModelParams m;
        m.omega1 = uniform(rng, 1.0, 30.0);
        m.omega2 = uniform(rng, 0.5, m.omega1);
        m.gamma1 = log_uniform(rng, 1e-5, 1e-2);
        m.gamma2 = log_uniform(rng, 1e-8, 1e-3);
        m.g1 = log_uniform(rng, 1e-5, 1e-2);
        m.g2 = -log_uniform(rng, 1e-11, 1e-7);
        m.chi = log_uniform(rng, 1e-4, 1e-1);
        m.n1 = log_uniform(rng, 1.0, 1e5);
        m.n2 = log_uniform(rng, 1.0, 1e5);
        m.detuning = uniform(rng, -40.0, -0.5);
        m.detuning_mode = DetuningMode::effective;
        m.drive = log_uniform(rng, 1e2, 1e10);
        const PointEvaluation ev = evaluate_point(m);
        if (ev.stable) return m;
    }
    throw NumericalError("no stable random instance found");
}

bool ValidationReport::passed() const {
    return max_algebraic < kAlgebraicTolerance && max_moment_flow < kMomentFlowTolerance && all_flows_settled;
}

ValidationReport run_validation(int instances, std::uint64_t seed, int threads) {
    if (instances < 0) throw InvalidParameter("instances must be non-negative");
    ValidationReport report;
    for (auto& [label, params] : preset_points()) report.cases.push_back({label, params, {}});
    std::mt19937_64 rng(seed);
    for (int i = 0; i < instances; ++i)
        report.cases.push_back({"random #" + std::to_string(i), random_stable_model(rng), {}});

    parallel_for(report.cases.size(), threads, [&](std::size_t k) {
        auto& c = report.cases[k];
        const auto steady = classical_fixed_point(c.params);
        const LinearModel model = linearize(c.params, steady);
        if (!model.stable) throw PhysicsError(c.label + ": drift matrix is unstable");
        c.result = compare_solvers(model.drift, model.diffusion, thermal_start(c.params));
    });

    report.min_physicality_floor = std::numeric_limits<double>::infinity();
    report.min_raw_occupation = std::numeric_limits<double>::infinity();
    for (const auto& c : report.cases) {
        const auto& r = c.result;
        if (r.algebraic > report.max_algebraic) {
            report.max_algebraic = r.algebraic;
            report.worst_algebraic = c.label;
        }
        if (r.moment_flow > report.max_moment_flow) {
            report.max_moment_flow = r.moment_flow;
            report.worst_moment_flow = c.label;
        }
        report.max_residual = std::max(report.max_residual, r.residual);
        report.min_physicality_floor = std::min(report.min_physicality_floor, r.physicality_floor);
        report.min_raw_occupation = std::min(report.min_raw_occupation, r.min_raw_occupation);
        report.all_flows_settled = report.all_flows_settled && r.flow_settled;
    }
    return report;
}

}  // namespace optomech
