#include "optomech/linear_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>

#include "optomech/diagnostics.hpp"
#include "optomech/errors.hpp"
#include "optomech/oracle.hpp"

namespace optomech {

namespace {

using Complex = std::complex<double>;
using ComplexMatrix6 = Eigen::Matrix<Complex, 6, 6>;

constexpr double kCancellationFloor = 1e-10;
constexpr double kResidualTarget = 1e-10;
constexpr int kRefinementPasses = 2;

double max_abs(const Matrix6& M) { return M.cwiseAbs().maxCoeff(); }

/// Residual a double-precision evaluation of A V + V A^T can resolve.
double rounding_floor(const Matrix6& A, const Matrix6& V) {
    return 64.0 * std::numeric_limits<double>::epsilon() * max_abs(A) * max_abs(V);
}

void check_conjugate_pairs(const Spectrum& lambda) {
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    const double tol = 1e-8 * scale;
    for (int i = 0; i < 6; ++i) {
        if (std::abs(lambda(i).imag()) <= tol) continue;
        bool found = false;
        for (int j = 0; j < 6 && !found; ++j)
            found = j != i && std::abs(lambda(j) - std::conj(lambda(i))) <= tol;
        if (!found) throw NumericalError("eigenvalues of the drift matrix are not closed under conjugation");
    }
}

int oscillator_offset(Oscillator j) { return j == Oscillator::mirror ? mirror_x : sphere_x; }

}  // namespace

Matrix6 build_drift(const ModelParams& m, const ClassicalSteadyState& s) {
    const double xc = std::sqrt(2.0) * s.a_bar.real();
    const double pc = std::sqrt(2.0) * s.a_bar.imag();
    const double intensity = xc * xc + pc * pc;   // 2 |a_bar|^2
    const double relative = m.chi * s.x1_bar - s.x2_bar;
    const double mirror_coupling = m.g1 - 2.0 * m.g2 * m.chi * relative;
    const double sphere_coupling = 2.0 * m.g2 * relative;
    const double delta = s.delta_eff;

    Matrix6 A = Matrix6::Zero();
    A(cav_x, cav_x) = -1.0;
    A(cav_x, cav_p) = -delta;
    A(cav_x, mirror_x) = -mirror_coupling * pc;
    A(cav_x, sphere_x) = -sphere_coupling * pc;

    A(cav_p, cav_x) = delta;
    A(cav_p, cav_p) = -1.0;
    A(cav_p, mirror_x) = mirror_coupling * xc;
    A(cav_p, sphere_x) = sphere_coupling * xc;

    A(mirror_x, mirror_p) = m.omega1;

    A(mirror_p, cav_x) = mirror_coupling * xc;
    A(mirror_p, cav_p) = mirror_coupling * pc;
    A(mirror_p, mirror_x) = -m.omega1 - m.g2 * m.chi * m.chi * intensity;
    A(mirror_p, mirror_p) = -2.0 * m.gamma1;
    A(mirror_p, sphere_x) = m.g2 * m.chi * intensity;

    A(sphere_x, sphere_p) = m.omega2;

    A(sphere_p, cav_x) = sphere_coupling * xc;
    A(sphere_p, cav_p) = sphere_coupling * pc;
    A(sphere_p, mirror_x) = m.g2 * m.chi * intensity;
    A(sphere_p, sphere_x) = -m.omega2 - m.g2 * intensity;
    A(sphere_p, sphere_p) = -2.0 * m.gamma2;
    return A;
}

Matrix6 build_diffusion(const ModelParams& m) {
    if (m.n1 < 0.0 || m.n2 < 0.0) throw InvalidParameter("bath occupations must be non-negative");
    Matrix6 D = Matrix6::Zero();
    D(cav_x, cav_x) = 1.0;
    D(cav_p, cav_p) = 1.0;
    D(mirror_p, mirror_p) = 2.0 * m.gamma1 * (2.0 * m.n1 + 1.0);
    D(sphere_p, sphere_p) = 2.0 * m.gamma2 * (2.0 * m.n2 + 1.0);
    return D;
}

StabilityReport stability(const Matrix6& A, double margin) {
    if (!A.allFinite()) throw NumericalError("drift matrix has non-finite entries");
    const Eigen::EigenSolver<Matrix6> solver(A, false);
    if (solver.info() != Eigen::Success) throw NumericalError("eigen-solver failed on drift matrix");
    StabilityReport report;
    report.eigenvalues = solver.eigenvalues();
    check_conjugate_pairs(report.eigenvalues);
    report.max_real = report.eigenvalues.real().maxCoeff();
    report.stable = report.max_real < -margin;
    return report;
}

LinearModel linearize(const ModelParams& m, const ClassicalSteadyState& s, double margin) {
    LinearModel model;
    model.drift = build_drift(m, s);
    model.diffusion = build_diffusion(m);
    const auto report = stability(model.drift, margin);
    model.eigenvalues = report.eigenvalues;
    model.stable = report.stable;
    return model;
}

NormalModes normal_modes(const Spectrum& eigenvalues) {
    const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
    const double real_tol = 1e-12 * scale;

    std::vector<Complex> upper, reals;
    for (int i = 0; i < 6; ++i) {
        const Complex z = eigenvalues(i);
        if (std::abs(z.imag()) <= real_tol) reals.push_back(z);
        else if (z.imag() > 0.0) upper.push_back(z);
    }

    NormalModes out;
    std::vector<NormalMode> modes;
    for (const Complex& z : upper) modes.push_back({z.imag(), -z.real()});
    // Overdamped pairs: two real eigenvalues share a zero-frequency slot.
    std::sort(reals.begin(), reals.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    if (!reals.empty()) out.paired = false;
    for (std::size_t i = 0; i + 1 < reals.size(); i += 2)
        modes.push_back({0.0, -0.5 * (reals[i].real() + reals[i + 1].real())});
    if (modes.size() != 3)
        throw NumericalError("could not group drift eigenvalues into three modes");
    std::sort(modes.begin(), modes.end(), [](const NormalMode& a, const NormalMode& b) {
        return a.frequency < b.frequency;
    });
    std::copy(modes.begin(), modes.end(), out.modes.begin());
    return out;
}

NormalModes normal_modes(const Matrix6& A) {
    return normal_modes(stability(A).eigenvalues);
}

NormalModes track_modes(const NormalModes& previous, const NormalModes& current) {
    std::array<int, 3> perm{0, 1, 2};
    std::array<int, 3> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (int k = 0; k < 3; ++k)
            cost += std::abs(previous.modes[k].frequency - current.modes[perm[k]].frequency);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    NormalModes out = current;
    for (int k = 0; k < 3; ++k) out.modes[k] = current.modes[best[k]];
    return out;
}

double lyapunov_residual(const Matrix6& A, const Matrix6& V, const Matrix6& D) {
    return max_abs(A * V + V * A.transpose() + D);
}

Matrix6 solve_lyapunov(const Matrix6& A, const Matrix6& D, LyapunovDiagnostics* diagnostics) {
    const Eigen::EigenSolver<Matrix6> solver(A, true);
    if (solver.info() != Eigen::Success) throw NumericalError("eigen-solver failed on drift matrix");
    const Spectrum lambda = solver.eigenvalues();
    check_conjugate_pairs(lambda);
    if (!(lambda.real().maxCoeff() < 0.0))
        throw PhysicsError("drift matrix is not stable (max Re lambda = " +
                           std::to_string(lambda.real().maxCoeff()) + "); no stationary state");

    LyapunovDiagnostics diag;
    auto fallback = [&](const std::string& why) {
        warn("Lyapunov eigenbasis solve " + why + "; using the vectorized solve");
        Matrix6 V = lyapunov_vectorized(A, D);
        diag.used_fallback = true;
        diag.residual = lyapunov_residual(A, V, D);
        if (diagnostics) *diagnostics = diag;
        return V;
    };

    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (std::abs(lambda(i) + lambda(j)) < kCancellationFloor)
                return fallback("is ill-conditioned (lambda_i + lambda_j ~ 0)");

    const ComplexMatrix6 S = solver.eigenvectors();
    const Eigen::PartialPivLU<ComplexMatrix6> lu(S);
    const ComplexMatrix6 S_inv = lu.inverse();

    // One solve in the eigenbasis; reused for residual refinement.
    auto eigen_solve = [&](const Matrix6& rhs) {
        ComplexMatrix6 W = S_inv * rhs.cast<Complex>() * S_inv.transpose();
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) W(i, j) = -W(i, j) / (lambda(i) + lambda(j));
        const Matrix6 X = (S * W * S.transpose()).real();
        return Matrix6(0.5 * (X + X.transpose()));
    };

    Matrix6 V = eigen_solve(D);
    if (!V.allFinite()) return fallback("produced non-finite entries");
    for (int pass = 0; pass < kRefinementPasses; ++pass) {
        const Matrix6 R = A * V + V * A.transpose() + D;
        V += eigen_solve(R);
    }
    diag.residual = lyapunov_residual(A, V, D);
    const double target = std::max(kResidualTarget * max_abs(D), rounding_floor(A, V));
    if (!(diag.residual <= target)) return fallback("missed its residual target");
    if (diagnostics) *diagnostics = diag;
    return V;
}

double raw_occupation(const Matrix6& V, Oscillator j) {
    const int k = oscillator_offset(j);
    return 0.5 * (V(k, k) + V(k + 1, k + 1) - 1.0);
}

double occupation(const Matrix6& V, Oscillator j) {
    const double n = raw_occupation(V, j);
    if (n < -1e-9)
        warn("negative occupation " + std::to_string(n) + " clamped to zero");
    return std::max(n, 0.0);
}

double squeezing(const Matrix6& V, Oscillator j) {
    const int k = oscillator_offset(j);
    return 1.0 / (2.0 * std::min(V(k, k), V(k + 1, k + 1)));
}

Matrix6 symplectic_form() {
    Matrix6 sigma = Matrix6::Zero();
    for (int k = 0; k < 6; k += 2) {
        sigma(k, k + 1) = 1.0;
        sigma(k + 1, k) = -1.0;
    }
    return sigma;
}

double physicality_floor(const Matrix6& V) {
    ComplexMatrix6 H = V.cast<Complex>() + Complex(0.0, 0.5) * symplectic_form().cast<Complex>();
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix6> solver(H, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigen-solver failed on V + i sigma / 2");
    return solver.eigenvalues().minCoeff();
}

SteadyCovariance steady_covariance(const Matrix6& A, const Matrix6& D, LyapunovDiagnostics* diagnostics) {
    SteadyCovariance c;
    c.V = solve_lyapunov(A, D, diagnostics);
    c.var_x1 = c.V(mirror_x, mirror_x);
    c.var_p1 = c.V(mirror_p, mirror_p);
    c.var_x2 = c.V(sphere_x, sphere_x);
    c.var_p2 = c.V(sphere_p, sphere_p);
    c.n1 = occupation(c.V, Oscillator::mirror);
    c.n2 = occupation(c.V, Oscillator::sphere);
    c.S1 = squeezing(c.V, Oscillator::mirror);
    c.S2 = squeezing(c.V, Oscillator::sphere);
    return c;
}

}  // namespace optomech
