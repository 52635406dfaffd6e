#include "optomech/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr int kSym = 21;
constexpr double kDivergenceLimit = 1e12;
constexpr std::int64_t kMaxSteps = std::int64_t{1} << 62;

// Extended precision: the step map of a stiff system (fast cavity, sphere
// damping ~1e-8) loses about eps * |lambda_max| / |lambda_min| in double.
using Real = long double;
using SymMatrix = Eigen::Matrix<Real, kSym, kSym>;
using SymVector = Eigen::Matrix<Real, kSym, 1>;

struct SymIndex {
    std::array<std::pair<int, int>, kSym> pairs;
    SymIndex() {
        int k = 0;
        for (int i = 0; i < 6; ++i)
            for (int j = i; j < 6; ++j) pairs[k++] = {i, j};
    }
};

const SymIndex& sym_index() {
    static const SymIndex index;
    return index;
}

SymVector pack(const Matrix6& V) {
    SymVector y;
    const auto& idx = sym_index();
    for (int k = 0; k < kSym; ++k) y(k) = static_cast<Real>(V(idx.pairs[k].first, idx.pairs[k].second));
    return y;
}

Matrix6 unpack(const SymVector& y) {
    Matrix6 V;
    const auto& idx = sym_index();
    for (int k = 0; k < kSym; ++k) {
        const auto [i, j] = idx.pairs[k];
        V(i, j) = static_cast<double>(y(k));
        V(j, i) = static_cast<double>(y(k));
    }
    return V;
}

/// Matrix of V -> A V + V A^T restricted to symmetric V.
SymMatrix moment_operator(const Matrix6& A) {
    SymMatrix L;
    const auto& idx = sym_index();
    for (int k = 0; k < kSym; ++k) {
        const auto [a, b] = idx.pairs[k];
        Matrix6 E = Matrix6::Zero();
        E(a, b) = 1.0;
        E(b, a) = 1.0;
        L.col(k) = pack(Matrix6(A * E + E * A.transpose()));
    }
    return L;
}

/// Affine step y -> y + K y + c. K is stored apart from the identity so that
/// steps much shorter than the slowest relaxation time keep full precision.
struct AffineStep {
    SymMatrix K;
    SymVector c;

    void apply(SymVector& y) const { y += K * y + c; }

    AffineStep doubled() const {
        AffineStep out;
        out.K = Real(2) * K + K * K;
        out.c = Real(2) * c + K * c;
        return out;
    }
};

AffineStep rk4_step(const SymMatrix& L, const SymVector& d, double dt) {
    const Real h = dt;
    const SymMatrix hL = h * L;
    const SymMatrix hL2 = hL * hL;
    const SymMatrix hL3 = hL2 * hL;
    const SymMatrix hL4 = hL3 * hL;
    AffineStep step;
    step.K = hL + hL2 / Real(2) + hL3 / Real(6) + hL4 / Real(24);
    step.c = h * (d + hL * d / Real(2) + hL2 * d / Real(6) + hL3 * d / Real(24));
    return step;
}

Matrix6 moment_rhs(const Matrix6& A, const Matrix6& D, const Matrix6& V) {
    return A * V + V * A.transpose() + D;
}

}  // namespace

IntegrationSpec default_integration(const Matrix6& A) {
    const Eigen::EigenSolver<Matrix6> solver(A, false);
    if (solver.info() != Eigen::Success) throw NumericalError("eigen-solver failed on drift matrix");
    const auto& lambda = solver.eigenvalues();
    double largest = 0.0;
    double slowest = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) {
        largest = std::max(largest, std::abs(lambda(i)));
        slowest = std::max(slowest, lambda(i).real());
    }
    IntegrationSpec spec;
    spec.dt = 1e-2 / std::max(largest, 1.0);
    const double rate = std::abs(slowest);
    spec.horizon = rate > 0.0 ? 50.0 / rate : std::numeric_limits<double>::infinity();
    spec.convergence_tol = 1e-12 * std::max(rate, std::numeric_limits<double>::min());
    return spec;
}

MomentFlowResult integrate_moments(const Matrix6& A, const Matrix6& D, const Matrix6& V0,
                                   const IntegrationSpec& spec) {
    if (!(spec.dt > 0.0) || !(spec.horizon > 0.0) || !(spec.convergence_tol > 0.0))
        throw InvalidParameter("integration spec needs dt > 0, horizon > 0 and tolerance > 0");

    const double steps_real = std::ceil(spec.horizon / spec.dt);
    const std::int64_t total =
        steps_real >= static_cast<double>(kMaxSteps) ? kMaxSteps : static_cast<std::int64_t>(steps_real);

    const SymMatrix L = moment_operator(A);
    const SymVector d = pack(D);
    SymVector y = pack(Matrix6(0.5 * (V0 + V0.transpose())));

    MomentFlowResult result;
    auto check = [&](std::int64_t steps) {
        result.steps = steps;
        result.time = static_cast<double>(steps) * spec.dt;
        const Matrix6 V = unpack(y);
        if (!V.allFinite() || V.cwiseAbs().maxCoeff() > kDivergenceLimit) {
            result.diverged = true;
            return true;
        }
        const double norm = V.norm();
        const double rate = moment_rhs(A, D, V).norm() / (norm > 0.0 ? norm : 1.0);
        if (norm > 0.0 && rate < spec.convergence_tol) {
            result.converged = true;
            return true;
        }
        return false;
    };

    // Chunks of 1, 2, 4, ... steps while they fit, then the remainder bit by bit.
    std::vector<AffineStep> powers;
    powers.push_back(rk4_step(L, d, spec.dt));
    std::int64_t done = 0;
    bool stop = false;
    while (!stop && total - done >= (std::int64_t{1} << (powers.size() - 1))) {
        const std::int64_t chunk = std::int64_t{1} << (powers.size() - 1);
        powers.back().apply(y);
        done += chunk;
        stop = check(done);
        if (!stop && powers.size() < 62) powers.push_back(powers.back().doubled());
    }
    for (int k = static_cast<int>(powers.size()) - 1; !stop && k >= 0; --k) {
        const std::int64_t chunk = std::int64_t{1} << k;
        if (total - done >= chunk) {
            powers[k].apply(y);
            done += chunk;
            stop = check(done);
        }
    }
    if (!stop) check(done);
    result.V = unpack(y);
    return result;
}

Matrix6 propagate_moments(const Matrix6& A, const Matrix6& D, const Matrix6& V0, double dt,
                          std::int64_t steps) {
    Matrix6 V = 0.5 * (V0 + V0.transpose());
    for (std::int64_t n = 0; n < steps; ++n) {
        const Matrix6 k1 = moment_rhs(A, D, V);
        const Matrix6 k2 = moment_rhs(A, D, V + 0.5 * dt * k1);
        const Matrix6 k3 = moment_rhs(A, D, V + 0.5 * dt * k2);
        const Matrix6 k4 = moment_rhs(A, D, V + dt * k3);
        V += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        V = 0.5 * (V + V.transpose()).eval();
    }
    return V;
}

Matrix6 lyapunov_vectorized(const Matrix6& A, const Matrix6& D) {
    using Matrix36 = Eigen::Matrix<double, 36, 36>;
    using Vector36 = Eigen::Matrix<double, 36, 1>;
    // Column-major vec: vec(A V) = (I (x) A) vec V, vec(V A^T) = (A (x) I) vec V.
    Matrix36 M = Matrix36::Zero();
    for (int col = 0; col < 6; ++col) {
        M.block<6, 6>(6 * col, 6 * col) += A;
        for (int row = 0; row < 6; ++row)
            M.block<6, 6>(6 * row, 6 * col).diagonal().array() += A(row, col);
    }
    Vector36 rhs;
    for (int col = 0; col < 6; ++col)
        for (int row = 0; row < 6; ++row) rhs(6 * col + row) = -D(row, col);

    const Eigen::FullPivLU<Matrix36> lu(M);
    const double rcond = lu.rcond();
    if (!lu.isInvertible() || !(rcond > 1e-14))
        throw NumericalError("singular Lyapunov system (marginal drift matrix), rcond = " +
                             std::to_string(rcond));
    const Vector36 v = lu.solve(rhs);
    Matrix6 V;
    for (int col = 0; col < 6; ++col)
        for (int row = 0; row < 6; ++row) V(row, col) = v(6 * col + row);
    return 0.5 * (V + V.transpose());
}

}  // namespace optomech
