#pragma once

// Steady state, time evolution and two-time correlators of a Liouvillian.

#include "phmol/errors.hpp"
#include "phmol/fock.hpp"
#include "phmol/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace phmol {

template <typename Real = double>
class DensityMatrix {
public:
    using Matrix = typename OperatorMatrix<Real>::Matrix;

    static constexpr double hermiticity_tol = 1e-10;
    static constexpr double trace_tol = 1e-10;
    static constexpr double positivity_floor = -1e-8;

    // Checks Hermiticity, unit trace and positivity; throws PreconditionError otherwise.
    DensityMatrix(Matrix m, BasisTag tag) : m_(std::move(m)), tag_(tag) {
        const auto n = static_cast<Eigen::Index>(basis_size(tag.n_max));
        if (m_.rows() != n || m_.cols() != n) {
            throw BasisMismatch("DensityMatrix: size does not match basis");
        }
        const Real herm = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (!(herm <= Real(hermiticity_tol))) {
            throw PreconditionError("DensityMatrix: not Hermitian (deviation " +
                                    std::to_string(double(herm)) + ")");
        }
        const Real tr_dev = std::abs(m_.trace() - std::complex<Real>(1));
        if (!(tr_dev <= Real(trace_tol))) {
            throw PreconditionError("DensityMatrix: trace differs from 1 by " +
                                    std::to_string(double(tr_dev)));
        }
        if (!(min_eigenvalue() >= Real(positivity_floor))) {
            throw PreconditionError("DensityMatrix: negative eigenvalue " +
                                    std::to_string(double(min_eigenvalue())));
        }
    }

    static DensityMatrix pure(const FockBasis& basis, FockState s) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        Matrix m = Matrix::Zero(n, n);
        const auto i = static_cast<Eigen::Index>(basis.index_of(s));
        m(i, i) = 1;
        return {std::move(m), basis.tag()};
    }

    const Matrix& matrix() const noexcept { return m_; }
    BasisTag tag() const noexcept { return tag_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

    Real min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    std::complex<Real> expectation(const OperatorMatrix<Real>& op) const {
        if (op.tag() != tag_ || op.role() != OperatorRole::state) {
            throw BasisMismatch("expectation: operator acts on a different basis");
        }
        return (op.matrix() * m_).trace();
    }

private:
    Matrix m_;
    BasisTag tag_;
};

enum class SteadyMethod { trace_replaced, null_space };

template <typename Real = double>
struct SolverConfig {
    SteadyMethod steady_method = SteadyMethod::trace_replaced;
    Real time_step = Real(0.01); // upper bound on the integrator step
    Real rtol = Real(1e-8);
    Real atol = Real(1e-10);
    Real max_time = Real(1e4);

    void validate() const {
        if (!(time_step > 0) || !(rtol > 0) || !(atol > 0) || !(max_time > 0)) {
            throw PreconditionError("SolverConfig: time_step, tolerances and max_time must be > 0");
        }
    }
};

namespace detail {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
Real residual_norm(const Liouvillian<Real>& lv, const typename OperatorMatrix<Real>::Matrix& rho) {
    return lv.apply(rho).cwiseAbs().maxCoeff();
}

// Real coordinates of a Hermitian matrix: the n diagonal entries followed by
// (Re, Im) of each strictly-upper entry in column-major order of (i, j).
struct HermitianCoordinates {
    explicit HermitianCoordinates(Eigen::Index n) : n(n) {
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < j; ++i) pairs.emplace_back(i, j);
    }
    Eigen::Index n;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;

    Eigen::Index size() const { return n * n; }
    Eigen::Index vec(Eigen::Index i, Eigen::Index j) const { return i + j * n; }
};

// The Liouvillian preserves Hermiticity, so it restricts to a real-linear map
// on the n^2 real Hermitian coordinates.
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>
real_generator(const Liouvillian<Real>& lv, const HermitianCoordinates& hc) {
    const auto& l = lv.matrix();
    const Eigen::Index n = hc.n;
    const Eigen::Index m = hc.size();
    const std::complex<Real> iu(0, 1);
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> r(m, m);

    auto fill_column = [&](Eigen::Index col, const CVector<Real>& w) {
        for (Eigen::Index k = 0; k < n; ++k) r(k, col) = w(hc.vec(k, k)).real();
        for (std::size_t p = 0; p < hc.pairs.size(); ++p) {
            const auto [i, j] = hc.pairs[p];
            const auto row = n + 2 * static_cast<Eigen::Index>(p);
            r(row, col) = w(hc.vec(i, j)).real();
            r(row + 1, col) = w(hc.vec(i, j)).imag();
        }
    };

    CVector<Real> w(m);
    for (Eigen::Index k = 0; k < n; ++k) {
        w = l.col(hc.vec(k, k));
        fill_column(k, w);
    }
    for (std::size_t p = 0; p < hc.pairs.size(); ++p) {
        const auto [i, j] = hc.pairs[p];
        const auto col = n + 2 * static_cast<Eigen::Index>(p);
        w = l.col(hc.vec(i, j)) + l.col(hc.vec(j, i));
        fill_column(col, w);
        w = iu * (l.col(hc.vec(i, j)) - l.col(hc.vec(j, i)));
        fill_column(col + 1, w);
    }
    return r;
}

template <typename Real>
typename OperatorMatrix<Real>::Matrix
from_coordinates(const Eigen::Matrix<Real, Eigen::Dynamic, 1>& x, const HermitianCoordinates& hc) {
    using M = typename OperatorMatrix<Real>::Matrix;
    const Eigen::Index n = hc.n;
    M rho(n, n);
    for (Eigen::Index k = 0; k < n; ++k) rho(k, k) = x(k);
    for (std::size_t p = 0; p < hc.pairs.size(); ++p) {
        const auto [i, j] = hc.pairs[p];
        const auto c = n + 2 * static_cast<Eigen::Index>(p);
        rho(i, j) = std::complex<Real>(x(c), x(c + 1));
        rho(j, i) = std::conj(rho(i, j));
    }
    return rho;
}

template <typename Real>
typename OperatorMatrix<Real>::Matrix steady_trace_replaced(const Liouvillian<Real>& lv) {
    using RMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
    using RVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
    const HermitianCoordinates hc(lv.state_dim());
    RMatrix r = real_generator(lv, hc);

    // Row 0 is the d(rho_00)/dt equation; the diagonal rows sum to zero, so it is
    // redundant and gets replaced by the normalisation trace(rho) = 1.
    const Real scale = std::max(Real(1), r.row(0).cwiseAbs().maxCoeff());
    r.row(0).setZero();
    r.row(0).head(hc.n).setConstant(scale);
    RVector rhs = RVector::Zero(hc.size());
    rhs(0) = scale;

    Eigen::PartialPivLU<RMatrix> lu(r);
    // rcond() is unreliable with exactly zero pivots, so check those directly.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const Real rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
    if (!(rcond > Real(1e-13))) {
        throw SingularSystem("steady_state: stationary subspace is not one-dimensional (rcond " +
                             std::to_string(double(rcond)) + ")");
    }
    RVector x = lu.solve(rhs);
    x += lu.solve(rhs - r * x); // one step of iterative refinement
    return from_coordinates(x, hc);
}

template <typename Real>
typename OperatorMatrix<Real>::Matrix steady_null_space(const Liouvillian<Real>& lv,
                                                        const SolverConfig<Real>& cfg) {
    using M = typename OperatorMatrix<Real>::Matrix;
    const Eigen::Index n = lv.state_dim();
    Eigen::ComplexEigenSolver<M> es(lv.matrix(), true);
    if (es.info() != Eigen::Success) {
        throw ConvergenceFailure("steady_state: eigen-decomposition of the Liouvillian failed");
    }
    const auto& ev = es.eigenvalues();
    const Real norm = lv.matrix().cwiseAbs().rowwise().sum().maxCoeff();
    const Real kernel_tol = std::max(cfg.atol, Real(1e-9)) * std::max(Real(1), norm);
    Eigen::Index best = 0;
    int kernel_dim = 0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        if (std::abs(ev(k)) <= kernel_tol) ++kernel_dim;
        if (std::abs(ev(k)) < std::abs(ev(best))) best = k;
    }
    if (kernel_dim > 1) {
        throw SingularSystem("steady_state: Liouvillian kernel has dimension " +
                             std::to_string(kernel_dim));
    }
    CVector<Real> v = es.eigenvectors().col(best);
    M rho = Eigen::Map<M>(v.data(), n, n);
    rho /= rho.trace();
    return (rho + rho.adjoint()) * Real(0.5);
}

} // namespace detail

template <typename Real>
DensityMatrix<Real> steady_state(const Liouvillian<Real>& lv,
                                 const SolverConfig<Real>& cfg = SolverConfig<Real>{}) {
    cfg.validate();
    auto rho = cfg.steady_method == SteadyMethod::trace_replaced
                   ? detail::steady_trace_replaced(lv)
                   : detail::steady_null_space(lv, cfg);
    const Real res = detail::residual_norm(lv, rho);
    if (!(res <= cfg.atol)) {
        throw ConvergenceFailure("steady_state: residual " + std::to_string(double(res)) +
                                 " exceeds atol");
    }
    try {
        return {std::move(rho), lv.tag()};
    } catch (const PreconditionError& e) {
        throw ConvergenceFailure(std::string("steady_state: result is not a valid state: ") +
                                 e.what());
    }
}

// Dormand-Prince 5(4) integration of d vec(rho)/dt = L vec(rho). Steps are
// bounded by min(time_step, 2/||L||_inf); the embedded 4th-order solution
// supplies the local error estimate, and a step whose scaled error exceeds 1
// is retried with a smaller step. The final step of an interval is trimmed
// so the requested time is hit exactly.
template <typename Real = double>
class Propagator {
public:
    using Scalar = std::complex<Real>;
    using Vector = detail::CVector<Real>;
    using Matrix = typename OperatorMatrix<Real>::Matrix;

    // Consecutive rejected steps allowed before giving up.
    static constexpr int max_rejections = 25;
    // Smallest step, relative to max_step(), before the tolerance is declared unreachable.
    static constexpr double min_step_ratio = 1e-6;

    Propagator(const Liouvillian<Real>& lv, const SolverConfig<Real>& cfg)
        : cfg_(cfg), n_(lv.state_dim()) {
        cfg_.validate();
        const auto& l = lv.matrix();
        std::vector<Eigen::Triplet<Scalar>> trip;
        for (Eigen::Index c = 0; c < l.cols(); ++c)
            for (Eigen::Index r = 0; r < l.rows(); ++r)
                if (l(r, c) != Scalar(0)) trip.emplace_back(r, c, l(r, c));
        sparse_.resize(l.rows(), l.cols());
        sparse_.setFromTriplets(trip.begin(), trip.end());
        sparse_.makeCompressed();
        const Real bound = l.cwiseAbs().rowwise().sum().maxCoeff();
        max_step_ = bound > 0 ? std::min(cfg_.time_step, Real(2) / bound) : cfg_.time_step;
    }

    Real max_step() const noexcept { return max_step_; }

    // Advances vec(rho) by t. With check_state, trace and Hermiticity drift are
    // verified after every accepted step.
    Vector advance(Vector y, Real t, bool check_state) const {
        if (t < 0) throw PreconditionError("evolve: t must be >= 0");
        if (t > cfg_.max_time) throw PreconditionError("evolve: t exceeds max_time");
        if (t == 0) return y;
        Vector k1 = sparse_ * y;
        Vector y_new, k_new;
        Real now = 0;
        Real h = max_step_;
        int rejected_run = 0;
        while (now < t) {
            const bool last = now + h >= t * (1 - Real(1e-12));
            const Real hh = last ? t - now : h;
            const Real err = step(y, k1, hh, y_new, k_new);
            // standard controller: 0.9 err^(-1/5), clamped to [0.2, 5]
            const Real factor =
                err > 0 ? std::clamp(Real(0.9) * std::pow(err, Real(-0.2)), Real(0.2), Real(5)) : Real(5);
            if (err <= 1) {
                y.swap(y_new);
                k1.swap(k_new);
                now = last ? t : now + hh;
                rejected_run = 0;
                if (check_state) verify_state(y);
                if (!last) h = std::min(max_step_, hh * factor);
            } else {
                if (++rejected_run >= max_rejections || hh * factor < max_step_ * Real(min_step_ratio)) {
                    throw StepSizeTooLarge("evolve: local error estimate exceeds tolerance (step " +
                                           std::to_string(double(hh)) + ")");
                }
                h = hh * factor;
            }
        }
        return y;
    }

    Matrix advance(const Matrix& rho, Real t, bool check_state) const {
        Vector v = Eigen::Map<const Vector>(rho.data(), n_ * n_);
        v = advance(std::move(v), t, check_state);
        return Eigen::Map<Matrix>(v.data(), n_, n_);
    }

private:
    // One trial step from y with k1 = L*y; writes the candidate and L at the
    // candidate (FSAL). Returns the scaled error norm.
    Real step(const Vector& y, const Vector& k1, Real h, Vector& y_new, Vector& k7) const {
        // clang-format off
        static constexpr Real a21 = Real(1) / 5;
        static constexpr Real a31 = Real(3) / 40, a32 = Real(9) / 40;
        static constexpr Real a41 = Real(44) / 45, a42 = Real(-56) / 15, a43 = Real(32) / 9;
        static constexpr Real a51 = Real(19372) / 6561, a52 = Real(-25360) / 2187,
                              a53 = Real(64448) / 6561, a54 = Real(-212) / 729;
        static constexpr Real a61 = Real(9017) / 3168, a62 = Real(-355) / 33,
                              a63 = Real(46732) / 5247, a64 = Real(49) / 176,
                              a65 = Real(-5103) / 18656;
        static constexpr Real b1 = Real(35) / 384, b3 = Real(500) / 1113, b4 = Real(125) / 192,
                              b5 = Real(-2187) / 6784, b6 = Real(11) / 84;
        static constexpr Real e1 = b1 - Real(5179) / 57600, e3 = b3 - Real(7571) / 16695,
                              e4 = b4 - Real(393) / 640, e5 = b5 - Real(-92097) / 339200,
                              e6 = b6 - Real(187) / 2100, e7 = Real(-1) / 40;
        // clang-format on
        const Vector k2 = sparse_ * (y + h * (a21 * k1));
        const Vector k3 = sparse_ * (y + h * (a31 * k1 + a32 * k2));
        const Vector k4 = sparse_ * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vector k5 = sparse_ * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vector k6 =
            sparse_ * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = sparse_ * y_new;
        const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Real scale = cfg_.atol + cfg_.rtol * y_new.cwiseAbs().maxCoeff();
        return err.cwiseAbs().maxCoeff() / scale;
    }

    void verify_state(const Vector& y) const {
        const Eigen::Map<const Matrix> rho(y.data(), n_, n_);
        const Real tr = std::abs(rho.trace() - Scalar(1));
        if (!(tr <= Real(1e-8))) {
            throw ConvergenceFailure("evolve: trace drift " + std::to_string(double(tr)));
        }
        const Real herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (!(herm <= Real(DensityMatrix<Real>::hermiticity_tol))) {
            throw ConvergenceFailure("evolve: Hermiticity drift " + std::to_string(double(herm)));
        }
    }

    SolverConfig<Real> cfg_;
    Eigen::Index n_;
    Eigen::SparseMatrix<Scalar> sparse_;
    Real max_step_;
};

template <typename Real>
DensityMatrix<Real> evolve(const Liouvillian<Real>& lv, const DensityMatrix<Real>& rho0, Real t,
                           const SolverConfig<Real>& cfg = SolverConfig<Real>{}) {
    if (rho0.tag() != lv.tag()) throw BasisMismatch("evolve: state and Liouvillian differ in basis");
    const Propagator<Real> prop(lv, cfg);
    auto rho = prop.advance(rho0.matrix(), t, true);
    rho = (rho + rho.adjoint()).eval() * Real(0.5);
    return {std::move(rho), lv.tag()};
}

// Quantum-regression evaluation of <c†(0) c†(tau) c(tau) c(0)> for every tau in
// a strictly increasing grid: trace(c†c exp(L tau)[c rho c†]). Propagation is
// sequential along the grid.
template <typename Real>
std::vector<std::complex<Real>>
two_time_correlator_series(const Liouvillian<Real>& lv, const DensityMatrix<Real>& rho_ss,
                           const OperatorMatrix<Real>& c, std::span<const Real> tau_grid,
                           const SolverConfig<Real>& cfg = SolverConfig<Real>{}) {
    using M = typename OperatorMatrix<Real>::Matrix;
    if (rho_ss.tag() != lv.tag() || c.tag() != lv.tag()) {
        throw BasisMismatch("two_time_correlator: operands act on different bases");
    }
    for (std::size_t k = 0; k < tau_grid.size(); ++k) {
        if (tau_grid[k] < 0 || (k > 0 && !(tau_grid[k] > tau_grid[k - 1]))) {
            throw PreconditionError("two_time_correlator: tau grid must be non-negative and "
                                    "strictly increasing");
        }
    }
    const M& cm = c.matrix();
    const M num = cm.adjoint() * cm;
    M x = cm * rho_ss.matrix() * cm.adjoint();
    // The collapsed operator is Hermitian and positive; its trace is <c†c>.
    // Propagating it normalised keeps the integrator tolerances relative.
    const Real weight = x.trace().real();
    if (weight > 0) x /= weight;

    const Propagator<Real> prop(lv, cfg);
    std::vector<std::complex<Real>> out;
    out.reserve(tau_grid.size());
    Real now = 0;
    for (const Real tau : tau_grid) {
        x = prop.advance(x, tau - now, false);
        now = tau;
        const std::complex<Real> value = (num * x).trace() * weight;
        if (std::abs(value.imag()) > Real(1e-8) * std::max(std::abs(value.real()), weight * weight)) {
            throw ConvergenceFailure("two_time_correlator: imaginary residual " +
                                     std::to_string(double(value.imag())));
        }
        out.push_back(value);
    }
    return out;
}

template <typename Real>
std::complex<Real> two_time_correlator(const Liouvillian<Real>& lv,
                                       const DensityMatrix<Real>& rho_ss,
                                       const OperatorMatrix<Real>& c, Real tau,
                                       const SolverConfig<Real>& cfg = SolverConfig<Real>{}) {
    const Real grid[] = {tau};
    return two_time_correlator_series(lv, rho_ss, c, std::span<const Real>(grid), cfg).front();
}

} // namespace phmol
