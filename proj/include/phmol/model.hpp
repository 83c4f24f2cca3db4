#pragma once

// Photonic-molecule Hamiltonians (cavity-mode and normal-mode forms) and the
// Liouvillian superoperator of the zero-temperature master equation.

#include "phmol/errors.hpp"
#include "phmol/fock.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>

namespace phmol {

// All rates share one reference unit, conventionally kappa = kappa_a = kappa_b.
template <typename Real = double>
struct SystemParams {
    Real delta_a = 0;    // omega_a - omega_d
    Real delta_b = 0;    // omega_b - omega_d
    Real j_coupling = 0; // inter-cavity tunnelling J >= 0
    Real u_kerr = 0;     // Kerr strength U, either sign
    Real epsilon = 0;    // real drive amplitude on cavity A
    Real kappa_a = 1;
    Real kappa_b = 1;

    // Equal-detuning convenience constructor.
    static SystemParams symmetric(Real delta, Real j, Real u, Real eps, Real kappa = Real(1)) {
        return {delta, delta, j, u, eps, kappa, kappa};
    }

    Real delta() const {
        if (delta_a != delta_b) {
            throw PreconditionError("normal-mode form requires delta_a == delta_b");
        }
        return delta_a;
    }

    bool equal_losses() const noexcept { return kappa_a == kappa_b; }

    void validate() const {
        using std::isfinite;
        if (!(isfinite(delta_a) && isfinite(delta_b) && isfinite(j_coupling) &&
              isfinite(u_kerr) && isfinite(epsilon) && isfinite(kappa_a) && isfinite(kappa_b))) {
            throw PreconditionError("SystemParams: all parameters must be finite");
        }
        if (!(kappa_a > 0) || !(kappa_b > 0)) {
            throw PreconditionError("SystemParams: kappa_a and kappa_b must be > 0");
        }
        if (epsilon < 0) throw PreconditionError("SystemParams: epsilon must be >= 0");
        if (j_coupling < 0) throw PreconditionError("SystemParams: j_coupling must be >= 0");
    }
};

namespace detail {

template <typename Real>
OperatorMatrix<Real> hermitize(const OperatorMatrix<Real>& h) {
    typename OperatorMatrix<Real>::Matrix m = (h.matrix() + h.matrix().adjoint()) * Real(0.5);
    return {std::move(m), h.tag()};
}

} // namespace detail

// H = Da a†a + Db b†b - J(a†b + b†a) + U a†a†aa + U b†b†bb + eps(a† + a),
// assembled from a, b expressed on the normal-mode basis.
template <typename Real>
OperatorMatrix<Real> hamiltonian_local(const SystemParams<Real>& p, const FockBasis& basis) {
    p.validate();
    const auto [a, b] = local_mode_ops<Real>(basis);
    const auto ad = adjoint(a);
    const auto bd = adjoint(b);
    auto h = p.delta_a * (ad * a) + p.delta_b * (bd * b) - p.j_coupling * (ad * b + bd * a) +
             p.u_kerr * (ad * ad * a * a) + p.u_kerr * (bd * bd * b * b) +
             p.epsilon * (ad + a);
    return detail::hermitize(h);
}

template <typename Real>
OperatorMatrix<Real> hamiltonian_normal(const SystemParams<Real>& p, const FockBasis& basis) {
    p.validate();
    if (p.delta_a != p.delta_b) {
        throw PreconditionError(
            "hamiltonian_normal: the normal-mode form assumes equal detunings (delta_a == delta_b)");
    }
    const Real delta = p.delta_a;
    const Real j = p.j_coupling;
    const Real u = p.u_kerr;
    const auto cp = annihilation_plus<Real>(basis);
    const auto cm = annihilation_minus<Real>(basis);
    const auto cpd = adjoint(cp);
    const auto cmd = adjoint(cm);
    const auto np = cpd * cp;
    const auto nm = cmd * cm;
    const Real half_u = u / Real(2);
    const Real drive = p.epsilon / std::sqrt(Real(2));

    auto h = (delta - j) * np + (delta + j) * nm +
             half_u * (cpd * cpd * cp * cp + cmd * cmd * cm * cm) +
             half_u * (cmd * cmd * cp * cp + cpd * cpd * cm * cm + Real(4) * (np * nm)) +
             drive * (cpd + cmd) + drive * (cp + cm);
    return detail::hermitize(h);
}

// Matrix representation of rho -> L[rho] on column-stacked rho, i.e.
// vec(rho)[i + j*dim] = rho(i, j). With this convention vec(A rho B) = (B^T (x) A) vec(rho).
template <typename Real = double>
class Liouvillian {
public:
    using Scalar = std::complex<Real>;
    using Matrix = typename OperatorMatrix<Real>::Matrix;

    Liouvillian(OperatorMatrix<Real> super, SystemParams<Real> params)
        : super_(std::move(super)), params_(params) {
        if (super_.role() != OperatorRole::superoperator) {
            throw BasisMismatch("Liouvillian: expected a superoperator-role matrix");
        }
    }

    const OperatorMatrix<Real>& op() const noexcept { return super_; }
    const Matrix& matrix() const noexcept { return super_.matrix(); }
    BasisTag tag() const noexcept { return super_.tag(); }
    const SystemParams<Real>& params() const noexcept { return params_; }
    Eigen::Index state_dim() const noexcept {
        return static_cast<Eigen::Index>(basis_size(tag().n_max));
    }

    // L[rho] for a dim x dim matrix (not necessarily Hermitian).
    Matrix apply(const Matrix& rho) const {
        const Eigen::Index n = state_dim();
        if (rho.rows() != n || rho.cols() != n) {
            throw BasisMismatch("Liouvillian::apply: matrix size does not match basis");
        }
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v =
            matrix() * Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(rho.data(), n * n);
        return Eigen::Map<Matrix>(v.data(), n, n);
    }

private:
    OperatorMatrix<Real> super_;
    SystemParams<Real> params_;
};

namespace detail {

template <typename Real>
using CMatrix = typename OperatorMatrix<Real>::Matrix;

// out += scale * (x (x) y), skipping the zero entries of x.
template <typename Real>
void add_kron(CMatrix<Real>& out, std::complex<Real> scale, const CMatrix<Real>& x,
              const CMatrix<Real>& y) {
    const Eigen::Index yr = y.rows(), yc = y.cols();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (x(i, j) == std::complex<Real>(0)) continue;
            out.block(i * yr, j * yc, yr, yc) += (scale * x(i, j)) * y;
        }
    }
}

// rho -> weight * (2 A rho B† - A† B rho - rho A† B), the pattern of each
// dissipator line of the master equation (A = B gives an ordinary Lindblad term).
template <typename Real>
void add_dissipator(CMatrix<Real>& out, Real weight, const CMatrix<Real>& a,
                    const CMatrix<Real>& b) {
    if (weight == Real(0)) return;
    const Eigen::Index n = a.rows();
    const CMatrix<Real> id = CMatrix<Real>::Identity(n, n);
    const CMatrix<Real> ad_b = a.adjoint() * b;
    // (B†)^T = conj(B)
    add_kron<Real>(out, Real(2) * weight, b.conjugate(), a);
    add_kron<Real>(out, -weight, id, ad_b);
    add_kron<Real>(out, -weight, ad_b.transpose(), id);
}

} // namespace detail

// -i[H, rho] + (ka+kb)/4 (D[c+] + D[c-]) + (ka-kb)/4 (cross terms c+ <-> c-).
template <typename Real>
Liouvillian<Real> build_liouvillian(const SystemParams<Real>& p, const OperatorMatrix<Real>& h,
                                    const FockBasis& basis) {
    p.validate();
    if (h.tag() != basis.tag() || h.role() != OperatorRole::state) {
        throw BasisMismatch("build_liouvillian: Hamiltonian acts on a different basis");
    }
    using M = detail::CMatrix<Real>;
    const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
    const M id = M::Identity(n, n);
    const std::complex<Real> i_unit(0, 1);

    M super = M::Zero(n * n, n * n);
    detail::add_kron<Real>(super, -i_unit, id, h.matrix());
    detail::add_kron<Real>(super, i_unit, h.matrix().transpose(), id);

    const M cp = annihilation_plus<Real>(basis).matrix();
    const M cm = annihilation_minus<Real>(basis).matrix();
    const Real diag = (p.kappa_a + p.kappa_b) / Real(4);
    const Real cross = (p.kappa_a - p.kappa_b) / Real(4);
    detail::add_dissipator<Real>(super, diag, cp, cp);
    detail::add_dissipator<Real>(super, diag, cm, cm);
    detail::add_dissipator<Real>(super, cross, cp, cm);
    detail::add_dissipator<Real>(super, cross, cm, cp);

    return {OperatorMatrix<Real>(std::move(super), basis.tag(), OperatorRole::superoperator), p};
}

// Convenience pipeline: normal-form Hamiltonian followed by the Liouvillian.
template <typename Real>
Liouvillian<Real> build_liouvillian(const SystemParams<Real>& p, const FockBasis& basis) {
    return build_liouvillian(p, hamiltonian_normal(p, basis), basis);
}

} // namespace phmol
