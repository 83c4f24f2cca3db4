#pragma once

// Weak-drive model: the pure-state ansatz truncated at two photons
//
//   |psi> = C00|0,0> + C10|1,0> + C01|0,1> + C20|2,0> + C11|1,1> + C02|0,2>
//
// evolved with the normal-mode Hamiltonian plus the non-Hermitian loss term
// -i kappa/2 (n+ + n-). In steady state with C00 = 1 the amplitude hierarchy
// is solved shell by shell, neglecting feedback of higher shells on lower ones:
//
//   (D - J - i k/2) C10 = -eps/sqrt2
//   (D + J - i k/2) C01 = -eps/sqrt2
//   [U + 2(D - J - i k/2)] C20 + U C02 = -eps C10
//   U C20 + [U + 2(D + J - i k/2)] C02 = -eps C01
//   (2D - i k + 2U) C11 = -eps/sqrt2 (C01 + C10)
//
// Vanishing C20 (C02) yields the closed-form optimum for antibunching in the
// symmetric (antisymmetric) mode.

#include "phmol/errors.hpp"
#include "phmol/fock.hpp"
#include "phmol/model.hpp"
#include "phmol/observables.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace phmol {

template <typename Real = double>
struct AnalyticAmplitudes {
    using Complex = std::complex<Real>;
    Complex c00, c10, c01, c20, c11, c02;
    Complex eta; // C01 / C10
    SystemParams<Real> params;

    // Squared norm of the (un-normalised) ansatz.
    Real norm() const {
        return std::norm(c00) + std::norm(c10) + std::norm(c01) + std::norm(c20) +
               std::norm(c11) + std::norm(c02);
    }
};

namespace detail {

template <typename Real>
Real equal_kappa(const SystemParams<Real>& p, const char* what) {
    p.validate();
    if (p.kappa_a != p.kappa_b) {
        throw PreconditionError(std::string(what) + ": requires kappa_a == kappa_b");
    }
    return p.kappa_a;
}

} // namespace detail

template <typename Real>
AnalyticAmplitudes<Real> solve_amplitudes(const SystemParams<Real>& p) {
    using C = std::complex<Real>;
    const Real kappa = detail::equal_kappa(p, "solve_amplitudes");
    const Real delta = p.delta();
    if (!(p.epsilon > 0)) throw PreconditionError("solve_amplitudes: epsilon must be > 0");

    const Real j = p.j_coupling;
    const Real u = p.u_kerr;
    const Real eps = p.epsilon;
    const Real drive = eps / std::sqrt(Real(2));
    const C half_loss(0, kappa / 2);
    const C det_plus = C(delta - j) - half_loss;  // one-photon detuning of c+
    const C det_minus = C(delta + j) - half_loss; // one-photon detuning of c-

    AnalyticAmplitudes<Real> a;
    a.params = p;
    a.c00 = C(1);
    a.c10 = -drive * a.c00 / det_plus;
    a.c01 = -drive * a.c00 / det_minus;
    a.eta = det_plus / det_minus;

    const C m00 = u + Real(2) * det_plus;
    const C m11 = u + Real(2) * det_minus;
    const C off(u);
    const C det = m00 * m11 - off * off;
    if (std::abs(det) < Real(1e-14)) {
        throw SingularAmplitudeSystem("solve_amplitudes: two-photon system is singular");
    }
    const C r0 = -eps * a.c10;
    const C r1 = -eps * a.c01;
    a.c20 = (r0 * m11 - off * r1) / det;
    a.c02 = (m00 * r1 - off * r0) / det;
    a.c11 = -drive * (a.c01 + a.c10) / C(Real(2) * delta + Real(2) * u, -kappa);
    return a;
}

// g2(0) of the ansatz state itself. For the plus mode, with N the squared norm,
//   <c+†c+†c+c+> = 2|C20|^2 / N,  <c+†c+> = (|C10|^2 + 2|C20|^2 + |C11|^2) / N,
// so g2 = 2|C20|^2 N / (|C10|^2 + 2|C20|^2 + |C11|^2)^2. Minus mode: C20 -> C02, C10 -> C01.
template <typename Real>
Real analytic_g2_zero(const AnalyticAmplitudes<Real>& a, Mode mode) {
    const auto& one = mode == Mode::plus ? a.c10 : a.c01;
    const auto& two = mode == Mode::plus ? a.c20 : a.c02;
    const Real n = a.norm();
    const Real occ = std::norm(one) + Real(2) * std::norm(two) + std::norm(a.c11);
    if (!(occ / n > Real(occupation_floor))) {
        throw VacuumOccupation("analytic_g2_zero: occupation below the floor");
    }
    return Real(2) * std::norm(two) * n / (occ * occ);
}

// Leading-order form 2|C20|^2 / |C10|^4 (C00 = 1); differs from the full ratio at O(eps^2).
template <typename Real>
Real leading_order_g2_zero(const AnalyticAmplitudes<Real>& a, Mode mode) {
    const auto& one = mode == Mode::plus ? a.c10 : a.c01;
    const auto& two = mode == Mode::plus ? a.c20 : a.c02;
    const Real occ = std::norm(one) / std::norm(a.c00);
    if (!(occ > Real(occupation_floor))) {
        throw VacuumOccupation("leading_order_g2_zero: occupation below the floor");
    }
    return Real(2) * std::norm(two) / std::norm(a.c00) / (occ * occ);
}

template <typename Real = double>
struct OptimalConditions {
    Mode mode;
    Real delta_opt;
    Real u_opt;
};

// plus: (-J, kappa^2/(4J)); minus: (+J, -kappa^2/(4J)).
template <typename Real>
OptimalConditions<Real> optimal_conditions(Mode mode, Real j, Real kappa) {
    if (j == Real(0)) {
        throw DegenerateCoupling("optimal_conditions: J = 0, the optimal U diverges");
    }
    if (!(j > 0) || !(kappa > 0)) {
        throw PreconditionError("optimal_conditions: J and kappa must be > 0");
    }
    const Real u = kappa * kappa / (Real(4) * j);
    return mode == Mode::plus ? OptimalConditions<Real>{mode, -j, u}
                              : OptimalConditions<Real>{mode, j, -u};
}

// Determinant condition for C20 = 0 (plus) or C02 = 0 (minus):
//   plus:  k^2/4 - J U - (D + J)^2 + i (D + J) k
//   minus: k^2/4 + J U - (D - J)^2 + i (D - J) k
template <typename Real>
std::complex<Real> optimality_residual(const SystemParams<Real>& p, Mode mode) {
    const Real kappa = detail::equal_kappa(p, "optimality_residual");
    const Real delta = p.delta();
    const Real j = p.j_coupling;
    const Real u = p.u_kerr;
    const Real quarter = kappa * kappa / Real(4);
    if (mode == Mode::plus) {
        const Real s = delta + j;
        return {quarter - j * u - s * s, s * kappa};
    }
    const Real s = delta - j;
    return {quarter + j * u - s * s, s * kappa};
}

template <typename Real = double>
struct ShortTimePopulations {
    Real p10 = 0;
    Real p01 = 0;
};

// Independent Rabi pictures for |0,0> -> |0,1> (resonant) and |0,0> -> |1,0>
// (detuned by 2J), valid for t << 2 pi / kappa at D = -J.
template <typename Real>
ShortTimePopulations<Real> short_time_populations(const SystemParams<Real>& p, Real t) {
    p.validate();
    const Real delta = p.delta();
    const Real j = p.j_coupling;
    if (std::abs(delta + j) > Real(1e-12) * std::max(Real(1), j)) {
        throw PreconditionError("short_time_populations: requires delta == -J");
    }
    if (t < 0) throw PreconditionError("short_time_populations: t must be >= 0");
    if (!(j > 0)) throw DegenerateCoupling("short_time_populations: requires J > 0");
    const Real eps = p.epsilon;
    ShortTimePopulations<Real> out;
    out.p01 = (Real(1) - std::cos(std::sqrt(Real(2)) * eps * t)) / Real(2);
    out.p10 = (Real(1) - std::cos(Real(2) * j * t)) * eps * eps / (Real(4) * j * j);
    return out;
}

} // namespace phmol
