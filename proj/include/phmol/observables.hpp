#pragma once

// Normal-mode occupations and second-order correlation functions.

#include "phmol/errors.hpp"
#include "phmol/fock.hpp"
#include "phmol/model.hpp"
#include "phmol/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phmol {

// Below this <c†c> the ratio defining g2 is treated as undefined.
inline constexpr double occupation_floor = 1e-14;

// Negative g2 values above this floor are rounding noise and clamp to zero.
inline constexpr double g2_negative_floor = -1e-10;

template <typename Real = double>
struct Occupations {
    Real n_plus = 0;
    Real n_minus = 0;
};

template <typename Real>
Occupations<Real> occupations(const DensityMatrix<Real>& rho, const FockBasis& basis) {
    const Real np = rho.expectation(number_plus<Real>(basis)).real();
    const Real nm = rho.expectation(number_minus<Real>(basis)).real();
    return {std::max(np, Real(0)), std::max(nm, Real(0))};
}

namespace detail {

template <typename Real>
Real checked_occupation(const DensityMatrix<Real>& rho, const OperatorMatrix<Real>& c) {
    const Real n = rho.expectation(adjoint(c) * c).real();
    if (!(n > Real(occupation_floor))) {
        throw VacuumOccupation("g2 undefined: <c†c> = " + std::to_string(double(n)) +
                               " is at or below the occupation floor");
    }
    return n;
}

template <typename Real>
Real clamp_g2(Real g, bool* clamped) {
    if (g < 0) {
        if (g < Real(g2_negative_floor)) {
            throw ConvergenceFailure("g2 evaluated to " + std::to_string(double(g)));
        }
        if (clamped) *clamped = true;
        return 0;
    }
    return g;
}

} // namespace detail

// <c†c†cc> / <c†c>^2 on the given state.
template <typename Real>
Real g2_zero(const DensityMatrix<Real>& rho, const OperatorMatrix<Real>& c) {
    const Real n = detail::checked_occupation(rho, c);
    const auto cd = adjoint(c);
    const Real pairs = rho.expectation(cd * cd * c * c).real();
    return detail::clamp_g2(pairs / (n * n), static_cast<bool*>(nullptr));
}

template <typename Real>
Real g2_zero(const DensityMatrix<Real>& rho, const FockBasis& basis, Mode mode) {
    return g2_zero(rho, annihilation<Real>(basis, mode));
}

template <typename Real = double>
struct CorrelationResult {
    std::optional<Mode> mode;
    std::vector<Real> tau_grid;
    std::vector<Real> g2_values;
    Real occupation = 0;
    SystemParams<Real> params;
    std::size_t clamped = 0; // entries lifted from a tiny negative value to 0
};

template <typename Real>
CorrelationResult<Real> g2_tau(const Liouvillian<Real>& lv, const DensityMatrix<Real>& rho_ss,
                               const OperatorMatrix<Real>& c, std::span<const Real> tau_grid,
                               const SolverConfig<Real>& cfg = SolverConfig<Real>{},
                               std::optional<Mode> mode = std::nullopt) {
    if (tau_grid.empty() || tau_grid.front() != Real(0)) {
        throw PreconditionError("g2_tau: tau grid must start at 0");
    }
    const Real n = detail::checked_occupation(rho_ss, c);
    const auto corr = two_time_correlator_series(lv, rho_ss, c, tau_grid, cfg);

    CorrelationResult<Real> out;
    out.mode = mode;
    out.tau_grid.assign(tau_grid.begin(), tau_grid.end());
    out.occupation = n;
    out.params = lv.params();
    out.g2_values.reserve(corr.size());
    for (const auto& v : corr) {
        bool clamped = false;
        out.g2_values.push_back(detail::clamp_g2(v.real() / (n * n), &clamped));
        out.clamped += clamped;
    }
    return out;
}

template <typename Real>
CorrelationResult<Real> g2_tau(const Liouvillian<Real>& lv, const DensityMatrix<Real>& rho_ss,
                               const FockBasis& basis, Mode mode, std::span<const Real> tau_grid,
                               const SolverConfig<Real>& cfg = SolverConfig<Real>{}) {
    return g2_tau(lv, rho_ss, annihilation<Real>(basis, mode), tau_grid, cfg, mode);
}

// Uniform grid 0, dt, ..., tau_max with `steps` intervals.
template <typename Real = double>
std::vector<Real> uniform_tau_grid(Real tau_max, int steps) {
    if (!(tau_max > 0) || steps < 1) {
        throw PreconditionError("tau grid: tau_max must be > 0 and steps >= 1");
    }
    std::vector<Real> grid(static_cast<std::size_t>(steps) + 1);
    for (int k = 0; k <= steps; ++k) grid[static_cast<std::size_t>(k)] = tau_max * Real(k) / Real(steps);
    return grid;
}

// Mean spacing of successive local maxima of a sampled curve, with each peak
// refined by a three-point parabola. Returns nullopt when fewer than two
// maxima are found.
template <typename Real>
std::optional<Real> mean_peak_spacing(std::span<const Real> x, std::span<const Real> y) {
    if (x.size() != y.size()) throw PreconditionError("mean_peak_spacing: size mismatch");
    std::vector<Real> peaks;
    for (std::size_t k = 1; k + 1 < y.size(); ++k) {
        if (y[k] > y[k - 1] && y[k] >= y[k + 1]) {
            const Real denom = y[k - 1] - 2 * y[k] + y[k + 1];
            Real shift = 0;
            if (denom != 0) shift = Real(0.5) * (y[k - 1] - y[k + 1]) / denom;
            const Real dx = x[k + 1] - x[k];
            peaks.push_back(x[k] + shift * dx);
        }
    }
    if (peaks.size() < 2) return std::nullopt;
    return (peaks.back() - peaks.front()) / Real(peaks.size() - 1);
}

} // namespace phmol
