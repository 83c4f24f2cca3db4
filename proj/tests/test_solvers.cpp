#include "phmol/solvers.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <vector>

using namespace phmol;
using phmol::testing::max_abs;

namespace {

using M = Eigen::MatrixXcd;

Liouvillian<double> liouvillian_for(const SystemParams<double>& p, int n_max) {
    const auto basis = build_basis(n_max);
    return build_liouvillian(p, hamiltonian_local(p, basis), basis);
}

// Oracle: right singular vector of L for the smallest singular value.
M svd_kernel(const Liouvillian<double>& lv) {
    const auto n = lv.state_dim();
    Eigen::BDCSVD<M> svd(lv.matrix(), Eigen::ComputeFullV);
    Eigen::VectorXcd v = svd.matrixV().col(svd.matrixV().cols() - 1);
    M rho = Eigen::Map<M>(v.data(), n, n);
    rho /= rho.trace();
    return rho;
}

const auto fig3a = SystemParams<double>::symmetric(-20, 20, 0.0125, 0.01);

} // namespace

TEST_CASE("undriven molecule relaxes to the vacuum") {
    for (auto p : {SystemParams<double>::symmetric(3, 2, 0.5, 0),
                   SystemParams<double>::symmetric(-20, 20, -1, 0, 2)}) {
        const auto rho = steady_state(liouvillian_for(p, 4));
        M vac = M::Zero(rho.dim(), rho.dim());
        vac(0, 0) = 1;
        CHECK(max_abs(rho.matrix() - vac) < 1e-12);
    }
}

TEST_CASE("steady state matches the singular-vector oracle") {
    const auto lv = liouvillian_for(fig3a, 5);
    const auto rho = steady_state(lv);
    CHECK(max_abs(rho.matrix() - svd_kernel(lv)) <= 1e-8);
    CHECK(detail::residual_norm(lv, rho.matrix()) <= 1e-10);
    CHECK(rho.min_eigenvalue() >= -1e-8);
}

TEST_CASE("both steady-state methods agree on random parameters") {
    SolverConfig<double> ns;
    ns.steady_method = SteadyMethod::null_space;
    for (int trial = 0; trial < 12; ++trial) {
        const auto p = trial % 3 == 0 ? testing::random_general_params()
                                       : testing::random_symmetric_params();
        const int n_max = trial < 10 ? 3 : 5;
        const auto lv = liouvillian_for(p, n_max);
        const auto a = steady_state(lv);
        const auto b = steady_state(lv, ns);
        CHECK(max_abs(a.matrix() - b.matrix()) <= 1e-8);
        CHECK(a.min_eigenvalue() >= -1e-8);
        CHECK(std::abs(a.matrix().trace() - 1.0) < 1e-12);
    }
}

TEST_CASE("degenerate Liouvillian is reported as singular") {
    const auto basis = build_basis(2);
    const auto n2 = static_cast<Eigen::Index>(basis.size() * basis.size());
    const Liouvillian<double> zero(
        OperatorMatrix<double>(M::Zero(n2, n2), basis.tag(), OperatorRole::superoperator),
        SystemParams<double>{});
    CHECK_THROWS_AS(steady_state(zero), SingularSystem);
    SolverConfig<double> ns;
    ns.steady_method = SteadyMethod::null_space;
    CHECK_THROWS_AS(steady_state(zero, ns), SingularSystem);
}

TEST_CASE("solver configuration is validated") {
    SolverConfig<double> cfg;
    cfg.time_step = 0;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    cfg = {};
    cfg.rtol = -1;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("density matrix invariants") {
    const auto basis = build_basis(1);
    M m = M::Zero(3, 3);
    m(0, 0) = 0.5;
    m(1, 1) = 0.5;
    CHECK_NOTHROW(DensityMatrix<double>(m, basis.tag()));
    M bad = m;
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix<double>(bad, basis.tag()), PreconditionError);
    bad = m;
    bad(2, 2) = 0.1;
    CHECK_THROWS_AS(DensityMatrix<double>(bad, basis.tag()), PreconditionError);
    bad = m;
    bad(0, 0) = 1.1;
    bad(1, 1) = -0.1;
    CHECK_THROWS_AS(DensityMatrix<double>(bad, basis.tag()), PreconditionError);
    CHECK_THROWS_AS(DensityMatrix<double>(M::Identity(4, 4) / 4.0, basis.tag()), BasisMismatch);
}

TEST_CASE("evolve at t = 0 returns the initial state") {
    const auto lv = liouvillian_for(fig3a, 3);
    const auto basis = build_basis(3);
    const auto rho0 = DensityMatrix<double>::pure(basis, {1, 1});
    const auto rho = evolve(lv, rho0, 0.0);
    CHECK(max_abs(rho.matrix() - rho0.matrix()) == 0.0);
    CHECK_THROWS_AS(evolve(lv, rho0, -1.0), PreconditionError);
}

TEST_CASE("the steady state is a fixed point of evolve") {
    const auto lv = liouvillian_for(fig3a, 5);
    const auto rho = steady_state(lv);
    const auto later = evolve(lv, rho, 1.0);
    CHECK(max_abs(later.matrix() - rho.matrix()) <= SolverConfig<double>{}.atol);
}

TEST_CASE("single photon decays exponentially") {
    const double kappa = 1.0;
    const auto p = SystemParams<double>::symmetric(0, 0, 0, 0, kappa);
    const auto basis = build_basis(2);
    const Liouvillian<double> lv =
        build_liouvillian(p, OperatorMatrix<double>::zero(basis), basis);
    const auto rho = evolve(lv, DensityMatrix<double>::pure(basis, {1, 0}), 1.0 / kappa);
    const auto i = static_cast<Eigen::Index>(*basis.index_of(1, 0));
    CHECK(std::abs(rho.matrix()(i, i).real() - std::exp(-1.0)) <= 1e-6);
    CHECK(std::abs(rho.matrix()(0, 0).real() - (1 - std::exp(-1.0))) <= 1e-6);
}

TEST_CASE("evolution preserves trace and Hermiticity") {
    const auto basis = build_basis(3);
    for (int trial = 0; trial < 5; ++trial) {
        const auto p = testing::random_general_params();
        const auto lv = build_liouvillian(p, hamiltonian_local(p, basis), basis);
        const DensityMatrix<double> rho0(testing::random_state(static_cast<Eigen::Index>(basis.size())),
                                         basis.tag());
        const auto rho = evolve(lv, rho0, 0.7);
        CHECK(std::abs(rho.matrix().trace() - 1.0) < 1e-8);
        CHECK(rho.min_eigenvalue() >= -1e-8);
    }
}

TEST_CASE("unreachable tolerance stops the integrator") {
    SolverConfig<double> cfg;
    cfg.rtol = 1e-30;
    cfg.atol = 1e-30;
    const auto lv = liouvillian_for(fig3a, 3);
    const auto rho0 = DensityMatrix<double>::pure(build_basis(3), {0, 0});
    CHECK_THROWS_AS(evolve(lv, rho0, 1.0, cfg), StepSizeTooLarge);
}

TEST_CASE("regression theorem at zero delay") {
    const auto basis = build_basis(5);
    const auto lv = liouvillian_for(fig3a, 5);
    const auto rho = steady_state(lv);
    for (Mode m : {Mode::plus, Mode::minus}) {
        const auto c = annihilation(basis, m);
        const auto cd = adjoint(c);
        const auto direct = rho.expectation(cd * cd * c * c);
        const auto value = two_time_correlator(lv, rho, c, 0.0);
        CHECK(std::abs(value - direct) <= 1e-12 * std::abs(direct) + 1e-300);
    }
}

TEST_CASE("linear molecule factorizes at every delay") {
    const auto basis = build_basis(5);
    for (auto p : {SystemParams<double>::symmetric(-20, 20, 0, 0.01),
                   SystemParams<double>::symmetric(1.5, 4, 0, 0.01)}) {
        const auto lv = build_liouvillian(p, basis);
        const auto rho = steady_state(lv);
        for (Mode m : {Mode::plus, Mode::minus}) {
            const auto c = annihilation(basis, m);
            const double n = rho.expectation(adjoint(c) * c).real();
            const std::vector<double> grid{0, 0.1, 0.5, 1, 3};
            const auto corr = two_time_correlator_series(lv, rho, c, std::span<const double>(grid));
            for (const auto& v : corr) CHECK(std::abs(v.real() - n * n) <= 1e-6 * n * n);
        }
    }
}

TEST_CASE("correlations factorize at long delay") {
    const auto basis = build_basis(5);
    const auto p = SystemParams<double>::symmetric(-5, 5, 0.05, 0.01);
    const auto lv = build_liouvillian(p, basis);
    const auto rho = steady_state(lv);
    const auto c = annihilation_plus(basis);
    const double n = rho.expectation(adjoint(c) * c).real();
    const std::vector<double> grid{10, 15, 20};
    const auto corr = two_time_correlator_series(lv, rho, c, std::span<const double>(grid));
    for (std::size_t k = 0; k < corr.size(); ++k) CHECK(std::abs(corr[k].real() / (n * n) - 1) <= 0.02);
}

TEST_CASE("delay grid must be increasing") {
    const auto basis = build_basis(2);
    const auto lv = liouvillian_for(fig3a, 2);
    const auto rho = steady_state(lv);
    const std::vector<double> grid{0, 1, 1};
    CHECK_THROWS_AS(two_time_correlator_series(lv, rho, annihilation_plus(basis),
                                               std::span<const double>(grid)),
                    PreconditionError);
    CHECK_THROWS_AS(two_time_correlator(lv, rho, annihilation_plus(build_basis(3)), 0.0),
                    BasisMismatch);
}
