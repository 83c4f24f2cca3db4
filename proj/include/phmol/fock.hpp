#pragma once

// Truncated two-mode Fock space over the normal modes c+ and c-, and the
// ladder/number operators acting on it as dense complex matrices.

#include "phmol/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phmol {

enum class Mode { plus, minus };

inline std::string_view to_string(Mode m) noexcept {
    return m == Mode::plus ? "plus" : "minus";
}

inline Mode parse_mode(std::string_view s) {
    if (s == "plus" || s == "+") return Mode::plus;
    if (s == "minus" || s == "-") return Mode::minus;
    throw PreconditionError("unknown mode '" + std::string(s) + "' (expected plus or minus)");
}

inline Mode mirror(Mode m) noexcept { return m == Mode::plus ? Mode::minus : Mode::plus; }

// Number of states with n+ + n- <= n_max.
constexpr std::size_t basis_size(int n_max) noexcept {
    const auto n = static_cast<std::size_t>(n_max);
    return (n + 1) * (n + 2) / 2;
}

// Identifies the basis an operator acts on. Two bases with equal n_max have
// identical content and ordering, so the truncation level is the identity.
struct BasisTag {
    int n_max = 0;
    friend bool operator==(BasisTag, BasisTag) = default;
};

struct FockState {
    int n_plus = 0;
    int n_minus = 0;
    int total() const noexcept { return n_plus + n_minus; }
    friend bool operator==(FockState, FockState) = default;
};

// States ordered by ascending total photon number, then ascending n- within
// a shell: |0,0>, |1,0>, |0,1>, |2,0>, |1,1>, |0,2>, ...
class FockBasis {
public:
    explicit FockBasis(int n_max) : n_max_(n_max) {
        if (n_max < 0) throw PreconditionError("build_basis: n_max must be >= 0");
        states_.reserve(basis_size(n_max));
        for (int shell = 0; shell <= n_max; ++shell) {
            for (int nm = 0; nm <= shell; ++nm) states_.push_back({shell - nm, nm});
        }
    }

    int n_max() const noexcept { return n_max_; }
    BasisTag tag() const noexcept { return {n_max_}; }
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<FockState>& states() const noexcept { return states_; }
    const FockState& operator[](std::size_t i) const { return states_.at(i); }

    std::optional<std::size_t> index_of(int n_plus, int n_minus) const noexcept {
        if (n_plus < 0 || n_minus < 0) return std::nullopt;
        const int shell = n_plus + n_minus;
        if (shell > n_max_) return std::nullopt;
        const auto first = static_cast<std::size_t>(shell) * static_cast<std::size_t>(shell + 1) / 2;
        return first + static_cast<std::size_t>(n_minus);
    }

    std::size_t index_of(FockState s) const {
        auto i = index_of(s.n_plus, s.n_minus);
        if (!i) throw PreconditionError("state outside the truncated basis");
        return *i;
    }

private:
    int n_max_;
    std::vector<FockState> states_;
};

inline FockBasis build_basis(int n_max) { return FockBasis(n_max); }

enum class OperatorRole { state, superoperator };

// Dense operator bound to a basis. Superoperators act on column-stacked
// density matrices and have dimension size^2.
template <typename Real = double>
class OperatorMatrix {
public:
    using Scalar = std::complex<Real>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    OperatorMatrix(Matrix m, BasisTag tag, OperatorRole role = OperatorRole::state)
        : m_(std::move(m)), tag_(tag), role_(role) {
        const auto n = static_cast<Eigen::Index>(basis_size(tag.n_max));
        const auto expected = role == OperatorRole::state ? n : n * n;
        if (m_.rows() != expected || m_.cols() != expected) {
            throw BasisMismatch("OperatorMatrix: dimension does not match basis with n_max=" +
                                std::to_string(tag.n_max));
        }
    }

    static OperatorMatrix zero(const FockBasis& basis) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        return {Matrix::Zero(n, n), basis.tag()};
    }

    static OperatorMatrix identity(const FockBasis& basis) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        return {Matrix::Identity(n, n), basis.tag()};
    }

    const Matrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    BasisTag tag() const noexcept { return tag_; }
    OperatorRole role() const noexcept { return role_; }
    Scalar operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    bool is_hermitian(Real tol = Real(0)) const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }

private:
    Matrix m_;
    BasisTag tag_;
    OperatorRole role_;
};

namespace detail {

template <typename Real>
void require_compatible(const OperatorMatrix<Real>& a, const OperatorMatrix<Real>& b,
                        const char* what) {
    if (a.tag() != b.tag() || a.role() != b.role()) {
        throw BasisMismatch(std::string(what) + ": operators act on different bases (n_max " +
                            std::to_string(a.tag().n_max) + " vs " +
                            std::to_string(b.tag().n_max) + ")");
    }
}

} // namespace detail

template <typename Real>
OperatorMatrix<Real> adjoint(const OperatorMatrix<Real>& a) {
    return {a.matrix().adjoint(), a.tag(), a.role()};
}

template <typename Real>
OperatorMatrix<Real> operator*(const OperatorMatrix<Real>& a, const OperatorMatrix<Real>& b) {
    detail::require_compatible(a, b, "product");
    return {a.matrix() * b.matrix(), a.tag(), a.role()};
}

template <typename Real>
OperatorMatrix<Real> operator+(const OperatorMatrix<Real>& a, const OperatorMatrix<Real>& b) {
    detail::require_compatible(a, b, "sum");
    return {a.matrix() + b.matrix(), a.tag(), a.role()};
}

template <typename Real>
OperatorMatrix<Real> operator-(const OperatorMatrix<Real>& a, const OperatorMatrix<Real>& b) {
    detail::require_compatible(a, b, "difference");
    return {a.matrix() - b.matrix(), a.tag(), a.role()};
}

template <typename Real>
OperatorMatrix<Real> operator*(std::complex<Real> s, const OperatorMatrix<Real>& a) {
    return {s * a.matrix(), a.tag(), a.role()};
}

template <typename Real>
OperatorMatrix<Real> operator*(Real s, const OperatorMatrix<Real>& a) {
    return {s * a.matrix(), a.tag(), a.role()};
}

template <typename Real>
OperatorMatrix<Real> commutator(const OperatorMatrix<Real>& a, const OperatorMatrix<Real>& b) {
    return a * b - b * a;
}

// <n+ - 1, n-| c+ |n+, n-> = sqrt(n+), and the analogue for c-.
template <typename Real = double>
OperatorMatrix<Real> annihilation(const FockBasis& basis, Mode mode) {
    using Op = OperatorMatrix<Real>;
    const auto n = static_cast<Eigen::Index>(basis.size());
    typename Op::Matrix m = Op::Matrix::Zero(n, n);
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const FockState s = basis[col];
        const int count = mode == Mode::plus ? s.n_plus : s.n_minus;
        if (count == 0) continue;
        const auto row = mode == Mode::plus ? basis.index_of(s.n_plus - 1, s.n_minus)
                                            : basis.index_of(s.n_plus, s.n_minus - 1);
        m(static_cast<Eigen::Index>(*row), static_cast<Eigen::Index>(col)) =
            std::sqrt(static_cast<Real>(count));
    }
    return {std::move(m), basis.tag()};
}

template <typename Real = double>
OperatorMatrix<Real> annihilation_plus(const FockBasis& basis) {
    return annihilation<Real>(basis, Mode::plus);
}

template <typename Real = double>
OperatorMatrix<Real> annihilation_minus(const FockBasis& basis) {
    return annihilation<Real>(basis, Mode::minus);
}

template <typename Real = double>
OperatorMatrix<Real> number(const FockBasis& basis, Mode mode) {
    const auto c = annihilation<Real>(basis, mode);
    return adjoint(c) * c;
}

template <typename Real = double>
OperatorMatrix<Real> number_plus(const FockBasis& basis) {
    return number<Real>(basis, Mode::plus);
}

template <typename Real = double>
OperatorMatrix<Real> number_minus(const FockBasis& basis) {
    return number<Real>(basis, Mode::minus);
}

template <typename Real = double>
struct LocalModes {
    OperatorMatrix<Real> a;
    OperatorMatrix<Real> b;
};

// Cavity operators a = (c+ + c-)/sqrt2, b = (c+ - c-)/sqrt2 on the normal-mode basis.
template <typename Real = double>
LocalModes<Real> local_mode_ops(const FockBasis& basis) {
    const auto cp = annihilation_plus<Real>(basis);
    const auto cm = annihilation_minus<Real>(basis);
    const Real s = Real(1) / std::sqrt(Real(2));
    return {s * (cp + cm), s * (cp - cm)};
}

} // namespace phmol
