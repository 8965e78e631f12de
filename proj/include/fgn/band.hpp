#ifndef FGN_BAND_HPP
#define FGN_BAND_HPP

#include "fgn/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace fgn {

/// Symmetric matrix with lower bandwidth b, stored diagonal-major:
/// storage()(k, j) = A(j + k, j) for k = 0..b. Entries past the last row are
/// zero padding, so the storage always holds dim * (b + 1) scalars.
template <typename Scalar_>
class SymmetricBandMatrix {
public:
    using Scalar = Scalar_;
    using Index = Eigen::Index;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Storage = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    SymmetricBandMatrix() = default;
    SymmetricBandMatrix(Index dim, Index bandwidth)
        : band_(Storage::Zero(bandwidth + 1, dim)), bandwidth_(bandwidth) {}

    Index dim() const { return band_.cols(); }
    Index bandwidth() const { return bandwidth_; }
    const Storage& storage() const { return band_; }
    Storage& storage() { return band_; }

    Scalar operator()(Index i, Index j) const {
        if (i < j) std::swap(i, j);
        return i - j <= bandwidth_ ? band_(i - j, j) : Scalar(0);
    }

    /// Mutable access to A(i, j) for j <= i <= j + bandwidth().
    Scalar& lower(Index i, Index j) {
        eigen_assert(i >= j && i - j <= bandwidth_ && i < dim());
        return band_(i - j, j);
    }

    Vector operator*(const Vector& x) const {
        eigen_assert(x.size() == dim());
        const Index n = dim();
        Vector y = band_.row(0).transpose().matrix().cwiseProduct(x);
        for (Index k = 1; k <= bandwidth_; ++k) {
            for (Index j = 0; j + k < n; ++j) {
                const Scalar a = band_(k, j);
                y(j + k) += a * x(j);
                y(j) += a * x(j + k);
            }
        }
        return y;
    }

    Dense to_dense() const {
        Dense A = Dense::Zero(dim(), dim());
        for (Index k = 0; k <= bandwidth_; ++k)
            for (Index j = 0; j + k < dim(); ++j) A(j + k, j) = A(j, j + k) = band_(k, j);
        return A;
    }

    /// Largest k with a nonzero on sub-diagonal k.
    Index occupied_bandwidth() const {
        for (Index k = bandwidth_; k > 0; --k)
            if ((band_.row(k) != Scalar(0)).any()) return k;
        return 0;
    }

private:
    Storage band_;
    Index bandwidth_ = 0;
};

/// Lower-triangular band factor L with A = L L^T, in the same storage layout.
template <typename Scalar>
struct BandedCholesky {
    SymmetricBandMatrix<Scalar> factor;
    /// Multiply-adds executed by the elimination inner loop.
    std::uint64_t flops = 0;

    Eigen::Index dim() const { return factor.dim(); }
    Eigen::Index bandwidth() const { return factor.bandwidth(); }
    Eigen::Index storage_size() const { return factor.storage().size(); }
    Scalar L(Eigen::Index i, Eigen::Index j) const { return i < j ? Scalar(0) : factor(i, j); }
};

/// Band Cholesky by a sliding (b+1)x(b+1) window holding the active Schur
/// complement. Each pivot applies the rank-one update to the full b x b
/// trailing window (zero-padded past the last row), so the flop counter is
/// exactly dim * b^2 with one multiply-add counted as one flop. Square roots
/// and divisions are not counted.
template <typename Scalar>
BandedCholesky<Scalar> cholesky_banded(const SymmetricBandMatrix<Scalar>& A) {
    using Index = Eigen::Index;
    using std::sqrt;
    const Index d = A.dim();
    const Index b = A.bandwidth();
    const auto& Q = A.storage();

    BandedCholesky<Scalar> chol{SymmetricBandMatrix<Scalar>(d, b), 0};
    auto& L = chol.factor.storage();

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> W =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(b + 1, b + 1);
    auto load_row = [&](Index row, Index slot, Index first) {
        // W(slot, c) = A(row, first + c) for the lower part of the window row.
        for (Index c = 0; c <= slot; ++c) {
            const Scalar a = row < d ? Q(row - (first + c), first + c) : Scalar(0);
            W(slot, c) = a;
            W(c, slot) = a;
        }
    };
    for (Index r = 0; r <= b; ++r) load_row(r, r, 0);

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> l(b + 1);
    std::uint64_t flops = 0;
    for (Index j = 0; j < d; ++j) {
        const Scalar pivot = W(0, 0);
        if (!(pivot > Scalar(0))) throw NotPositiveDefinite(j, static_cast<double>(pivot));
        const Scalar ljj = sqrt(pivot);
        l(0) = ljj;
        for (Index r = 1; r <= b; ++r) l(r) = W(r, 0) / ljj;
        for (Index r = 0; r <= b; ++r) L(r, j) = l(r);

        for (Index c = 1; c <= b; ++c) {
            const Scalar lc = l(c);
            for (Index r = 1; r <= b; ++r) W(r, c) -= l(r) * lc;
        }
        flops += static_cast<std::uint64_t>(b) * static_cast<std::uint64_t>(b);

        // Slide the window down one row/column and bring in row j + 1 + b.
        if (b > 0) W.topLeftCorner(b, b) = W.bottomRightCorner(b, b).eval();
        load_row(j + 1 + b, b, j + 1);
    }
    chol.flops = flops;
    return chol;
}

template <typename Scalar>
Scalar log_determinant(const BandedCholesky<Scalar>& chol) {
    using std::log;
    return Scalar(2) * chol.factor.storage().row(0).log().sum();
}

/// Solves L u = rhs.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_lower(const BandedCholesky<Scalar>& chol,
                                                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u) {
    const auto& L = chol.factor.storage();
    const Eigen::Index d = chol.dim(), b = chol.bandwidth();
    for (Eigen::Index j = 0; j < d; ++j) {
        u(j) /= L(0, j);
        const Scalar uj = u(j);
        for (Eigen::Index k = 1; k <= b && j + k < d; ++k) u(j + k) -= L(k, j) * uj;
    }
    return u;
}

/// Solves L^T x = rhs.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_upper(const BandedCholesky<Scalar>& chol,
                                                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x) {
    const auto& L = chol.factor.storage();
    const Eigen::Index d = chol.dim(), b = chol.bandwidth();
    for (Eigen::Index j = d - 1; j >= 0; --j) {
        Scalar s = x(j);
        for (Eigen::Index k = 1; k <= b && j + k < d; ++k) s -= L(k, j) * x(j + k);
        x(j) = s / L(0, j);
    }
    return x;
}

/// A^{-1} rhs by forward and back substitution.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const BandedCholesky<Scalar>& chol,
                                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
    if (rhs.size() != chol.dim()) throw std::invalid_argument("right-hand side has the wrong length");
    return solve_upper(chol, solve_lower(chol, rhs));
}

/// Entries of A^{-1} inside the band of L (Takahashi recursion), O(dim * b^2).
template <typename Scalar>
SymmetricBandMatrix<Scalar> partial_inverse(const BandedCholesky<Scalar>& chol) {
    const auto& L = chol.factor.storage();
    const Eigen::Index d = chol.dim(), b = chol.bandwidth();
    SymmetricBandMatrix<Scalar> S(d, b);
    auto& s = S.storage();
    for (Eigen::Index i = d - 1; i >= 0; --i) {
        const Eigen::Index last = std::min(i + b, d - 1);
        const Scalar lii = L(0, i);
        for (Eigen::Index j = last; j >= i; --j) {
            // S_ij = delta_ij / L_ii^2 - (1 / L_ii) sum_{k>i} L_ki S_kj
            Scalar acc = (i == j) ? Scalar(1) / lii : Scalar(0);
            for (Eigen::Index k = i + 1; k <= last; ++k) acc -= L(k - i, i) * S(k, j);
            s(j - i, i) = acc / lii;
        }
    }
    return S;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> marginal_variances(const BandedCholesky<Scalar>& chol) {
    return partial_inverse(chol).storage().row(0).transpose().matrix();
}

/// One draw from N(0, A^{-1}): solves L^T x = e with e standard normal.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sample(const BandedCholesky<Scalar>& chol, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e(chol.dim());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = Scalar(normal(rng));
    return solve_upper(chol, std::move(e));
}

} // namespace fgn

#endif
