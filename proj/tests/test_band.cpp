#include "oracles.hpp"

#include "fgn/band.hpp"
#include "fgn/errors.hpp"

#include <doctest.h>

#include <random>

using namespace fgn;
using Band = SymmetricBandMatrix<double>;

namespace {

// Random diagonally dominant symmetric band matrix.
Band random_spd(Eigen::Index d, Eigen::Index b, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Band A(d, b);
    for (Eigen::Index j = 0; j < d; ++j)
        for (Eigen::Index k = 1; k <= b && j + k < d; ++k) A.lower(j + k, j) = unif(rng);
    for (Eigen::Index j = 0; j < d; ++j) A.lower(j, j) = 2.0 * b + 1.0 + unif(rng);
    return A;
}

Band laplacian(Eigen::Index d) {
    Band A(d, 1);
    for (Eigen::Index j = 0; j < d; ++j) {
        A.lower(j, j) = 2.0;
        if (j + 1 < d) A.lower(j + 1, j) = -1.0;
    }
    return A;
}

} // namespace

TEST_CASE("identity factor") {
    Band I(6, 2);
    for (Eigen::Index j = 0; j < 6; ++j) I.lower(j, j) = 1.0;
    const auto chol = cholesky_banded(I);
    CHECK((chol.factor.to_dense() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(log_determinant(chol) == 0.0);
}

TEST_CASE("hand-checked tridiagonal solve") {
    // [2 -1; -1 2 -1; ...] x = 1 has x_i = i (6 - i) / 2 for the 5x5 case.
    const auto chol = cholesky_banded(laplacian(5));
    const Eigen::VectorXd x = solve(chol, Eigen::VectorXd(Eigen::VectorXd::Ones(5)));
    Eigen::VectorXd expected(5);
    expected << 2.5, 4.0, 4.5, 4.0, 2.5;
    CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(log_determinant(chol) == doctest::Approx(std::log(6.0)).epsilon(1e-14));
    CHECK(chol.L(0, 0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(chol.L(1, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("band factor reconstructs and agrees with dense") {
    for (auto [d, b] : {std::pair<long, long>{1, 0}, {7, 3}, {30, 1}, {40, 5}, {12, 11}, {5, 8}}) {
        const Band A = random_spd(d, b, static_cast<unsigned>(d * 31 + b));
        const Eigen::MatrixXd dense = A.to_dense();
        const auto chol = cholesky_banded(A);
        const Eigen::MatrixXd L = chol.factor.to_dense().triangularView<Eigen::Lower>();
        INFO("d=" << d << " b=" << b);
        CHECK((L * L.transpose() - dense).cwiseAbs().maxCoeff() < 1e-12 * dense.cwiseAbs().maxCoeff());
        CHECK((L - oracle::cholesky(dense)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(log_determinant(chol) == doctest::Approx(oracle::log_determinant(dense)).epsilon(1e-12));

        Eigen::VectorXd rhs = Eigen::VectorXd::LinSpaced(d, -1.0, 2.0);
        CHECK((dense * solve(chol, rhs) - rhs).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((A * rhs - dense * rhs).cwiseAbs().maxCoeff() < 1e-12);

        const Eigen::MatrixXd inv = oracle::inverse(dense);
        const Band S = partial_inverse(chol);
        for (Eigen::Index j = 0; j < d; ++j)
            for (Eigen::Index i = j; i <= std::min<Eigen::Index>(j + b, d - 1); ++i)
                REQUIRE(std::abs(S(i, j) - inv(i, j)) < 1e-12);
        CHECK((marginal_variances(chol) - inv.diagonal()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("cost and memory laws") {
    for (long d : {10L, 100L, 1000L}) {
        for (long b : {1L, 2L, 4L, 5L}) {
            const auto chol = cholesky_banded(random_spd(d, b, 3));
            CHECK(chol.flops == static_cast<std::uint64_t>(d * b * b));
            CHECK(chol.storage_size() == d * (b + 1));
        }
    }
}

TEST_CASE("not positive definite") {
    Band A = laplacian(4);
    A.lower(2, 2) = -1.0;
    try {
        cholesky_banded(A);
        FAIL("expected NotPositiveDefinite");
    } catch (const NotPositiveDefinite& e) {
        CHECK(e.index() == 2);
    }
}

TEST_CASE("precision sampling") {
    const Band A = random_spd(20, 2, 8);
    const auto chol = cholesky_banded(A);
    CHECK(sample(chol, 5) == sample(chol, 5));
    CHECK(sample(chol, 5) != sample(chol, 6));

    // Covariance of A^{-1}-samples: Monte Carlo check on the diagonal.
    const Eigen::MatrixXd inv = oracle::inverse(A.to_dense());
    const int draws = 20000;
    Eigen::VectorXd second = Eigen::VectorXd::Zero(20);
    for (int s = 0; s < draws; ++s) second += sample(chol, 1000 + s).cwiseAbs2();
    second /= draws;
    // sd of the estimate is sqrt(2 / draws) relative
    CHECK(((second - inv.diagonal()).array() / inv.diagonal().array()).abs().maxCoeff() < 5.0 * std::sqrt(2.0 / draws));
}
