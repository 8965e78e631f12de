#include "oracles.hpp"

#include "fgn/errors.hpp"
#include "fgn/exact.hpp"

#include <doctest.h>

#include <random>

using namespace fgn;

namespace {

Eigen::VectorXd standard_normals(Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(n);
    for (auto& v : x) v = normal(rng);
    return x;
}

} // namespace

TEST_CASE("fgn_acf closed-form values") {
    CHECK(fgn_acf(0.7, 0)(0) == 1.0);
    CHECK(fgn_acf(0.93, 3)(0) == 1.0);
    CHECK(std::abs(fgn_acf(0.5, 4)(1)) < 1e-15);
    CHECK(std::abs(fgn_acf(0.5, 4)(3)) < 1e-15);
    // (2^{1.5} - 2) / 2 = sqrt(2) - 1
    CHECK(fgn_acf(0.75, 1)(1) == doctest::Approx(0.41421356237309515).epsilon(1e-14));
    CHECK_THROWS_AS(fgn_acf(1.0, 3), std::domain_error);
    CHECK_THROWS_AS(fgn_acf(0.45, 3), std::domain_error);
}

TEST_CASE("fgn_acf is positive and decreasing for long memory") {
    for (double H : {0.51, 0.6, 0.75, 0.9, 0.99}) {
        const Eigen::VectorXd acf = fgn_acf(H, 500);
        for (Eigen::Index k = 1; k <= 500; ++k) {
            REQUIRE(acf(k) > 0.0);
            if (k > 1) REQUIRE(acf(k) < acf(k - 1));
        }
    }
}

TEST_CASE("fgn_acf hyperbolic decay") {
    for (double H : {0.7, 0.8, 0.9}) {
        const double k = 1e4;
        const double ratio = fgn_acf(H, 10000)(10000) / (H * (2 * H - 1) * std::pow(k, 2 * H - 2));
        CHECK(ratio >= 0.99);
        CHECK(ratio <= 1.01);
    }
}

TEST_CASE("Hurst transform round trip") {
    for (double H : {0.5000001, 0.51, 0.6, 0.75, 0.829, 0.95, 0.99, 0.999999}) {
        CHECK(hurst_from_h(h_from_hurst(H)) == doctest::Approx(H).epsilon(1e-15));
    }
    for (double h : {-8.0, -1.5, 0.0, 0.3, 4.0}) {
        CHECK(h_from_hurst(hurst_from_h(h)) == doctest::Approx(h).epsilon(1e-12));
    }
    CHECK_THROWS(HurstParams{0.8, 0.0}.validate());
    CHECK_THROWS(HurstParams{0.3, 1.0}.validate());
}

TEST_CASE("loglik_exact trivial cases") {
    Eigen::VectorXd zero(1);
    zero << 0.0;
    CHECK(loglik_exact(zero, {0.7, 1.0}) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));

    const Eigen::VectorXd x = standard_normals(50, 3);
    double expected = 0.0;
    for (double v : x) expected += -0.5 * std::log(2 * std::numbers::pi) - 0.5 * v * v;
    CHECK(loglik_exact(x, {0.5, 1.0}) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("loglik_exact matches dense Cholesky") {
    const Eigen::VectorXd x64 = standard_normals(64, 11);
    CHECK(std::abs(loglik_exact(x64, {0.85, 1.0}) - oracle::gaussian_logdensity(oracle::fgn_cov(0.85, 64), x64)) <
          1e-10);

    for (double H : {0.55, 0.65, 0.75, 0.85, 0.95}) {
        for (long n : {1L, 2L, 17L, 100L, 256L}) {
            const double sigma = 1.7;
            const Eigen::VectorXd x = sigma * standard_normals(n, static_cast<unsigned>(n * 7 + H * 100));
            const double fast = loglik_exact(x, {H, sigma});
            const double dense = oracle::gaussian_logdensity(oracle::fgn_cov(H, n, sigma), x);
            INFO("H=" << H << " n=" << n);
            CHECK(std::abs(fast - dense) < 1e-10);
        }
    }
}

TEST_CASE("Durbin-Levinson reports breakdown") {
    Eigen::VectorXd singular(3);
    singular << 1.0, 1.0, 1.0;  // rank-one Toeplitz
    DurbinLevinson dl(singular);
    CHECK_THROWS_AS(dl.advance(), NumericalBreakdown);
}

TEST_CASE("trench_inverse") {
    SUBCASE("white noise gives identity") {
        const Eigen::MatrixXd Q = trench_inverse(fgn_acf(0.5, 4), 5);
        CHECK((Q - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SUBCASE("matches Gauss-Jordan inverse") {
        const Eigen::MatrixXd Q = trench_inverse(fgn_acf(0.8, 16), 16, 1.3);
        const Eigen::MatrixXd ref = oracle::inverse(oracle::fgn_cov(0.8, 16, 1.3));
        CHECK((Q - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("residual, symmetry and persymmetry") {
        for (long n : {1L, 2L, 3L, 4L, 7L, 32L, 33L, 64L}) {
            for (double H : {0.6, 0.9}) {
                const Eigen::MatrixXd Q = trench_inverse(fgn_acf(H, n), n);
                const Eigen::MatrixXd S = oracle::fgn_cov(H, n);
                INFO("n=" << n << " H=" << H);
                CHECK((Q * S - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-9);
                CHECK((Q - Q.transpose()).cwiseAbs().maxCoeff() < 1e-12);
                const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n).rowwise().reverse();
                CHECK((Q - J * Q.transpose() * J).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, Q.cwiseAbs().maxCoeff()));
            }
        }
    }
}

TEST_CASE("simulate_exact") {
    SUBCASE("deterministic under a seed") {
        CHECK(simulate_exact({0.8, 2.0}, 200, 42) == simulate_exact({0.8, 2.0}, 200, 42));
        CHECK(simulate_exact({0.8, 2.0}, 200, 42) != simulate_exact({0.8, 2.0}, 200, 43));
    }
    SUBCASE("white noise has no lag-1 correlation") {
        const Eigen::Index n = 1000;
        const Eigen::VectorXd x = simulate_exact({0.5, 1.0}, n, 7);
        const Eigen::VectorXd c = x.array() - x.mean();
        const double r1 = c.head(n - 1).dot(c.tail(n - 1)) / c.squaredNorm();
        CHECK(std::abs(r1) < 4.0 / std::sqrt(static_cast<double>(n)));
    }
    SUBCASE("second moment calibrated at H = 0.9") {
        const Eigen::Index n = 500;
        const double H = 0.9, sigma = 1.5;
        // Var((1/n) sum x_t^2) = 2 sigma^4 sum_{s,t} gamma(s-t)^2 / n^2 =: 2 sigma^4 / n_eff
        const Eigen::VectorXd acf = fgn_acf(H, n);
        double sum_sq = n;
        for (Eigen::Index k = 1; k < n; ++k) sum_sq += 2.0 * static_cast<double>(n - k) * acf(k) * acf(k);
        const double n_eff = static_cast<double>(n * n) / sum_sq;
        const double sd = sigma * sigma * std::sqrt(2.0 / n_eff);

        const double single = simulate_exact({H, sigma}, n, 2024).squaredNorm() / n;
        CHECK(std::abs(single - sigma * sigma) < 3.0 * sd);

        const int seeds = 1000;
        double mean = 0.0;
        for (int s = 0; s < seeds; ++s) mean += simulate_exact({H, sigma}, n, 5000 + s).squaredNorm() / n;
        mean /= seeds;
        CHECK(std::abs(mean - sigma * sigma) < 3.0 * sd / std::sqrt(static_cast<double>(seeds)));
    }
}

TEST_CASE("conditional_exact") {
    const Eigen::Index n = 40;
    const Eigen::VectorXd y = standard_normals(n, 99);

    SUBCASE("exact observation reproduces the data") {
        const auto c = conditional_exact(ObservationModel::exact(y), {0.8, 1.0});
        CHECK((c.mean - y).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(c.sd.maxCoeff() < 1e-6);
    }
    SUBCASE("white noise shrinks independently") {
        const double d = 2.5, sigma = 1.3;
        const auto c = conditional_exact(ObservationModel::noisy(y, Eigen::VectorXd::Constant(n, d)), {0.5, sigma});
        const Eigen::VectorXd expected = d / (d + 1.0 / (sigma * sigma)) * y;
        CHECK((c.mean - expected).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((c.sd.array() - 1.0 / std::sqrt(d + 1.0 / (sigma * sigma))).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("inhomogeneous noise, missing data and horizon vs precision-form oracle") {
        const Eigen::Index m = 100, p = 5;
        const double H = 0.8, sigma = 0.9;
        const Eigen::VectorXd data = standard_normals(m, 5);
        Eigen::VectorXd d(m);
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> unif(0.5, 20.0);
        for (auto& v : d) v = unif(rng);
        for (Eigen::Index i = 3; i < m; i += 10) d(i) = 0.0;  // 10 missing
        const auto c = conditional_exact(ObservationModel::noisy(data, d, p), {H, sigma});

        // Precision form: cov = (Q + D)^{-1}, mean = cov D y.
        const Eigen::MatrixXd Q = oracle::inverse(oracle::fgn_cov(H, m + p, sigma));
        Eigen::MatrixXd QD = Q;
        Eigen::VectorXd Dy = Eigen::VectorXd::Zero(m + p);
        for (Eigen::Index i = 0; i < m; ++i) {
            QD(i, i) += d(i);
            Dy(i) = d(i) * data(i);
        }
        const Eigen::MatrixXd post = oracle::inverse(QD);
        const Eigen::VectorXd mean = post * Dy;
        CHECK((c.mean - mean).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((c.sd - post.diagonal().cwiseSqrt()).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("all missing is an error") {
        CHECK_THROWS(conditional_exact(ObservationModel::noisy(y, Eigen::VectorXd::Zero(n)), {0.7, 1.0}));
    }
}
