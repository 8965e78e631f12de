#ifndef FGN_EXACT_HPP
#define FGN_EXACT_HPP

#include "fgn/hurst.hpp"
#include "fgn/observation.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>

namespace fgn {

/// Autocorrelation of fractional Gaussian noise at lags 0..max_lag,
///   gamma(k) = (|k-1|^{2H} - 2|k|^{2H} + |k+1|^{2H}) / 2.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> fgn_acf(Scalar H, Eigen::Index max_lag) {
    check_hurst(static_cast<double>(H));
    if (max_lag < 0) throw std::invalid_argument("max_lag must be nonnegative");
    using std::pow;
    using std::abs;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> acf(max_lag + 1);
    const Scalar two_h = Scalar(2) * H;
    acf(0) = Scalar(1);
    for (Eigen::Index k = 1; k <= max_lag; ++k) {
        const Scalar kk = Scalar(k);
        acf(k) = Scalar(0.5) *
                 (pow(kk - Scalar(1), two_h) - Scalar(2) * pow(kk, two_h) + pow(kk + Scalar(1), two_h));
    }
    return acf;
}

/// Log-determinant and quadratic form of a zero-mean Gaussian at unit scale.
/// With covariance sigma^2 * C, log|C| = log_det and x' C^{-1} x = quad.
struct GaussianTerms {
    double log_det = 0.0;
    double quad = 0.0;
    Eigen::Index n = 0;

    double loglik(double sigma) const {
        const double dn = static_cast<double>(n);
        return -0.5 * dn * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - dn * std::log(sigma) -
               0.5 * quad / (sigma * sigma);
    }

    double profile_sigma() const { return std::sqrt(quad / static_cast<double>(n)); }

    /// Log-likelihood maximized over sigma.
    double profile_loglik() const { return loglik(profile_sigma()); }
};

/// Durbin-Levinson recursion on a unit-diagonal Toeplitz covariance. After
/// order() == t, coefficients()(k-1) is the weight of x_{t-k} in the best
/// linear predictor of x_t and innovation_variance() its error variance.
class DurbinLevinson {
public:
    /// Partial variances below this (relative to acf(0)) are reported as breakdown.
    static constexpr double variance_floor = 1e-13;

    explicit DurbinLevinson(Eigen::VectorXd acf);

    Eigen::Index order() const { return order_; }
    double innovation_variance() const { return variance_; }
    Eigen::Ref<const Eigen::VectorXd> coefficients() const { return phi_.head(order_); }

    /// Predictor of the next value from the most recent order() values,
    /// history(order()-1) being the latest.
    double predict(Eigen::Ref<const Eigen::VectorXd> history) const;

    void advance();

private:
    Eigen::VectorXd acf_;
    Eigen::VectorXd phi_;
    Eigen::VectorXd scratch_;
    Eigen::Index order_ = 0;
    double variance_;
};

/// Innovations decomposition of x under unit-scale fGn(H), O(n^2).
GaussianTerms exact_terms(const Eigen::VectorXd& x, double H);

double loglik_exact(const Eigen::VectorXd& x, const HurstParams& params);

/// Precision matrix of the n x n covariance sigma^2 * toeplitz(acf), O(n^2).
Eigen::MatrixXd trench_inverse(const Eigen::VectorXd& acf, Eigen::Index n, double sigma = 1.0);

/// One draw from N(0, sigma^2 Gamma(H)) by sequential conditional sampling.
Eigen::VectorXd simulate_exact(const HurstParams& params, Eigen::Index n, std::uint64_t seed);

/// Dense Toeplitz matrix scale * acf(|i-j|).
Eigen::MatrixXd toeplitz(const Eigen::VectorXd& acf, Eigen::Index n, double scale = 1.0);

struct ConditionalMoments {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
};

/// Conditional mean and sd of a latent N(0, cov) vector of length
/// obs.length() given diagonal-noise observations of its first obs.size()
/// entries. Dense O(n^3).
ConditionalMoments conditional_dense(const Eigen::MatrixXd& cov, const ObservationModel& obs);

/// conditional_dense under the exact fGn covariance.
ConditionalMoments conditional_exact(const ObservationModel& obs, const HurstParams& params);

} // namespace fgn

#endif
