#include "fgn/exact.hpp"

#include "fgn/errors.hpp"

#include <random>

namespace fgn {

DurbinLevinson::DurbinLevinson(Eigen::VectorXd acf)
    : acf_(std::move(acf)),
      phi_(Eigen::VectorXd::Zero(acf_.size())),
      scratch_(acf_.size()),
      variance_(acf_.size() > 0 ? acf_(0) : 0.0) {
    if (acf_.size() == 0 || !(acf_(0) > 0.0)) {
        throw NumericalBreakdown("Durbin-Levinson needs a positive lag-0 autocovariance");
    }
}

double DurbinLevinson::predict(Eigen::Ref<const Eigen::VectorXd> history) const {
    double prediction = 0.0;
    const Eigen::Index t = order_;
    for (Eigen::Index k = 1; k <= t; ++k) prediction += phi_(k - 1) * history(t - k);
    return prediction;
}

void DurbinLevinson::advance() {
    const Eigen::Index t = order_;
    if (t + 1 >= acf_.size()) throw std::out_of_range("Durbin-Levinson ran past the supplied lags");

    double num = acf_(t + 1);
    for (Eigen::Index k = 1; k <= t; ++k) num -= phi_(k - 1) * acf_(t + 1 - k);
    const double reflection = num / variance_;

    scratch_.head(t) = phi_.head(t);
    for (Eigen::Index k = 1; k <= t; ++k) phi_(k - 1) = scratch_(k - 1) - reflection * scratch_(t - k);
    phi_(t) = reflection;
    variance_ *= (1.0 - reflection) * (1.0 + reflection);
    ++order_;

    if (!(variance_ > variance_floor * acf_(0))) {
        throw NumericalBreakdown("innovation variance " + std::to_string(variance_) +
                                 " at order " + std::to_string(order_) + " is below the floor");
    }
}

GaussianTerms exact_terms(const Eigen::VectorXd& x, double H) {
    const Eigen::Index n = x.size();
    if (n == 0) throw std::invalid_argument("empty series");
    if (!x.allFinite()) throw std::invalid_argument("series contains non-finite values");

    DurbinLevinson dl(fgn_acf(H, n > 1 ? n - 1 : 1));
    GaussianTerms terms;
    terms.n = n;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double innovation = x(t) - dl.predict(x.head(t));
        const double v = dl.innovation_variance();
        terms.log_det += std::log(v);
        terms.quad += innovation * innovation / v;
        if (t + 1 < n) dl.advance();
    }
    return terms;
}

double loglik_exact(const Eigen::VectorXd& x, const HurstParams& params) {
    params.validate();
    return exact_terms(x, params.H).loglik(params.sigma);
}

Eigen::MatrixXd trench_inverse(const Eigen::VectorXd& acf, Eigen::Index n, double sigma) {
    if (n < 1 || acf.size() < n) throw std::invalid_argument("trench_inverse needs n lags");
    const double c0 = acf(0);
    const Eigen::VectorXd r = acf.head(n) / c0;

    Eigen::MatrixXd B(n, n);
    if (n == 1) {
        B(0, 0) = 1.0;
    } else {
        // Yule-Walker coefficients of order n-1 give y = -phi in T_{n-1} y = -r.
        DurbinLevinson dl(r);
        for (Eigen::Index t = 0; t < n - 1; ++t) dl.advance();
        const Eigen::VectorXd y = -dl.coefficients();
        const double gamma = 1.0 / dl.innovation_variance();
        // v(0..n-2) = gamma * reverse(y)
        const Eigen::VectorXd v = gamma * y.reverse();

        B(0, 0) = gamma;
        for (Eigen::Index j = 1; j < n; ++j) B(0, j) = v(n - 1 - j);

        // One-based recurrence from the classical algorithm, shifted to zero base.
        for (Eigen::Index i = 2; i <= (n - 1) / 2 + 1; ++i) {
            for (Eigen::Index j = i; j <= n - i + 1; ++j) {
                const double update = (v(n - j) * v(n - i) - v(i - 2) * v(j - 2)) / gamma;
                B(i - 1, j - 1) = B(i - 2, j - 2) + update;
            }
        }
        // Complete from the computed wedge by symmetry and persymmetry.
        for (Eigen::Index i = 0; i <= (n - 1) / 2; ++i) {
            for (Eigen::Index j = i; j < n - i; ++j) {
                const double b = B(i, j);
                B(j, i) = b;
                B(n - 1 - j, n - 1 - i) = b;
                B(n - 1 - i, n - 1 - j) = b;
            }
        }
    }
    return B / (c0 * sigma * sigma);
}

Eigen::VectorXd simulate_exact(const HurstParams& params, Eigen::Index n, std::uint64_t seed) {
    params.validate();
    if (n < 1) throw std::invalid_argument("simulation length must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    DurbinLevinson dl(fgn_acf(params.H, n > 1 ? n - 1 : 1));
    Eigen::VectorXd x(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        x(t) = dl.predict(x.head(t)) + std::sqrt(dl.innovation_variance()) * normal(rng);
        if (t + 1 < n) dl.advance();
    }
    return params.sigma * x;
}

ConditionalMoments conditional_exact(const ObservationModel& obs, const HurstParams& params) {
    params.validate();
    const Eigen::Index total = obs.length();
    const Eigen::VectorXd acf = fgn_acf(params.H, total > 1 ? total - 1 : 1);
    return conditional_dense(toeplitz(acf, total, params.sigma * params.sigma), obs);
}

} // namespace fgn
