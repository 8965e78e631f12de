#include "fgn/exact.hpp"

#include "fgn/errors.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace fgn {

Eigen::MatrixXd toeplitz(const Eigen::VectorXd& acf, Eigen::Index n, double scale) {
    if (acf.size() < n) throw std::invalid_argument("toeplitz needs n lags");
    Eigen::MatrixXd T(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) T(i, j) = scale * acf(i > j ? i - j : j - i);
    return T;
}

// Covariance form: mean = S_ao (S_oo + D^{-1})^{-1} y_o, which also covers
// exactly observed points (D^{-1} = 0).
ConditionalMoments conditional_dense(const Eigen::MatrixXd& cov, const ObservationModel& obs) {
    obs.validate();
    const Eigen::Index total = obs.length();
    if (cov.rows() != total || cov.cols() != total) {
        throw std::invalid_argument("covariance does not match observation model length");
    }

    std::vector<Eigen::Index> observed;
    for (Eigen::Index i = 0; i < obs.size(); ++i)
        if (!obs.missing(i)) observed.push_back(i);
    if (observed.empty()) throw std::invalid_argument("no observed points to condition on");

    const auto k = static_cast<Eigen::Index>(observed.size());
    Eigen::MatrixXd S_oo(k, k);
    Eigen::MatrixXd S_ao(total, k);
    Eigen::VectorXd y_o(k);
    for (Eigen::Index b = 0; b < k; ++b) {
        const Eigen::Index j = observed[b];
        y_o(b) = obs.y(j);
        S_ao.col(b) = cov.col(j);
        for (Eigen::Index a = 0; a < k; ++a) S_oo(a, b) = cov(observed[a], j);
        if (!obs.exact_at(j)) S_oo(b, b) += 1.0 / obs.precision(j);
    }

    const Eigen::LLT<Eigen::MatrixXd> llt(S_oo);
    if (llt.info() != Eigen::Success) throw NumericalBreakdown("observed covariance is not SPD");

    ConditionalMoments out;
    out.mean = S_ao * llt.solve(y_o);
    const Eigen::MatrixXd W = llt.matrixL().solve(S_ao.transpose());
    out.sd.resize(total);
    for (Eigen::Index i = 0; i < total; ++i) {
        const double var = cov(i, i) - W.col(i).squaredNorm();
        out.sd(i) = std::sqrt(std::max(var, 0.0));
    }
    return out;
}

} // namespace fgn
