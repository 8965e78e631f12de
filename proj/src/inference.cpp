#include "fgn/inference.hpp"

#include "fgn/errors.hpp"
#include "fgn/hurst.hpp"

#include <Eigen/Cholesky>
#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace fgn {

std::string to_string(Model model) { return model == Model::Exact ? "exact" : "approx"; }

Model parse_model(const std::string& name) {
    if (name == "exact") return Model::Exact;
    if (name == "approx" || name == "approximate") return Model::Approximate;
    throw std::invalid_argument("unknown model '" + name + "' (expected exact or approx)");
}

namespace {

struct Optimum {
    Eigen::VectorXd z;  // components, n x m column-major: z(j * n + t)
    double quad = 0.0;
    double log_det_free = 0.0;
};

// Minimizes the augmented quadratic form over the components for fixed x~ and
// returns the minimum, split as kappa/sigma^2 |x - sigma a'z|^2 + sum_j z_j' R_j z_j
// (both terms are computed in residual form to avoid cancellation).
//
// The component precision R + kappa a a' (per time point) is assembled and
// factored in long double: its pivots are O(1) numbers obtained by cancelling
// O(kappa) ones, which in double costs about kappa * eps per pivot.
Optimum eliminate_components(const Eigen::VectorXd& x, const Ar1Mixture& mix, double sigma, double kappa) {
    using Long = long double;
    const Eigen::Index n = x.size(), m = mix.size();
    const Long k = kappa;
    const Eigen::Matrix<Long, Eigen::Dynamic, 1> root_w = mix.weights.cast<Long>().cwiseSqrt();

    SymmetricBandMatrix<Long> Qzz(n * m, m);
    Eigen::Matrix<Long, Eigen::Dynamic, 1> rhs(n * m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Long phi = mix.phi(j);
        const Long scale = Long(1) / ((Long(1) - phi) * (Long(1) + phi));
        for (Eigen::Index t = 0; t < n; ++t) {
            const Eigen::Index r = t * m + j;
            const Long diag = n == 1 ? Long(1) : (t == 0 || t == n - 1 ? Long(1) : Long(1) + phi * phi) * scale;
            Qzz.lower(r, r) = diag + root_w(j) * root_w(j) * k;
            for (Eigen::Index i = 0; i < j; ++i) Qzz.lower(r, t * m + i) = root_w(i) * root_w(j) * k;
            if (t + 1 < n) Qzz.lower(r + m, r) = -phi * scale;
            rhs(r) = root_w(j) * k / Long(sigma) * Long(x(t));
        }
    }
    const BandedCholesky<Long> chol = cholesky_banded(Qzz);
    const Eigen::Matrix<Long, Eigen::Dynamic, 1> z = solve(chol, std::move(rhs));

    Optimum out;
    out.z.resize(n * m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index t = 0; t < n; ++t) out.z(j * n + t) = static_cast<double>(z(t * m + j));

    Long residual = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        Long s = 0;
        for (Eigen::Index j = 0; j < m; ++j) s += root_w(j) * z(t * m + j);
        const Long r = Long(x(t)) - Long(sigma) * s;
        residual += r * r;
    }
    Long prior = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const Long phi = mix.phi(j);
        const Long innovation_var = (Long(1) - phi) * (Long(1) + phi);
        prior += z(j) * z(j);
        for (Eigen::Index t = 1; t < n; ++t) {
            const Long e = z(t * m + j) - phi * z((t - 1) * m + j);
            prior += e * e / innovation_var;
        }
    }
    out.quad = static_cast<double>(k / (Long(sigma) * Long(sigma)) * residual + prior);
    out.log_det_free = static_cast<double>(log_determinant(chol));
    return out;
}

void check_series(const Eigen::VectorXd& x) {
    if (x.size() == 0) throw std::invalid_argument("empty series");
    if (!x.allFinite()) throw std::invalid_argument("series contains non-finite values");
}

} // namespace

GaussianTerms approx_terms(const Eigen::VectorXd& x, const Ar1Mixture& mix, double kappa) {
    check_series(x);
    mix.validate();
    if (!(kappa > 0.0)) throw std::domain_error("kappa must be positive");
    const BandedPrecision Q{BandMatrix(), mix, 1.0, kappa, x.size()};
    const Optimum opt = eliminate_components(x, mix, 1.0, kappa);
    // |C| = |Q_zz| / |Q| for the marginal covariance C of x~.
    return {opt.log_det_free - Q.log_determinant(), opt.quad, x.size()};
}

double loglik_approx(const Eigen::VectorXd& x, const Ar1Mixture& mix, double sigma, double kappa) {
    check_series(x);
    mix.validate();
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
    if (!(kappa > 0.0)) throw std::domain_error("kappa must be positive");
    const BandedPrecision Q{BandMatrix(), mix, sigma, kappa, x.size()};
    const Optimum opt = eliminate_components(x, mix, sigma, kappa);
    const double n = static_cast<double>(x.size());
    return -0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * (Q.log_determinant() - opt.log_det_free) -
           0.5 * opt.quad;
}

double loglik_approx(const Eigen::VectorXd& x, double H, double sigma, const CoeffTable& table, double kappa) {
    return loglik_approx(x, table.lookup(H), sigma, kappa);
}

double profile_loglik(const Eigen::VectorXd& x, double h, Model model, const CoeffTable* table, double kappa) {
    const double H = hurst_from_h(h);
    if (model == Model::Exact) return exact_terms(x, H).profile_loglik();
    if (!table) throw std::invalid_argument("approximate model needs a coefficient table");
    return approx_terms(x, table->lookup(H), kappa).profile_loglik();
}

MleResult mle(const Eigen::VectorXd& x, Model model, const CoeffTable* table, const MleOptions& options) {
    check_series(x);
    if (x.size() < 16) throw std::invalid_argument("maximum likelihood needs at least 16 points");
    if (model == Model::Approximate && !table) {
        throw std::invalid_argument("approximate model needs a coefficient table");
    }

    MleResult result;
    result.model = model;
    result.components = model == Model::Approximate ? table->components() : 0;
    result.data_mean = options.center ? x.mean() : 0.0;
    const Eigen::VectorXd xc = x.array() - result.data_mean;
    if (xc.squaredNorm() <= std::numeric_limits<double>::min() * static_cast<double>(x.size())) {
        throw DegenerateData("series has zero variance; H is not identifiable");
    }

    double h_lo = h_from_hurst(options.hurst_lower);
    double h_hi = h_from_hurst(options.hurst_upper);
    if (model == Model::Approximate) {
        h_lo = std::max(h_lo, table->h_grid()(0));
        h_hi = std::min(h_hi, table->h_grid()(table->grid_size() - 1));
    }
    if (!(h_lo < h_hi)) throw std::invalid_argument("empty search interval for H");

    int evaluations = 0;
    auto objective = [&](double h) {
        ++evaluations;
        return -profile_loglik(xc, h, model, table, options.kappa);
    };

    const int scan = std::max(options.scan_points, 3);
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(scan, h_lo, h_hi);
    Eigen::Index best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < scan; ++i) {
        const double v = objective(grid(i));
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    const double a = grid(std::max<Eigen::Index>(best - 1, 0));
    const double b = grid(std::min<Eigen::Index>(best + 1, scan - 1));
    std::uintmax_t max_iter = 200;
    const auto [h_hat, value] = boost::math::tools::brent_find_minima(objective, a, b, 40, max_iter);
    double h_best = h_hat;
    double v_best = value;
    if (best_value < v_best) {
        h_best = grid(best);
        v_best = best_value;
    }

    const double edge_tol = 1e-6 * (h_hi - h_lo);
    result.boundary = (h_best - h_lo) < edge_tol || (h_hi - h_best) < edge_tol;
    result.H_hat = hurst_from_h(h_best);
    result.loglik = -v_best;

    const GaussianTerms terms = model == Model::Exact
                                    ? exact_terms(xc, result.H_hat)
                                    : approx_terms(xc, table->lookup(result.H_hat), options.kappa);
    result.sigma_hat = terms.profile_sigma();

    const double step = options.fisher_step;
    if (h_best - step >= h_lo && h_best + step <= h_hi) {
        const double curvature = (-objective(h_best + step) + 2.0 * v_best - objective(h_best - step)) / (step * step);
        result.sd_H = curvature < 0.0 ? hurst_jacobian(h_best) / std::sqrt(-curvature)
                                      : std::numeric_limits<double>::quiet_NaN();
    } else {
        result.sd_H = std::numeric_limits<double>::quiet_NaN();
    }
    result.iterations = evaluations;
    return result;
}

ExactPredictor::ExactPredictor(const HurstParams& params, Eigen::Index n, Eigen::Index p) {
    params.validate();
    if (n < 1 || p < 1) throw std::invalid_argument("prediction needs n >= 1 and p >= 1");
    const Eigen::VectorXd acf = fgn_acf(params.H, n + p);
    const Eigen::MatrixXd cov = toeplitz(acf, n + p, params.sigma * params.sigma);
    const Eigen::LLT<Eigen::MatrixXd> llt(cov.topLeftCorner(n, n));
    if (llt.info() != Eigen::Success) throw NumericalBreakdown("observed covariance is not SPD");
    const Eigen::MatrixXd cross = cov.bottomLeftCorner(p, n);
    gain_ = llt.solve(cross.transpose()).transpose();
    const Eigen::MatrixXd W = llt.matrixL().solve(cross.transpose());
    sd_.resize(p);
    for (Eigen::Index i = 0; i < p; ++i)
        sd_(i) = std::sqrt(std::max(cov(n + i, n + i) - W.col(i).squaredNorm(), 0.0));
}

Eigen::VectorXd ExactPredictor::mean(const Eigen::VectorXd& x) const {
    if (x.size() != gain_.cols()) throw std::invalid_argument("series length differs from predictor");
    return gain_ * x;
}

ApproxPredictor::ApproxPredictor(const Ar1Mixture& mix, double sigma, Eigen::Index n, Eigen::Index p,
                                 double kappa)
    : Q_(assemble_precision(mix, sigma, n + p, kappa)),
      conditional_(condition(Q_, ObservationModel::exact(Eigen::VectorXd::Zero(n), p))),
      n_(n),
      p_(p) {
    if (n < 1 || p < 1) throw std::invalid_argument("prediction needs n >= 1 and p >= 1");
    sd_.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) sd_(i) = conditional_.sd(Q_.sum_index(n + i));
}

Eigen::VectorXd ApproxPredictor::mean(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("series length differs from predictor");
    const Eigen::VectorXd full = conditional_mean(conditional_, Q_, ObservationModel::exact(x, p_));
    Eigen::VectorXd out(p_);
    for (Eigen::Index i = 0; i < p_; ++i) out(i) = full(Q_.sum_index(n_ + i));
    return out;
}

Prediction predict(const Eigen::VectorXd& x, double H, double sigma, Eigen::Index p, Model model,
                   const CoeffTable* table, double kappa) {
    check_series(x);
    if (model == Model::Exact) {
        const ExactPredictor predictor({H, sigma}, x.size(), p);
        return {predictor.mean(x), predictor.sd()};
    }
    if (!table) throw std::invalid_argument("approximate model needs a coefficient table");
    const ApproxPredictor predictor(table->lookup(H), sigma, x.size(), p, kappa);
    return {predictor.mean(x), predictor.sd()};
}

double kld(double H, Eigen::Index n, const Ar1Mixture& mix, double kappa, bool reverse) {
    if (n < 1) throw std::invalid_argument("KL divergence needs n >= 1");
    const Eigen::MatrixXd exact = toeplitz(fgn_acf(H, n), n);
    Eigen::MatrixXd approx = toeplitz(mixture_acf(mix, n), n);
    approx.diagonal().array() += 1.0 / kappa;

    const Eigen::MatrixXd& P = reverse ? approx : exact;  // KL(P || R)
    const Eigen::MatrixXd& R = reverse ? exact : approx;
    const Eigen::LLT<Eigen::MatrixXd> llt_p(P);
    const Eigen::LLT<Eigen::MatrixXd> llt_r(R);
    if (llt_p.info() != Eigen::Success || llt_r.info() != Eigen::Success) {
        throw NumericalBreakdown("covariance is not SPD");
    }
    const double logdet_p = 2.0 * llt_p.matrixLLT().diagonal().array().log().sum();
    const double logdet_r = 2.0 * llt_r.matrixLLT().diagonal().array().log().sum();
    // tr(R^{-1} P) = |L_r^{-1} L_p|_F^2
    const Eigen::MatrixXd M = llt_r.matrixL().solve(Eigen::MatrixXd(llt_p.matrixL()));
    const double trace = M.squaredNorm();
    return std::max(0.0, 0.5 * (trace - static_cast<double>(n) + logdet_r - logdet_p));
}

double kld(double H, Eigen::Index n, const CoeffTable& table, double kappa, bool reverse) {
    return kld(H, n, table.lookup(H), kappa, reverse);
}

double Decomposition::reconstruction_residual() const {
    const Eigen::VectorXd rebuilt = component_means.rowwise().sum() + noise_mean;
    return (rebuilt - sum_mean).cwiseAbs().maxCoeff();
}

Decomposition decompose(const ObservationModel& obs, const MleResult& estimate, const CoeffTable& table,
                        double kappa) {
    obs.validate();
    ObservationModel centered = obs;
    for (Eigen::Index t = 0; t < obs.size(); ++t)
        if (!obs.missing(t)) centered.y(t) -= estimate.data_mean;

    Decomposition d;
    d.mixture = table.lookup(estimate.H_hat);
    d.H_hat = estimate.H_hat;
    d.sigma_hat = estimate.sigma_hat;
    d.data_mean = estimate.data_mean;

    const Eigen::Index n = obs.length();
    const Eigen::Index m = d.mixture.size();
    const BandedPrecision Q = assemble_precision(d.mixture, estimate.sigma_hat, n, kappa);
    const GmrfConditional c = condition(Q, centered);

    d.component_means.resize(n, m);
    d.component_sds.resize(n, m);
    d.sum_mean.resize(n);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double scale = estimate.sigma_hat * std::sqrt(d.mixture.weights(j));
        for (Eigen::Index t = 0; t < n; ++t) {
            d.component_means(t, j) = scale * c.mean(Q.component_index(t, j));
            d.component_sds(t, j) = scale * c.sd(Q.component_index(t, j));
        }
    }
    for (Eigen::Index t = 0; t < n; ++t) d.sum_mean(t) = c.mean(Q.sum_index(t));
    // E[sigma eps | y] from the component rows of the precision system:
    // (R_j mu_j)_t = kappa sqrt(w_j) (mu_x,t / sigma - sum_i sqrt(w_i) mu_i,t), so
    // summing against sqrt(w_j) gives sigma eps_t = sigma / kappa sum_j sqrt(w_j) (R_j mu_j)_t.
    d.noise_mean = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < m; ++j) {
        const BandMatrix R = ar1_precision(d.mixture.phi(j), n);
        Eigen::VectorXd mu(n);
        for (Eigen::Index t = 0; t < n; ++t) mu(t) = c.mean(Q.component_index(t, j));
        d.noise_mean += std::sqrt(d.mixture.weights(j)) * (R * mu);
    }
    d.noise_mean *= estimate.sigma_hat / kappa;
    return d;
}

} // namespace fgn
