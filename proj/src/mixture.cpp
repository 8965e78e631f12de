#include "fgn/mixture.hpp"

#include "fgn/exact.hpp"
#include "fgn/hurst.hpp"
#include "fgn/nelder_mead.hpp"

#include <unsupported/Eigen/NonLinearOptimization>

#include <cmath>
#include <random>

namespace fgn {

void Ar1Mixture::validate() const {
    if (weights.size() == 0 || weights.size() != phi.size()) {
        throw std::invalid_argument("mixture needs matching, nonempty weights and coefficients");
    }
    if ((weights.array() <= 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("mixture weights must be positive and sum to one");
    }
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        if (!(phi(j) > 0.0 && phi(j) < 1.0)) throw std::domain_error("AR(1) coefficient outside (0,1)");
        if (j > 0 && !(phi(j) < phi(j - 1))) {
            throw std::invalid_argument("AR(1) coefficients must be strictly decreasing");
        }
    }
}

Eigen::VectorXd FitParams::packed() const {
    const Eigen::Index m = size();
    Eigen::VectorXd theta(2 * m - 1);
    theta.head(m - 1) = v.tail(m - 1);
    theta.tail(m) = u;
    return theta;
}

FitParams FitParams::unpack(const Eigen::VectorXd& theta, Eigen::Index m) {
    if (theta.size() != 2 * m - 1) throw std::invalid_argument("packed parameter length mismatch");
    FitParams p;
    p.v = Eigen::VectorXd::Zero(m);
    p.v.tail(m - 1) = theta.head(m - 1);
    p.u = theta.tail(m);
    return p;
}

Ar1Mixture FitParams::to_mixture(double H) const {
    Ar1Mixture mix;
    mix.H = H;
    const double vmax = v.maxCoeff();
    mix.weights = (v.array() - vmax).exp();
    mix.weights /= mix.weights.sum();
    mix.phi.resize(size());
    double cumulative = 0.0;
    for (Eigen::Index j = 0; j < size(); ++j) {
        cumulative += std::exp(-u(j));
        mix.phi(j) = 1.0 / (1.0 + cumulative);
    }
    return mix;
}

FitParams FitParams::from_mixture(const Ar1Mixture& mix) {
    mix.validate();
    const Eigen::Index m = mix.size();
    FitParams p;
    p.v = (mix.weights.array() / mix.weights(0)).log();
    p.u.resize(m);
    double previous = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double cumulative = (1.0 - mix.phi(j)) / mix.phi(j);
        p.u(j) = -std::log(cumulative - previous);
        previous = cumulative;
    }
    return p;
}

Eigen::VectorXd mixture_acf(const Ar1Mixture& mix, Eigen::Index max_lag) {
    Eigen::VectorXd acf = Eigen::VectorXd::Zero(max_lag + 1);
    for (Eigen::Index j = 0; j < mix.size(); ++j) {
        double power = 1.0;
        for (Eigen::Index k = 0; k <= max_lag; ++k) {
            acf(k) += mix.weights(j) * power;
            power *= mix.phi(j);
        }
    }
    return acf;
}

namespace {

/// Residuals r_k = (gamma_mix(k) - gamma_fgn(k)) / sqrt(k), k = 1..kmax, and
/// their Jacobian in the packed coordinates.
class AcfResiduals {
public:
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    AcfResiduals(double H, Eigen::Index m, Eigen::Index kmax)
        : m_(m), kmax_(kmax), target_(fgn_acf(H, kmax).tail(kmax)),
          inv_sqrt_k_(Eigen::VectorXd::LinSpaced(kmax, 1.0, static_cast<double>(kmax)).cwiseSqrt().cwiseInverse()) {
        if (kmax < 1) throw std::invalid_argument("kmax must be at least 1");
    }

    int inputs() const { return static_cast<int>(2 * m_ - 1); }
    int values() const { return static_cast<int>(kmax_); }

    int operator()(const Eigen::VectorXd& theta, Eigen::VectorXd& r) const {
        const Ar1Mixture mix = FitParams::unpack(theta, m_).to_mixture(0.5);
        r = (mixture_acf(mix, kmax_).tail(kmax_) - target_).cwiseProduct(inv_sqrt_k_);
        return 0;
    }

    int df(const Eigen::VectorXd& theta, Eigen::MatrixXd& jac) const {
        const FitParams p = FitParams::unpack(theta, m_);
        const Ar1Mixture mix = p.to_mixture(0.5);
        const Eigen::VectorXd acf = mixture_acf(mix, kmax_).tail(kmax_);

        // powers(k-1, j) = phi_j^k
        Eigen::MatrixXd powers(kmax_, m_);
        for (Eigen::Index j = 0; j < m_; ++j) {
            double power = mix.phi(j);
            for (Eigen::Index k = 0; k < kmax_; ++k) {
                powers(k, j) = power;
                power *= mix.phi(j);
            }
        }
        jac.resize(kmax_, 2 * m_ - 1);
        // d r_k / d v_l = w_l (phi_l^k - gamma_mix(k)) / sqrt(k), l >= 2
        for (Eigen::Index l = 1; l < m_; ++l) {
            jac.col(l - 1) = mix.weights(l) * (powers.col(l) - acf).cwiseProduct(inv_sqrt_k_);
        }
        // d phi_j / d u_i = phi_j^2 exp(-u_i) for i <= j, so
        // d r_k / d u_i = exp(-u_i) sum_{j>=i} w_j k phi_j^{k+1} / sqrt(k)
        Eigen::VectorXd tail_sum = Eigen::VectorXd::Zero(kmax_);
        const Eigen::VectorXd k_over_sqrt_k = inv_sqrt_k_.cwiseInverse();
        for (Eigen::Index i = m_ - 1; i >= 0; --i) {
            tail_sum += mix.weights(i) * mix.phi(i) * powers.col(i);
            jac.col(m_ - 1 + i) = std::exp(-p.u(i)) * tail_sum.cwiseProduct(k_over_sqrt_k);
        }
        return 0;
    }

private:
    Eigen::Index m_;
    Eigen::Index kmax_;
    Eigen::VectorXd target_;
    Eigen::VectorXd inv_sqrt_k_;
};

} // namespace

double fit_objective(const FitParams& params, double H, Eigen::Index kmax) {
    AcfResiduals residuals(H, params.size(), kmax);
    Eigen::VectorXd r;
    residuals(params.packed(), r);
    return r.squaredNorm();
}

Eigen::VectorXd fit_gradient(const FitParams& params, double H, Eigen::Index kmax) {
    AcfResiduals residuals(H, params.size(), kmax);
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    const Eigen::VectorXd theta = params.packed();
    residuals(theta, r);
    residuals.df(theta, jac);
    return 2.0 * jac.transpose() * r;
}

FitParams default_start(Eigen::Index m) {
    if (m < 1) throw std::invalid_argument("need at least one component");
    Ar1Mixture mix;
    mix.weights = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    mix.phi.resize(m);
    // 1 - phi_j spaced logarithmically from 1e-3 to 0.7
    for (Eigen::Index j = 0; j < m; ++j) {
        const double t = m == 1 ? 1.0 : static_cast<double>(j) / static_cast<double>(m - 1);
        mix.phi(j) = 1.0 - std::pow(10.0, -3.0 + t * (3.0 + std::log10(0.7)));
    }
    if (m == 1) mix.phi(0) = 0.5;
    return FitParams::from_mixture(mix);
}

FitParams embed_start(const FitParams& smaller) {
    const Eigen::Index m = smaller.size();
    FitParams p;
    p.v.resize(m + 1);
    p.v.head(m) = smaller.v;
    p.v(m) = smaller.v.maxCoeff() - 25.0;
    p.u.resize(m + 1);
    p.u.head(m) = smaller.u;
    p.u(m) = 0.0;
    return p;
}

FitResult fit_from(double H, Eigen::Index m, const FitParams& start, const FitOptions& options) {
    AcfResiduals residuals(H, m, options.kmax);
    Eigen::VectorXd theta = start.packed();

    Eigen::LevenbergMarquardt<AcfResiduals> lm(residuals);
    lm.parameters.maxfev = options.max_evaluations;
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-16;
    lm.parameters.gtol = 0.0;
    const auto status = lm.minimize(theta);

    Eigen::VectorXd r;
    residuals(theta, r);
    double objective = r.squaredNorm();

    const bool failed = status == Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation ||
                        status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters ||
                        !theta.allFinite() || !std::isfinite(objective);
    if (failed) {
        auto f = [&](const Eigen::VectorXd& x) {
            Eigen::VectorXd rr;
            residuals(x, rr);
            return rr.squaredNorm();
        };
        const Eigen::VectorXd from = theta.allFinite() ? theta : start.packed();
        const SimplexResult simplex = nelder_mead(f, from, 0.25, 1e-14, 20000);
        if (!simplex.converged || !std::isfinite(simplex.value)) {
            throw FitFailure("ACF fit did not converge at H=" + std::to_string(H),
                             FitParams::unpack(simplex.x, m), simplex.value);
        }
        theta = simplex.x;
        objective = simplex.value;
    }

    FitResult result;
    result.params = FitParams::unpack(theta, m);
    result.objective = objective;
    result.mixture = result.params.to_mixture(H);
    return result;
}

FitResult fit_single(double H, Eigen::Index m, const FitOptions& options,
                     const std::optional<FitParams>& warm_start) {
    if (!(H > 0.5 && H < 1.0)) throw std::domain_error("fit requires 1/2 < H < 1");
    if (m < 1) throw std::invalid_argument("need at least one component");

    const FitParams base = warm_start.value_or(default_start(m));
    if (base.size() != m) throw std::invalid_argument("warm start has the wrong size");

    std::vector<FitParams> starts{base};
    starts.insert(starts.end(), options.extra_starts.begin(), options.extra_starts.end());
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, options.restart_scale);
    for (int r = 0; r < options.random_restarts; ++r) {
        Eigen::VectorXd theta = base.packed();
        for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) += normal(rng);
        starts.push_back(FitParams::unpack(theta, m));
    }

    std::optional<FitResult> best;
    std::optional<FitFailure> last_failure;
    for (const auto& start : starts) {
        try {
            FitResult result = fit_from(H, m, start, options);
            // Later starts must improve by more than round-off to replace the
            // continuation branch, which keeps the table smooth in H.
            if (!best || result.objective < best->objective - 1e-13) best = std::move(result);
        } catch (const FitFailure& failure) {
            last_failure = failure;
        }
    }
    if (!best) throw *last_failure;

    if (warm_start) {
        const double warm = fit_objective(*warm_start, H, options.kmax);
        if (warm < best->objective) {
            best->params = *warm_start;
            best->objective = warm;
            best->mixture = warm_start->to_mixture(H);
        }
    }
    return *best;
}

CoeffTable build_table(Eigen::Index m, const TableOptions& options) {
    if (options.grid_size < 11) throw std::invalid_argument("grid must have at least 11 points");
    if (!(options.hurst_lower > 0.5 && options.hurst_upper < 1.0 &&
          options.hurst_lower < options.hurst_upper)) {
        throw std::domain_error("table range must lie inside (1/2, 1)");
    }
    if (options.nested && options.nested->components() + 1 != m) {
        throw std::invalid_argument("nested table must have m-1 components");
    }

    const Eigen::Index G = options.grid_size;
    Eigen::VectorXd h(G);
    Eigen::MatrixXd params(G, 2 * m - 1);
    Eigen::VectorXd objectives(G);

    std::optional<FitParams> previous;
    for (Eigen::Index i = 0; i < G; ++i) {
        const double H = options.hurst_lower +
                         (options.hurst_upper - options.hurst_lower) * static_cast<double>(i) /
                             static_cast<double>(G - 1);
        FitOptions fit = options.fit;
        fit.seed = options.fit.seed + static_cast<std::uint64_t>(i);
        if (options.nested) {
            const Eigen::VectorXd inner = options.nested->interpolate(h_from_hurst(H));
            fit.extra_starts.push_back(embed_start(FitParams::unpack(inner, m - 1)));
        }
        FitResult result;
        try {
            result = fit_single(H, m, fit, previous);
        } catch (const FitFailure& failure) {
            throw FitFailure("table fit failed at grid point " + std::to_string(i) +
                                 " (H=" + std::to_string(H) + "): " + failure.what(),
                             failure.best(), failure.objective());
        }
        h(i) = h_from_hurst(H);
        params.row(i) = result.params.packed().transpose();
        objectives(i) = result.objective;
        previous = result.params;
    }
    return CoeffTable(m, options.fit.kmax, std::move(h), std::move(params), std::move(objectives));
}

CoeffTable::CoeffTable(Eigen::Index m, Eigen::Index kmax, Eigen::VectorXd h_grid,
                       Eigen::MatrixXd params, Eigen::VectorXd objectives)
    : m_(m), kmax_(kmax), h_(std::move(h_grid)), params_(std::move(params)),
      objectives_(std::move(objectives)) {
    if (m_ < 1 || params_.cols() != 2 * m_ - 1 || params_.rows() != h_.size() ||
        objectives_.size() != h_.size()) {
        throw std::invalid_argument("inconsistent coefficient table dimensions");
    }
    splines_.reserve(static_cast<std::size_t>(params_.cols()));
    for (Eigen::Index c = 0; c < params_.cols(); ++c) splines_.emplace_back(h_, params_.col(c));
}

double CoeffTable::hurst_lower() const { return hurst_from_h(h_(0)); }
double CoeffTable::hurst_upper() const { return hurst_from_h(h_(h_.size() - 1)); }

Eigen::VectorXd CoeffTable::interpolate(double h) const {
    Eigen::VectorXd theta(params_.cols());
    for (Eigen::Index c = 0; c < params_.cols(); ++c) theta(c) = splines_[static_cast<std::size_t>(c)](h);
    return theta;
}

Ar1Mixture CoeffTable::lookup(double H) const {
    if (splines_.empty()) throw std::logic_error("empty coefficient table");
    const double tol = 1e-12;
    if (!(H >= hurst_lower() - tol && H <= hurst_upper() + tol)) {
        throw std::domain_error("H=" + std::to_string(H) + " outside table range [" +
                                std::to_string(hurst_lower()) + ", " + std::to_string(hurst_upper()) + "]");
    }
    const double h = std::clamp(h_from_hurst(H), h_(0), h_(h_.size() - 1));
    return FitParams::unpack(interpolate(h), m_).to_mixture(H);
}

} // namespace fgn
