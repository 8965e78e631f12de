#include "fgn/gmrf.hpp"

#include <stdexcept>

namespace fgn {

BandMatrix ar1_precision(double phi, Eigen::Index n) {
    if (!(phi > 0.0 && phi < 1.0)) throw std::domain_error("AR(1) coefficient must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("AR(1) length must be positive");
    BandMatrix R(n, 1);
    if (n == 1) {
        R.lower(0, 0) = 1.0;
        return R;
    }
    const double scale = 1.0 / ((1.0 - phi) * (1.0 + phi));
    for (Eigen::Index t = 0; t < n; ++t) {
        R.lower(t, t) = (t == 0 || t == n - 1 ? 1.0 : 1.0 + phi * phi) * scale;
        if (t + 1 < n) R.lower(t + 1, t) = -phi * scale;
    }
    return R;
}

double ar1_log_determinant(double phi, Eigen::Index n) {
    return -static_cast<double>(n - 1) * std::log1p(-phi * phi);
}

double BandedPrecision::log_determinant() const {
    double logdet = static_cast<double>(n) * std::log(kappa / (sigma * sigma));
    for (Eigen::Index j = 0; j < mixture.size(); ++j) logdet += ar1_log_determinant(mixture.phi(j), n);
    return logdet;
}

BandedPrecision assemble_precision(const Ar1Mixture& mix, double sigma, Eigen::Index n, double kappa) {
    mix.validate();
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
    if (!(kappa > 0.0)) throw std::domain_error("kappa must be positive");
    if (n < 1) throw std::invalid_argument("series length must be positive");

    const Eigen::Index m = mix.size();
    BandedPrecision Q{BandMatrix((m + 1) * n, m + 1), mix, sigma, kappa, n};
    const Eigen::VectorXd root_w = mix.weights.cwiseSqrt();

    for (Eigen::Index t = 0; t < n; ++t) {
        const Eigen::Index x = Q.sum_index(t);
        Q.matrix.lower(x, x) = kappa / (sigma * sigma);
        for (Eigen::Index j = 0; j < m; ++j) {
            const Eigen::Index zj = Q.component_index(t, j);
            Q.matrix.lower(zj, x) = -root_w(j) * kappa / sigma;
            for (Eigen::Index i = 0; i < j; ++i) {
                Q.matrix.lower(zj, Q.component_index(t, i)) = root_w(i) * root_w(j) * kappa;
            }
        }
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        const BandMatrix R = ar1_precision(mix.phi(j), n);
        for (Eigen::Index t = 0; t < n; ++t) {
            const Eigen::Index zj = Q.component_index(t, j);
            Q.matrix.lower(zj, zj) = R(t, t) + mix.weights(j) * kappa;
            if (t + 1 < n) Q.matrix.lower(Q.component_index(t + 1, j), zj) = R(t + 1, t);
        }
    }
    return Q;
}

namespace {

void check_layout(const BandedPrecision& Q, const ObservationModel& obs) {
    obs.validate();
    if (obs.length() != Q.n) {
        throw std::invalid_argument("observation model covers " + std::to_string(obs.length()) +
                                    " time points but the precision has " + std::to_string(Q.n));
    }
}

Eigen::VectorXd restricted_rhs(const GmrfConditional& c, const BandedPrecision& Q, const ObservationModel& obs) {
    const Eigen::Index dim = Q.matrix.dim();
    const Eigen::Index b = Q.matrix.bandwidth();
    // Full-length right-hand side D y - Q_{., E} y_E; restricted afterwards.
    Eigen::VectorXd full = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index t = 0; t < obs.size(); ++t) {
        if (obs.missing(t)) continue;
        const Eigen::Index x = Q.sum_index(t);
        if (!obs.exact_at(t)) {
            full(x) += obs.precision(t) * obs.y(t);
            continue;
        }
        for (Eigen::Index i = std::max<Eigen::Index>(0, x - b); i <= std::min(dim - 1, x + b); ++i) {
            if (i != x) full(i) -= Q.matrix(i, x) * obs.y(t);
        }
    }
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(c.free.size()));
    for (std::size_t k = 0; k < c.free.size(); ++k) rhs(static_cast<Eigen::Index>(k)) = full(c.free[k]);
    return rhs;
}

Eigen::VectorXd expand(const GmrfConditional& c, const BandedPrecision& Q, const ObservationModel& obs,
                       const Eigen::VectorXd& restricted) {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(Q.matrix.dim());
    for (std::size_t k = 0; k < c.free.size(); ++k) full(c.free[k]) = restricted(static_cast<Eigen::Index>(k));
    for (Eigen::Index t = 0; t < obs.size(); ++t)
        if (obs.exact_at(t)) full(Q.sum_index(t)) = obs.y(t);
    return full;
}

} // namespace

GmrfConditional condition(const BandedPrecision& Q, const ObservationModel& obs, bool marginals) {
    check_layout(Q, obs);
    const Eigen::Index dim = Q.matrix.dim();
    const Eigen::Index b = Q.matrix.bandwidth();

    std::vector<bool> eliminated(static_cast<std::size_t>(dim), false);
    for (Eigen::Index t = 0; t < obs.size(); ++t)
        if (obs.exact_at(t)) eliminated[static_cast<std::size_t>(Q.sum_index(t))] = true;

    GmrfConditional c;
    std::vector<Eigen::Index> position(static_cast<std::size_t>(dim), -1);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if (eliminated[static_cast<std::size_t>(i)]) continue;
        position[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(c.free.size());
        c.free.push_back(i);
    }

    // Removing rows only shrinks index gaps, so the restricted bandwidth is the
    // largest new distance between kept coordinates that were within the band.
    Eigen::Index restricted_b = 0;
    for (Eigen::Index i : c.free) {
        for (Eigen::Index k = 1; k <= b && i + k < dim; ++k) {
            const Eigen::Index p = position[static_cast<std::size_t>(i + k)];
            if (p >= 0 && Q.matrix(i + k, i) != 0.0)
                restricted_b = std::max(restricted_b, p - position[static_cast<std::size_t>(i)]);
        }
    }

    BandMatrix A(static_cast<Eigen::Index>(c.free.size()), restricted_b);
    for (Eigen::Index i : c.free) {
        const Eigen::Index pi = position[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k <= b && i + k < dim; ++k) {
            const Eigen::Index pk = position[static_cast<std::size_t>(i + k)];
            if (pk < 0) continue;
            const double q = Q.matrix(i + k, i);
            if (q != 0.0) A.lower(pk, pi) = q;
        }
    }
    for (Eigen::Index t = 0; t < obs.size(); ++t) {
        if (!obs.missing(t) && !obs.exact_at(t)) {
            const Eigen::Index p = position[static_cast<std::size_t>(Q.sum_index(t))];
            A.lower(p, p) += obs.precision(t);
        }
    }

    c.factor = cholesky_banded(A);
    c.mean = expand(c, Q, obs, solve(c.factor, restricted_rhs(c, Q, obs)));
    if (marginals) {
        c.sd = Eigen::VectorXd::Zero(dim);
        const Eigen::VectorXd var = marginal_variances(c.factor);
        for (std::size_t k = 0; k < c.free.size(); ++k)
            c.sd(c.free[k]) = std::sqrt(var(static_cast<Eigen::Index>(k)));
    }
    return c;
}

Eigen::VectorXd conditional_mean(const GmrfConditional& conditional, const BandedPrecision& Q,
                                 const ObservationModel& obs) {
    check_layout(Q, obs);
    Eigen::Index exact = 0;
    for (Eigen::Index t = 0; t < obs.size(); ++t) exact += obs.exact_at(t) ? 1 : 0;
    if (static_cast<Eigen::Index>(conditional.free.size()) + exact != Q.matrix.dim()) {
        throw std::invalid_argument("observation pattern differs from the factorized one");
    }
    return expand(conditional, Q, obs, solve(conditional.factor, restricted_rhs(conditional, Q, obs)));
}

} // namespace fgn
