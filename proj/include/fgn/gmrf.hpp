#ifndef FGN_GMRF_HPP
#define FGN_GMRF_HPP

#include "fgn/band.hpp"
#include "fgn/mixture.hpp"
#include "fgn/observation.hpp"

#include <Eigen/Core>

#include <cmath>
#include <vector>

namespace fgn {

using BandMatrix = SymmetricBandMatrix<double>;

/// Precision of the noise added to the component sum; exp(15).
inline const double default_kappa = std::exp(15.0);

/// Tridiagonal precision of a unit-variance AR(1) process of length n.
BandMatrix ar1_precision(double phi, Eigen::Index n);

/// log|R(phi)| = -(n-1) log(1 - phi^2).
double ar1_log_determinant(double phi, Eigen::Index n);

/// Joint precision of (x~_t, z^{(1)}_t, ..., z^{(m)}_t), t = 1..n, interleaved by
/// time so the bandwidth is m + 1, where x~ = sigma (sum_j sqrt(w_j) z^{(j)} + eps)
/// and eps has precision kappa.
struct BandedPrecision {
    BandMatrix matrix;
    Ar1Mixture mixture;
    double sigma = 1.0;
    double kappa = 0.0;
    Eigen::Index n = 0;

    Eigen::Index block() const { return mixture.size() + 1; }
    Eigen::Index sum_index(Eigen::Index t) const { return t * block(); }
    /// Zero-based component j.
    Eigen::Index component_index(Eigen::Index t, Eigen::Index j) const { return t * block() + 1 + j; }

    /// Closed form sum_j log|R(phi_j)| + n log(kappa / sigma^2).
    double log_determinant() const;
};

BandedPrecision assemble_precision(const Ar1Mixture& mix, double sigma, Eigen::Index n,
                                   double kappa = default_kappa);

/// Gaussian conditional of the augmented vector given observations of x~.
/// Exactly observed x~ entries are eliminated from the system; noisy ones add
/// their precision to the diagonal; missing ones contribute nothing.
struct GmrfConditional {
    BandedCholesky<double> factor;    // of the precision restricted to free coordinates
    std::vector<Eigen::Index> free;   // free coordinate -> augmented index
    Eigen::VectorXd mean;             // full augmented vector
    Eigen::VectorXd sd;               // full augmented vector, 0 where observed exactly

    Eigen::Index bandwidth() const { return factor.bandwidth(); }
};

GmrfConditional condition(const BandedPrecision& Q, const ObservationModel& obs, bool marginals = true);

/// Conditional mean for new data sharing the precision pattern used to build
/// `conditional` (same missing/noisy/exact layout and precisions).
Eigen::VectorXd conditional_mean(const GmrfConditional& conditional, const BandedPrecision& Q,
                                 const ObservationModel& obs);

} // namespace fgn

#endif
