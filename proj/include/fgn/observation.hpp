#ifndef FGN_OBSERVATION_HPP
#define FGN_OBSERVATION_HPP

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fgn {

/// Diagonal-precision observation model y = x + eps for the first size() time
/// points of a latent series, followed by horizon() unobserved points.
///
/// precision(i) == 0 marks a missing value (y(i) is ignored), a finite
/// positive value is the noise precision, and +infinity means x(i) is
/// observed exactly.
struct ObservationModel {
    Eigen::VectorXd y;
    Eigen::VectorXd precision;
    Eigen::Index horizon = 0;

    static ObservationModel exact(const Eigen::VectorXd& x, Eigen::Index horizon = 0) {
        return {x, Eigen::VectorXd::Constant(x.size(), std::numeric_limits<double>::infinity()),
                horizon};
    }

    static ObservationModel noisy(const Eigen::VectorXd& y, const Eigen::VectorXd& d,
                                  Eigen::Index horizon = 0) {
        ObservationModel obs{y, d, horizon};
        obs.validate();
        return obs;
    }

    Eigen::Index size() const { return y.size(); }
    Eigen::Index length() const { return y.size() + horizon; }

    bool missing(Eigen::Index i) const { return precision(i) == 0.0; }
    bool exact_at(Eigen::Index i) const { return std::isinf(precision(i)); }

    Eigen::Index observed_count() const {
        Eigen::Index count = 0;
        for (Eigen::Index i = 0; i < size(); ++i) count += missing(i) ? 0 : 1;
        return count;
    }

    void validate() const {
        if (y.size() != precision.size()) {
            throw std::invalid_argument("observation and precision vectors differ in length");
        }
        if (horizon < 0) throw std::invalid_argument("negative horizon");
        for (Eigen::Index i = 0; i < size(); ++i) {
            if (!(precision(i) >= 0.0)) {
                throw std::invalid_argument("noise precision must be nonnegative");
            }
            if (!missing(i) && !std::isfinite(y(i))) {
                throw std::invalid_argument("non-finite value at an observed point");
            }
        }
    }
};

} // namespace fgn

#endif
