#ifndef FGN_NELDER_MEAD_HPP
#define FGN_NELDER_MEAD_HPP

#include <Eigen/Core>

#include <functional>

namespace fgn {

struct SimplexResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization (standard reflection/expansion/
/// contraction/shrink coefficients). Stops when the spread of function values
/// over the simplex falls below tolerance.
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& start, double step, double tolerance,
                          int max_evaluations);

} // namespace fgn

#endif
