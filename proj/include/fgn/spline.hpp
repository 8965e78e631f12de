#ifndef FGN_SPLINE_HPP
#define FGN_SPLINE_HPP

#include <Eigen/Core>

namespace fgn {

/// Natural cubic interpolating spline through (x_i, y_i), x strictly increasing.
class NaturalCubicSpline {
public:
    NaturalCubicSpline() = default;
    NaturalCubicSpline(Eigen::VectorXd x, Eigen::VectorXd y);

    double operator()(double t) const;
    double lower() const { return x_(0); }
    double upper() const { return x_(x_.size() - 1); }

private:
    Eigen::VectorXd x_;
    Eigen::VectorXd y_;
    Eigen::VectorXd second_;  // second derivatives at the knots
};

} // namespace fgn

#endif
