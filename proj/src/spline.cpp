#include "fgn/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace fgn {

NaturalCubicSpline::NaturalCubicSpline(Eigen::VectorXd x, Eigen::VectorXd y)
    : x_(std::move(x)), y_(std::move(y)) {
    const Eigen::Index n = x_.size();
    if (n < 2 || y_.size() != n) throw std::invalid_argument("spline needs at least two knots");
    for (Eigen::Index i = 1; i < n; ++i) {
        if (!(x_(i) > x_(i - 1))) throw std::invalid_argument("spline knots must be strictly increasing");
    }

    // Tridiagonal system for the interior second derivatives (Thomas algorithm).
    second_ = Eigen::VectorXd::Zero(n);
    if (n == 2) return;
    const Eigen::Index m = n - 2;
    Eigen::VectorXd diag(m), upper(m), rhs(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index i = k + 1;
        const double h0 = x_(i) - x_(i - 1);
        const double h1 = x_(i + 1) - x_(i);
        diag(k) = 2.0 * (h0 + h1);
        upper(k) = h1;
        rhs(k) = 6.0 * ((y_(i + 1) - y_(i)) / h1 - (y_(i) - y_(i - 1)) / h0);
    }
    for (Eigen::Index k = 1; k < m; ++k) {
        const double factor = upper(k - 1) / diag(k - 1);  // symmetric: sub-diagonal == super-diagonal
        diag(k) -= factor * upper(k - 1);
        rhs(k) -= factor * rhs(k - 1);
    }
    Eigen::VectorXd sol(m);
    sol(m - 1) = rhs(m - 1) / diag(m - 1);
    for (Eigen::Index k = m - 2; k >= 0; --k) sol(k) = (rhs(k) - upper(k) * sol(k + 1)) / diag(k);
    second_.segment(1, m) = sol;
}

double NaturalCubicSpline::operator()(double t) const {
    const Eigen::Index n = x_.size();
    const double* begin = x_.data();
    const double* it = std::upper_bound(begin + 1, begin + n - 1, t);
    const Eigen::Index i = (it - begin) - 1;  // interval [x_i, x_{i+1}]
    const double h = x_(i + 1) - x_(i);
    const double a = (x_(i + 1) - t) / h;
    const double b = (t - x_(i)) / h;
    return a * y_(i) + b * y_(i + 1) +
           ((a * a * a - a) * second_(i) + (b * b * b - b) * second_(i + 1)) * h * h / 6.0;
}

} // namespace fgn
