#include "fgn/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace fgn {

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& start, double step, double tolerance,
                          int max_evaluations) {
    const Eigen::Index d = start.size();
    std::vector<Eigen::VectorXd> pts(d + 1, start);
    std::vector<double> vals(d + 1);
    int evals = 0;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++evals;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };
    for (Eigen::Index i = 0; i < d; ++i) pts[i + 1](i) += step;
    for (Eigen::Index i = 0; i <= d; ++i) vals[i] = eval(pts[i]);

    std::vector<Eigen::Index> order(d + 1);
    bool converged = false;
    while (evals < max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
        const auto best = order.front();
        const auto worst = order.back();
        const auto second = order[d - 1 >= 0 ? d - 1 : 0];
        if (std::abs(vals[worst] - vals[best]) <= tolerance * (std::abs(vals[best]) + tolerance)) {
            converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
        for (Eigen::Index i = 0; i <= d; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= static_cast<double>(d);

        const Eigen::VectorXd reflected = centroid + (centroid - pts[worst]);
        const double fr = eval(reflected);
        if (fr < vals[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = eval(expanded);
            if (fe < fr) {
                pts[worst] = expanded;
                vals[worst] = fe;
            } else {
                pts[worst] = reflected;
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = reflected;
            vals[worst] = fr;
            continue;
        }
        const bool outside = fr < vals[worst];
        const Eigen::VectorXd contracted =
            outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                    : Eigen::VectorXd(centroid + 0.5 * (pts[worst] - centroid));
        const double fc = eval(contracted);
        if (fc < (outside ? fr : vals[worst])) {
            pts[worst] = contracted;
            vals[worst] = fc;
            continue;
        }
        for (Eigen::Index i = 0; i <= d; ++i) {
            if (i == best) continue;
            pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
            vals[i] = eval(pts[i]);
        }
    }

    const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
    return {pts[best], vals[best], evals, converged};
}

} // namespace fgn
