#ifndef FGN_MIXTURE_HPP
#define FGN_MIXTURE_HPP

#include "fgn/spline.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgn {

/// Weighted sum of m unit-variance AR(1) processes, sqrt(w_j) z^{(j)}.
/// Weights sum to one and 1 > phi_1 > ... > phi_m > 0.
struct Ar1Mixture {
    double H = 0.5;
    Eigen::VectorXd weights;
    Eigen::VectorXd phi;

    Eigen::Index size() const { return weights.size(); }
    void validate() const;
};

/// Unconstrained coordinates of a mixture:
///   w_j = exp(v_j) / sum_i exp(v_i), v_1 = 0,
///   phi_j = 1 / (1 + sum_{i<=j} exp(-u_i)).
/// The free vector packs (v_2..v_m, u_1..u_m), 2m-1 reals.
struct FitParams {
    Eigen::VectorXd v;
    Eigen::VectorXd u;

    Eigen::Index size() const { return u.size(); }

    Eigen::VectorXd packed() const;
    static FitParams unpack(const Eigen::VectorXd& theta, Eigen::Index m);

    Ar1Mixture to_mixture(double H) const;
    static FitParams from_mixture(const Ar1Mixture& mix);
};

/// Autocorrelation sum_j w_j phi_j^k at lags 0..max_lag.
Eigen::VectorXd mixture_acf(const Ar1Mixture& mix, Eigen::Index max_lag);

/// sum_{k=1}^{kmax} (1/k) (gamma_mix(k) - gamma_fgn(k))^2.
double fit_objective(const FitParams& params, double H, Eigen::Index kmax);

/// Gradient of fit_objective with respect to the packed coordinates.
Eigen::VectorXd fit_gradient(const FitParams& params, double H, Eigen::Index kmax);

struct FitOptions {
    Eigen::Index kmax = 1000;
    int random_restarts = 5;
    double restart_scale = 0.5;
    std::uint64_t seed = 20170815;
    int max_evaluations = 4000;
    /// Extra deterministic starting points (e.g. an embedded smaller mixture).
    std::vector<FitParams> extra_starts;
};

struct FitResult {
    FitParams params;
    double objective = 0.0;
    Ar1Mixture mixture;
};

/// The optimizer failed from every start; carries the best point seen.
class FitFailure : public std::runtime_error {
public:
    FitFailure(const std::string& what, FitParams best, double objective)
        : std::runtime_error(what), best_(std::move(best)), objective_(objective) {}
    const FitParams& best() const { return best_; }
    double objective() const { return objective_; }

private:
    FitParams best_;
    double objective_;
};

/// Default starting point spreading the coefficients between ~0.3 and ~0.999.
FitParams default_start(Eigen::Index m);

/// Embeds an m-component fit as an (m+1)-component start with a negligible
/// extra component at the small-phi end.
FitParams embed_start(const FitParams& smaller);

/// Locally optimal mixture for one H from the warm start (or the default
/// start) plus random restarts; keeps the best.
FitResult fit_single(double H, Eigen::Index m, const FitOptions& options = {},
                     const std::optional<FitParams>& warm_start = std::nullopt);

/// Levenberg-Marquardt from a single start with a Nelder-Mead fallback.
FitResult fit_from(double H, Eigen::Index m, const FitParams& start, const FitOptions& options);

/// Fitted mixtures on a grid in H, interpolated by natural cubic splines in
/// (v, u) against h. The grid is the source of truth; splines are derived.
class CoeffTable {
public:
    CoeffTable() = default;
    CoeffTable(Eigen::Index m, Eigen::Index kmax, Eigen::VectorXd h_grid, Eigen::MatrixXd params,
               Eigen::VectorXd objectives);

    Eigen::Index components() const { return m_; }
    Eigen::Index kmax() const { return kmax_; }
    Eigen::Index grid_size() const { return h_.size(); }
    const Eigen::VectorXd& h_grid() const { return h_; }
    /// Row i holds the packed FitParams at h_grid()(i).
    const Eigen::MatrixXd& params() const { return params_; }
    const Eigen::VectorXd& objectives() const { return objectives_; }

    double hurst_lower() const;
    double hurst_upper() const;

    /// Interpolated packed parameters at transformed exponent h.
    Eigen::VectorXd interpolate(double h) const;

    /// Mixture at H; throws std::domain_error outside the grid range.
    Ar1Mixture lookup(double H) const;

private:
    Eigen::Index m_ = 0;
    Eigen::Index kmax_ = 0;
    Eigen::VectorXd h_;
    Eigen::MatrixXd params_;
    Eigen::VectorXd objectives_;
    std::vector<NaturalCubicSpline> splines_;
};

inline Ar1Mixture lookup(const CoeffTable& table, double H) { return table.lookup(H); }

struct TableOptions {
    Eigen::Index grid_size = 101;
    double hurst_lower = 0.51;
    double hurst_upper = 0.99;
    FitOptions fit;
    /// Optional smaller table whose fits are embedded as an extra start.
    const CoeffTable* nested = nullptr;
};

/// Continuation sweep of fit_single over an H grid (increasing h), each
/// point warm-started from its predecessor.
CoeffTable build_table(Eigen::Index m, const TableOptions& options = {});

/// Text persistence, header `fgn-coeff-table v1 m=<m> kmax=<K> grid=<G>`.
void save_table(const CoeffTable& table, std::ostream& out);
CoeffTable load_table(std::istream& in);
void save_table(const CoeffTable& table, const std::string& path);
CoeffTable load_table(const std::string& path);

} // namespace fgn

#endif
