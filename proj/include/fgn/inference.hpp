#ifndef FGN_INFERENCE_HPP
#define FGN_INFERENCE_HPP

#include "fgn/exact.hpp"
#include "fgn/gmrf.hpp"
#include "fgn/mixture.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fgn {

enum class Model { Exact, Approximate };

std::string to_string(Model model);
Model parse_model(const std::string& name);

/// Log-determinant and quadratic form of x under the approximate model at
/// unit scale, covariance Gamma_mix + I / kappa. Linear cost in n.
GaussianTerms approx_terms(const Eigen::VectorXd& x, const Ar1Mixture& mix, double kappa = default_kappa);

/// Log-density of x under covariance sigma^2 (Gamma_mix + I / kappa), computed
/// from the augmented precision at scale sigma.
double loglik_approx(const Eigen::VectorXd& x, const Ar1Mixture& mix, double sigma,
                     double kappa = default_kappa);

double loglik_approx(const Eigen::VectorXd& x, double H, double sigma, const CoeffTable& table,
                     double kappa = default_kappa);

struct MleOptions {
    bool center = true;
    double hurst_lower = 0.51;
    double hurst_upper = 0.99;
    int scan_points = 25;
    double kappa = default_kappa;
    double fisher_step = 1e-3;  // step in h for the second difference
};

struct MleResult {
    double H_hat = 0.0;
    double sigma_hat = 0.0;
    double loglik = 0.0;
    double sd_H = 0.0;
    int iterations = 0;
    Model model = Model::Exact;
    Eigen::Index components = 0;  // m for the approximate model
    bool boundary = false;
    double data_mean = 0.0;
};

/// Profile log-likelihood of h (sigma maximized analytically).
double profile_loglik(const Eigen::VectorXd& x, double h, Model model, const CoeffTable* table,
                      double kappa = default_kappa);

/// Maximum likelihood estimate of (H, sigma): grid scan over h, then Brent
/// refinement inside the best bracket.
MleResult mle(const Eigen::VectorXd& x, Model model, const CoeffTable* table = nullptr,
              const MleOptions& options = {});

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
};

/// Conditional moments of x_{n+1..n+p} given x_{1..n} under exact fGn.
class ExactPredictor {
public:
    ExactPredictor(const HurstParams& params, Eigen::Index n, Eigen::Index p);
    Eigen::VectorXd mean(const Eigen::VectorXd& x) const;
    const Eigen::VectorXd& sd() const { return sd_; }

private:
    Eigen::MatrixXd gain_;  // p x n
    Eigen::VectorXd sd_;
};

/// The same under the approximate model, through the augmented GMRF with p
/// appended unobserved time points.
class ApproxPredictor {
public:
    ApproxPredictor(const Ar1Mixture& mix, double sigma, Eigen::Index n, Eigen::Index p,
                    double kappa = default_kappa);
    Eigen::VectorXd mean(const Eigen::VectorXd& x) const;
    const Eigen::VectorXd& sd() const { return sd_; }
    Eigen::Index bandwidth() const { return conditional_.bandwidth(); }

private:
    BandedPrecision Q_;
    GmrfConditional conditional_;
    Eigen::Index n_;
    Eigen::Index p_;
    Eigen::VectorXd sd_;
};

Prediction predict(const Eigen::VectorXd& x, double H, double sigma, Eigen::Index p, Model model,
                   const CoeffTable* table = nullptr, double kappa = default_kappa);

/// Kullback-Leibler divergence between zero-mean Gaussians with covariances
/// Gamma(H) (exact) and Gamma_mix + I/kappa (approximate), dense O(n^3).
/// reverse = false gives KL(exact || approximate).
double kld(double H, Eigen::Index n, const Ar1Mixture& mix, double kappa = default_kappa, bool reverse = false);
double kld(double H, Eigen::Index n, const CoeffTable& table, double kappa = default_kappa, bool reverse = false);

struct Decomposition {
    Eigen::MatrixXd component_means;  // n x m, columns ordered by decreasing phi
    Eigen::MatrixXd component_sds;
    Eigen::VectorXd noise_mean;
    Eigen::VectorXd sum_mean;         // conditional mean of x~
    Ar1Mixture mixture;
    double H_hat = 0.0;
    double sigma_hat = 0.0;
    double data_mean = 0.0;

    /// max |sum_j component_j + noise - sum_mean|
    double reconstruction_residual() const;
};

/// Posterior means/sds of the weighted components sigma sqrt(w_j) z^{(j)} given
/// observations (with estimate.data_mean subtracted from y).
Decomposition decompose(const ObservationModel& obs, const MleResult& estimate, const CoeffTable& table,
                        double kappa = default_kappa);

// ---- simulation studies ----

struct ReplicationRow {
    Eigen::Index m = 0;
    double mean_estimate = 0.0;
    double rmse = 0.0;
    double mae = 0.0;
};

struct ReplicationReport {
    double H_true = 0.0;
    Eigen::Index n = 0;
    int replications = 0;
    double mean_exact = 0.0;
    std::vector<ReplicationRow> rows;
    int failures = 0;
    std::vector<std::string> failure_messages;
    Eigen::VectorXd exact_estimates;      // NaN where a replication failed
    Eigen::MatrixXd approx_estimates;     // replications x tables
};

struct StudyOptions {
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
    double kappa = default_kappa;
};

/// Simulates N exact fGn series (seed_i = seed + i) and compares the exact and
/// approximate MLEs of H per coefficient table.
ReplicationReport replication_study(double H_true, Eigen::Index n, int N,
                                    const std::vector<const CoeffTable*>& tables,
                                    const StudyOptions& options = {});

struct PredictionReport {
    Eigen::VectorXd err_mu;     // horizons 1..P
    Eigen::VectorXd err_sigma;
    Eigen::MatrixXd candidate_means;  // N x P
    Eigen::MatrixXd reference_means;
};

/// Standardized absolute prediction error of `candidate` against `reference`
/// (normally exact vs approximate) over N simulated exact fGn series.
PredictionReport prediction_error_study(double H, Eigen::Index n, Eigen::Index P, int N,
                                        Model reference, Model candidate, const CoeffTable* table,
                                        const StudyOptions& options = {});

} // namespace fgn

#endif
