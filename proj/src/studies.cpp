#include "fgn/inference.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace fgn {

namespace {

/// Runs body(i) for i in [0, count) on a small pool; results must be written
/// to per-index slots so the outcome does not depend on scheduling.
template <typename Body>
void parallel_for(int count, unsigned threads, Body body) {
    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(count, 1)));
    std::atomic<int> next{0};
    auto run = [&] {
        for (int i = next++; i < count; i = next++) body(i);
    };
    if (workers <= 1) {
        run();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

} // namespace

ReplicationReport replication_study(double H_true, Eigen::Index n, int N,
                                    const std::vector<const CoeffTable*>& tables, const StudyOptions& options) {
    check_hurst(H_true);
    if (N < 1) throw std::invalid_argument("need at least one replication");
    const auto T = static_cast<Eigen::Index>(tables.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ReplicationReport report;
    report.H_true = H_true;
    report.n = n;
    report.replications = N;
    report.exact_estimates = Eigen::VectorXd::Constant(N, nan);
    report.approx_estimates = Eigen::MatrixXd::Constant(N, T, nan);
    std::vector<std::string> errors(static_cast<std::size_t>(N));

    MleOptions mle_options;
    mle_options.center = false;  // simulated series have known zero mean
    mle_options.kappa = options.kappa;

    parallel_for(N, options.threads, [&](int i) {
        try {
            const Eigen::VectorXd x = simulate_exact({H_true, 1.0}, n, options.seed + static_cast<std::uint64_t>(i));
            const double exact = mle(x, Model::Exact, nullptr, mle_options).H_hat;
            Eigen::RowVectorXd approx(T);
            for (Eigen::Index k = 0; k < T; ++k)
                approx(k) = mle(x, Model::Approximate, tables[static_cast<std::size_t>(k)], mle_options).H_hat;
            report.exact_estimates(i) = exact;
            report.approx_estimates.row(i) = approx;
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = "replication " + std::to_string(i) + ": " + e.what();
        }
    });

    int ok = 0;
    double sum_exact = 0.0;
    Eigen::VectorXd sum_approx = Eigen::VectorXd::Zero(T), sum_sq = Eigen::VectorXd::Zero(T),
                    sum_abs = Eigen::VectorXd::Zero(T);
    for (int i = 0; i < N; ++i) {
        if (!errors[static_cast<std::size_t>(i)].empty()) {
            ++report.failures;
            report.failure_messages.push_back(errors[static_cast<std::size_t>(i)]);
            continue;
        }
        ++ok;
        sum_exact += report.exact_estimates(i);
        for (Eigen::Index k = 0; k < T; ++k) {
            const double diff = report.approx_estimates(i, k) - report.exact_estimates(i);
            sum_approx(k) += report.approx_estimates(i, k);
            sum_sq(k) += diff * diff;
            sum_abs(k) += std::abs(diff);
        }
    }
    const double count = ok > 0 ? static_cast<double>(ok) : nan;
    report.mean_exact = sum_exact / count;
    for (Eigen::Index k = 0; k < T; ++k) {
        report.rows.push_back({tables[static_cast<std::size_t>(k)]->components(), sum_approx(k) / count,
                               std::sqrt(sum_sq(k) / count), sum_abs(k) / count});
    }
    return report;
}

PredictionReport prediction_error_study(double H, Eigen::Index n, Eigen::Index P, int N, Model reference,
                                        Model candidate, const CoeffTable* table, const StudyOptions& options) {
    check_hurst(H);
    if (P < 1 || N < 1) throw std::invalid_argument("prediction study needs P >= 1 and N >= 1");
    const bool need_table = reference == Model::Approximate || candidate == Model::Approximate;
    if (need_table && !table) throw std::invalid_argument("approximate model needs a coefficient table");

    const HurstParams params{H, 1.0};
    std::optional<ExactPredictor> exact;
    std::optional<ApproxPredictor> approx;
    if (reference == Model::Exact || candidate == Model::Exact) exact.emplace(params, n, P);
    if (need_table) approx.emplace(table->lookup(H), 1.0, n, P, options.kappa);

    auto mean_of = [&](Model model, const Eigen::VectorXd& x) {
        return model == Model::Exact ? exact->mean(x) : approx->mean(x);
    };
    const Eigen::VectorXd& sd_ref = reference == Model::Exact ? exact->sd() : approx->sd();
    const Eigen::VectorXd& sd_cand = candidate == Model::Exact ? exact->sd() : approx->sd();

    PredictionReport report;
    report.reference_means.resize(N, P);
    report.candidate_means.resize(N, P);
    parallel_for(N, options.threads, [&](int i) {
        const Eigen::VectorXd x = simulate_exact(params, n, options.seed + static_cast<std::uint64_t>(i));
        report.reference_means.row(i) = mean_of(reference, x).transpose();
        report.candidate_means.row(i) = mean_of(candidate, x).transpose();
    });

    report.err_mu = Eigen::VectorXd::Zero(P);
    for (int i = 0; i < N; ++i) {
        report.err_mu += (report.candidate_means.row(i) - report.reference_means.row(i))
                             .transpose()
                             .cwiseAbs()
                             .cwiseQuotient(sd_ref);
    }
    report.err_mu /= static_cast<double>(N);
    report.err_sigma = sd_cand.cwiseQuotient(sd_ref).array() - 1.0;
    return report;
}

} // namespace fgn
