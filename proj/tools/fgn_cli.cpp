// Command-line front end for fGn estimation with exact and GMRF-approximated
// likelihoods. Every data file written here is a CSV with a header row.

#include "fgn/errors.hpp"
#include "fgn/inference.hpp"
#include "fgn/series_io.hpp"

#include <CLI11.hpp>

#include <Eigen/Core>
#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifndef FGN_DATA_DIR
#define FGN_DATA_DIR "data"
#endif

namespace {

using namespace fgn;

enum Exit : int { ok = 0, failure = 1, usage = 2, partial = 3 };

struct RunConfig {
    std::string model = "exact";
    std::vector<int> m{4};
    std::vector<double> H{0.8};
    double sigma = 1.0;
    std::vector<long> n{500};
    int N = 100;
    long p = 250;
    long kmax = 1000;
    long grid = 101;
    double kappa = default_kappa;
    std::uint64_t seed = 1;
    std::vector<std::string> tables;
    std::string input;
    std::string output;
    std::string curves;
    std::string nested;
    std::string na = "NA";
    bool allow_partial = false;
    bool reverse = false;
    bool check = false;
    unsigned threads = 0;
    std::vector<long> exact_n{500, 1000, 2000};
    int repeats = 3;
    bool H_given = false;
    bool sigma_given = false;
    bool n_given = false;
};

std::string default_table_path(int m) {
    return std::string(FGN_DATA_DIR) + "/fgn_m" + std::to_string(m) + ".txt";
}

/// Tables named by --table, otherwise the shipped tables for each --m.
std::vector<CoeffTable> resolve_tables(const RunConfig& cfg) {
    std::vector<CoeffTable> tables;
    if (!cfg.tables.empty()) {
        for (const auto& path : cfg.tables) tables.push_back(load_table(path));
        return tables;
    }
    for (int m : cfg.m) tables.push_back(load_table(default_table_path(m)));
    return tables;
}

CoeffTable resolve_table(const RunConfig& cfg) {
    auto tables = resolve_tables(cfg);
    if (tables.size() != 1) throw std::invalid_argument("this command takes exactly one table (--m or --table)");
    return std::move(tables.front());
}

void write_output(const RunConfig& cfg, const std::vector<std::string>& header, const Eigen::MatrixXd& columns) {
    if (cfg.output.empty() || cfg.output == "-") {
        write_csv(std::cout, header, columns);
    } else {
        write_csv(cfg.output, header, columns);
    }
}

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(digits) << v;
    return s.str();
}

std::string join(const Eigen::VectorXd& v, int digits = 4) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i), digits);
    return "(" + s + ")";
}

SeriesData read_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw std::invalid_argument("--input is required");
    return read_series(cfg.input, cfg.na);
}

Eigen::VectorXd complete_series(const SeriesData& data) {
    if (data.missing > 0) {
        throw std::invalid_argument("maximum likelihood needs a complete series; found " +
                                    std::to_string(data.missing) + " missing values");
    }
    return data.values;
}

// ---- commands ----

int cmd_build_table(const RunConfig& cfg) {
    const int m = cfg.m.front();
    if (cfg.output.empty()) throw std::invalid_argument("--output is required");
    TableOptions options;
    options.grid_size = cfg.grid;
    options.fit.kmax = cfg.kmax;
    options.fit.seed = cfg.seed;
    std::optional<CoeffTable> nested;
    if (!cfg.nested.empty()) {
        nested = load_table(cfg.nested);
        if (nested->components() + 1 != m) throw std::invalid_argument("--nested table must have m - 1 components");
        options.nested = &*nested;
    }
    const CoeffTable table = build_table(m, options);
    save_table(table, cfg.output);

    std::cout << "m=" << m << " kmax=" << cfg.kmax << " grid=" << table.grid_size() << " -> " << cfg.output << '\n';
    std::cout << "H objective max_acf_error\n";
    for (Eigen::Index i = 0; i < table.grid_size(); ++i) {
        const double H = hurst_from_h(table.h_grid()(i));
        const Ar1Mixture mix = table.lookup(H);
        const double err = (mixture_acf(mix, cfg.kmax) - fgn_acf(H, cfg.kmax)).cwiseAbs().maxCoeff();
        std::cout << fmt(H, 4) << ' ' << fmt(table.objectives()(i), 4) << ' ' << fmt(err, 4) << '\n';
    }
    return ok;
}

int cmd_table_curves(const RunConfig& cfg) {
    const auto tables = resolve_tables(cfg);
    double lo = 0.0, hi = 1.0;
    for (const auto& t : tables) {
        lo = std::max(lo, t.hurst_lower());
        hi = std::min(hi, t.hurst_upper());
    }
    const Eigen::VectorXd H = Eigen::VectorXd::LinSpaced(cfg.grid, lo, hi);
    std::vector<std::string> header{"H"};
    Eigen::Index cols = 1;
    for (const auto& t : tables) cols += 2 * t.components();
    Eigen::MatrixXd out(H.size(), cols);
    out.col(0) = H;
    Eigen::Index c = 1;
    for (const auto& t : tables) {
        const auto m = t.components();
        for (Eigen::Index j = 1; j <= m; ++j) header.push_back("w" + std::to_string(j) + "_m" + std::to_string(m));
        for (Eigen::Index j = 1; j <= m; ++j) header.push_back("phi" + std::to_string(j) + "_m" + std::to_string(m));
        for (Eigen::Index i = 0; i < H.size(); ++i) {
            const Ar1Mixture mix = t.lookup(H(i));
            out.block(i, c, 1, m) = mix.weights.transpose();
            out.block(i, c + m, 1, m) = mix.phi.transpose();
        }
        c += 2 * m;
    }
    write_output(cfg, header, out);
    return ok;
}

int cmd_simulate(const RunConfig& cfg) {
    const Eigen::VectorXd x = simulate_exact({cfg.H.front(), cfg.sigma}, cfg.n.front(), cfg.seed);
    write_output(cfg, {"x"}, x);
    return ok;
}

int cmd_estimate(const RunConfig& cfg) {
    const Eigen::VectorXd x = complete_series(read_input(cfg));
    std::vector<MleResult> results;
    if (cfg.model == "exact" || cfg.model == "both") results.push_back(mle(x, Model::Exact));
    if (cfg.model == "approx" || cfg.model == "both") {
        for (const auto& table : resolve_tables(cfg)) {
            MleOptions options;
            options.kappa = cfg.kappa;
            results.push_back(mle(x, Model::Approximate, &table, options));
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(results.size()), 7);
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        std::cout << std::left << std::setw(7) << to_string(r.model)
                  << (r.model == Model::Approximate ? " m=" + std::to_string(r.components) : std::string(4, ' '))
                  << "  H = " << fmt(r.H_hat, 5) << " (sd " << fmt(r.sd_H, 2) << ")"
                  << "  sigma = " << fmt(r.sigma_hat, 5) << "  loglik = " << fmt(r.loglik, 8)
                  << (r.boundary ? "  [at search boundary]" : "") << '\n';
        out.row(static_cast<Eigen::Index>(i)) << (r.model == Model::Exact ? 0.0 : static_cast<double>(r.components)),
            r.H_hat, r.sd_H, r.sigma_hat, r.loglik, r.data_mean, r.boundary ? 1.0 : 0.0;
    }
    std::cout << "n = " << x.size() << ", mean removed = " << fmt(results.front().data_mean, 8) << '\n';
    if (!cfg.output.empty()) {
        write_csv(cfg.output, {"m", "H_hat", "sd_H", "sigma_hat", "loglik", "mean", "boundary"}, out);
    }
    return ok;
}

int cmd_replicate(const RunConfig& cfg) {
    const auto tables = resolve_tables(cfg);
    std::vector<const CoeffTable*> ptrs;
    for (const auto& t : tables) ptrs.push_back(&t);
    StudyOptions options{cfg.seed, cfg.threads, cfg.kappa};

    std::vector<std::string> header{"H", "n", "N", "m", "mean", "rmse", "mae"};
    std::vector<Eigen::RowVectorXd> rows;
    int failures = 0;
    for (double H : cfg.H) {
        for (long n : cfg.n) {
            const ReplicationReport r = replication_study(H, n, cfg.N, ptrs, options);
            failures += r.failures;
            for (const auto& message : r.failure_messages) std::cerr << "replication failed: " << message << '\n';
            const int used = cfg.N - r.failures;
            Eigen::RowVectorXd exact(7);
            double sq = 0.0, ab = 0.0;
            for (Eigen::Index i = 0; i < r.exact_estimates.size(); ++i) {
                if (std::isnan(r.exact_estimates(i))) continue;
                sq += std::pow(r.exact_estimates(i) - H, 2);
                ab += std::abs(r.exact_estimates(i) - H);
            }
            exact << H, static_cast<double>(n), used, 0, r.mean_exact, std::sqrt(sq / used), ab / used;
            rows.push_back(exact);
            std::cout << "H=" << fmt(H, 3) << " n=" << n << "  exact mean " << fmt(r.mean_exact, 5);
            for (const auto& row : r.rows) {
                Eigen::RowVectorXd a(7);
                a << H, static_cast<double>(n), used, static_cast<double>(row.m), row.mean_estimate, row.rmse, row.mae;
                rows.push_back(a);
                std::cout << " | m=" << row.m << " mean " << fmt(row.mean_estimate, 5) << " rmse(H~) "
                          << fmt(row.rmse, 3) << " mae(H~) " << fmt(row.mae, 3);
            }
            std::cout << '\n';
        }
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 7);
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
    if (!cfg.output.empty()) write_csv(cfg.output, header, out);
    std::cout << "# m = 0 rows: exact MLE against the true H; m > 0 rows: approximate MLE against the exact MLE\n";
    if (failures > 0) {
        std::cerr << failures << " replication(s) failed\n";
        return cfg.allow_partial ? ok : partial;
    }
    return ok;
}

int cmd_predict_study(const RunConfig& cfg) {
    const auto table = resolve_table(cfg);
    StudyOptions options{cfg.seed, cfg.threads, cfg.kappa};
    const Model candidate = parse_model(cfg.model == "exact" ? "approx" : cfg.model);
    const PredictionReport r =
        prediction_error_study(cfg.H.front(), cfg.n.front(), cfg.p, cfg.N, Model::Exact, candidate, &table, options);
    Eigen::MatrixXd out(cfg.p, 3);
    out.col(0) = Eigen::VectorXd::LinSpaced(cfg.p, 1.0, static_cast<double>(cfg.p));
    out.col(1) = r.err_mu;
    out.col(2) = r.err_sigma;
    write_output(cfg, {"k", "err_mu", "err_sigma"}, out);
    return ok;
}

int cmd_kld(const RunConfig& cfg) {
    const auto tables = resolve_tables(cfg);
    std::vector<double> H = cfg.H;
    if (!cfg.H_given) {
        H.clear();
        for (int i = 0; i <= 10; ++i) H.push_back(0.55 + 0.04 * i);
    }
    std::vector<std::string> header{"H"};
    for (const auto& t : tables) header.push_back("sqrt_kld_m" + std::to_string(t.components()));
    Eigen::MatrixXd out(static_cast<Eigen::Index>(H.size()), static_cast<Eigen::Index>(tables.size()) + 1);
    for (std::size_t i = 0; i < H.size(); ++i) {
        out(static_cast<Eigen::Index>(i), 0) = H[i];
        for (std::size_t k = 0; k < tables.size(); ++k)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k) + 1) =
                std::sqrt(kld(H[i], cfg.n.front(), tables[k], cfg.kappa, cfg.reverse));
    }
    write_output(cfg, header, out);
    return ok;
}

int cmd_decompose(const RunConfig& cfg) {
    const SeriesData data = read_input(cfg);
    const auto table = resolve_table(cfg);
    MleResult estimate;
    if (cfg.H_given) {
        if (!cfg.sigma_given) throw std::invalid_argument("--H needs --sigma");
        // Parameters supplied on the command line.
        estimate.H_hat = cfg.H.front();
        estimate.sigma_hat = cfg.sigma;
        double sum = 0.0;
        Eigen::Index count = 0;
        for (double v : data.values)
            if (!std::isnan(v)) sum += v, ++count;
        estimate.data_mean = sum / static_cast<double>(count);
    } else {
        MleOptions options;
        options.kappa = cfg.kappa;
        estimate = mle(complete_series(data), Model::Approximate, &table, options);
    }
    const Decomposition d = decompose(data.observation_model(), estimate, table, cfg.kappa);
    const auto m = d.mixture.size();

    std::cout << "H = " << fmt(d.H_hat, 5) << "  sigma = " << fmt(d.sigma_hat, 5) << "  mean = "
              << fmt(d.data_mean, 8) << '\n';
    std::cout << "phi = " << join(d.mixture.phi) << '\n';
    std::cout << "w   = " << join(d.mixture.weights) << '\n';
    const double residual = d.reconstruction_residual();
    std::cout << "max reconstruction residual = " << fmt(residual, 3) << '\n';

    std::vector<std::string> header;
    for (Eigen::Index j = 1; j <= m; ++j) header.push_back("mean" + std::to_string(j));
    for (Eigen::Index j = 1; j <= m; ++j) header.push_back("sd" + std::to_string(j));
    Eigen::MatrixXd out(d.component_means.rows(), 2 * m);
    out << d.component_means, d.component_sds;
    if (!cfg.output.empty()) write_csv(cfg.output, header, out);
    if (cfg.check && !(residual < 1e-8)) {
        std::cerr << "reconstruction check failed\n";
        return failure;
    }
    return ok;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), 2);
    Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        A(static_cast<Eigen::Index>(i), 0) = 1.0;
        A(static_cast<Eigen::Index>(i), 1) = std::log(x[i]);
        b(static_cast<Eigen::Index>(i)) = std::log(y[i]);
    }
    return A.colPivHouseholderQr().solve(b)(1);
}

// Timing input; exact simulation would cost O(n^2) at the largest n.
Eigen::VectorXd white_noise(long n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd x(n);
    for (auto& v : x) v = normal(rng);
    return x;
}

template <typename F>
double best_time(int repeats, F&& f) {
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(repeats, 1); ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

int cmd_bench(const RunConfig& cfg) {
    const auto table = resolve_table(cfg);
    const double H = cfg.H.front();
    const Ar1Mixture mix = table.lookup(H);
    const auto m = mix.size();
    std::vector<long> ns = cfg.n;
    if (!cfg.n_given) ns = {1000, 10000, 100000, 1000000};

    std::vector<std::string> header{"model", "n", "flops", "n_m1_cubed", "storage", "seconds"};
    std::vector<Eigen::RowVectorXd> rows;
    std::vector<double> xs, ts;
    bool exact_law = true;
    for (long n : ns) {
        const auto chol = cholesky_banded(assemble_precision(mix, 1.0, n, cfg.kappa).matrix);
        const auto law = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>((m + 1) * (m + 1) * (m + 1));
        exact_law = exact_law && chol.flops == law;
        const Eigen::VectorXd x = white_noise(n, cfg.seed);
        volatile double sink = 0.0;
        const double t = best_time(cfg.repeats, [&] { sink = sink + loglik_approx(x, mix, 1.0, cfg.kappa); });
        xs.push_back(static_cast<double>(n));
        ts.push_back(t);
        Eigen::RowVectorXd row(6);
        row << 1.0, static_cast<double>(n), static_cast<double>(chol.flops), static_cast<double>(law),
            static_cast<double>(chol.storage_size()), t;
        rows.push_back(row);
        std::cout << "approx n=" << n << " flops=" << chol.flops << " n(m+1)^3=" << law
                  << " storage=" << chol.storage_size() << " time=" << fmt(t, 4) << "s" << std::endl;
    }
    const double approx_slope = slope(xs, ts);

    std::vector<double> xe, te;
    for (long n : cfg.exact_n) {
        const Eigen::VectorXd x = simulate_exact({H, 1.0}, n, cfg.seed);
        volatile double sink = 0.0;
        const double t = best_time(cfg.repeats, [&] { sink = sink + loglik_exact(x, {H, 1.0}); });
        xe.push_back(static_cast<double>(n));
        te.push_back(t);
        Eigen::RowVectorXd row(6);
        row << 0.0, static_cast<double>(n), 0.0, 0.0, 0.0, t;
        rows.push_back(row);
        std::cout << "exact  n=" << n << " time=" << fmt(t, 4) << "s\n";
    }
    const double exact_slope = xe.size() > 1 ? slope(xe, te) : std::numeric_limits<double>::quiet_NaN();
    std::cout << "flop law " << (exact_law ? "exact" : "VIOLATED") << "; log-log slope approx = " << fmt(approx_slope, 3)
              << ", exact = " << fmt(exact_slope, 3) << '\n';

    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 6);
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = rows[i];
    if (!cfg.output.empty()) write_csv(cfg.output, header, out);
    return exact_law ? ok : failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional Gaussian noise: exact and GMRF-approximate likelihood tools"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto hurst = CLI::Range(0.5, 1.0 - 1e-12);
    auto add_m = [&](CLI::App* c, bool many) {
        auto* opt = c->add_option("--m", cfg.m, "Number of AR(1) components")->check(CLI::Range(1, 8));
        if (!many) opt->expected(1);
        return opt;
    };
    auto add_tables = [&](CLI::App* c) {
        c->add_option("--table", cfg.tables, "Coefficient table file(s); defaults to the shipped table for --m")
            ->check(CLI::ExistingFile);
    };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", cfg.seed, "Base random seed"); };
    auto add_kappa = [&](CLI::App* c) {
        c->add_option("--kappa", cfg.kappa, "Precision of the augmentation noise")->check(CLI::PositiveNumber);
    };
    auto add_output = [&](CLI::App* c) { c->add_option("--output", cfg.output, "Output CSV path (stdout if omitted)"); };
    auto add_input = [&](CLI::App* c) {
        c->add_option("--input", cfg.input, "Data file, one value per line")->required()->check(CLI::ExistingFile);
        c->add_option("--na-string", cfg.na, "Missing-value marker");
    };
    auto add_threads = [&](CLI::App* c) { c->add_option("--threads", cfg.threads, "Worker threads (0: all cores)"); };

    auto* build = app.add_subcommand("build-table", "Fit AR(1) mixtures over a grid in H");
    add_m(build, false);
    build->add_option("--kmax", cfg.kmax, "Largest lag in the fit")->check(CLI::Range(10L, 1000000L));
    build->add_option("--grid", cfg.grid, "Number of grid points in H")->check(CLI::Range(11L, 100000L));
    build->add_option("--nested", cfg.nested, "Table with m - 1 components used as an extra start")
        ->check(CLI::ExistingFile);
    add_seed(build);
    build->add_option("--output", cfg.output, "Table file to write")->required();

    auto* curves = app.add_subcommand("table-curves", "Weights and coefficients against H as CSV");
    add_m(curves, true);
    add_tables(curves);
    curves->add_option("--grid", cfg.grid, "Number of H values")->check(CLI::Range(2L, 100000L));
    add_output(curves);

    auto* sim = app.add_subcommand("simulate", "Exact fGn sample path");
    sim->add_option("--H", cfg.H, "Hurst exponent")->expected(1)->check(hurst);
    sim->add_option("--sigma", cfg.sigma, "Marginal standard deviation")->check(CLI::PositiveNumber);
    sim->add_option("--n", cfg.n, "Length")->expected(1)->check(CLI::PositiveNumber);
    add_seed(sim);
    add_output(sim);

    auto* est = app.add_subcommand("estimate", "Maximum likelihood estimate of H and sigma");
    add_input(est);
    est->add_option("--model", cfg.model, "exact, approx or both")
        ->check(CLI::IsMember({"exact", "approx", "both"}));
    add_m(est, true);
    add_tables(est);
    add_kappa(est);
    add_output(est);

    auto* rep = app.add_subcommand("replicate", "Exact vs approximate MLE over simulated series");
    rep->add_option("--H", cfg.H, "True Hurst exponent(s)")->check(hurst);
    rep->add_option("--n", cfg.n, "Series length(s)")->check(CLI::Range(16L, 100000000L));
    rep->add_option("--N", cfg.N, "Replications")->check(CLI::PositiveNumber);
    add_m(rep, true);
    add_tables(rep);
    add_seed(rep);
    add_kappa(rep);
    add_threads(rep);
    add_output(rep);
    rep->add_flag("--allow-partial", cfg.allow_partial, "Exit 0 even if some replications failed");

    auto* pred = app.add_subcommand("predict-study", "Standardized prediction errors of the approximate model");
    pred->add_option("--H", cfg.H, "Hurst exponent")->expected(1)->check(hurst);
    pred->add_option("--n", cfg.n, "Observed length")->expected(1)->check(CLI::PositiveNumber);
    pred->add_option("--p", cfg.p, "Prediction horizon")->check(CLI::PositiveNumber);
    pred->add_option("--N", cfg.N, "Simulated series")->check(CLI::PositiveNumber);
    pred->add_option("--model", cfg.model, "Candidate model compared with exact prediction")
        ->check(CLI::IsMember({"exact", "approx"}));
    add_m(pred, false);
    add_tables(pred);
    add_seed(pred);
    add_kappa(pred);
    add_threads(pred);
    add_output(pred);

    auto* kl = app.add_subcommand("kld", "Square-root KL divergence of approximate from exact fGn");
    kl->add_option("--H", cfg.H, "Hurst values (default 0.55, 0.59, ..., 0.95)")->check(hurst);
    kl->add_option("--n", cfg.n, "Series length")->expected(1)->check(CLI::PositiveNumber);
    add_m(kl, true);
    add_tables(kl);
    add_kappa(kl);
    kl->add_flag("--reverse", cfg.reverse, "KL(approximate || exact) instead");
    add_output(kl);

    auto* dec = app.add_subcommand("decompose", "Posterior means of the AR(1) components");
    add_input(dec);
    add_m(dec, false);
    add_tables(dec);
    dec->add_option("--H", cfg.H, "Use this H instead of estimating it")->expected(1)->check(hurst);
    dec->add_option("--sigma", cfg.sigma, "With --H: use this sigma")->check(CLI::PositiveNumber);
    add_kappa(dec);
    dec->add_flag("--check", cfg.check, "Fail unless components add up to the conditional mean (1e-8)");
    add_output(dec);

    auto* bench = app.add_subcommand("bench", "Flop counts and timing of the likelihoods");
    bench->add_option("--n", cfg.n, "Lengths for the approximate model (default 1e3..1e6)");
    bench->add_option("--exact-n", cfg.exact_n, "Lengths for the exact model");
    bench->add_option("--H", cfg.H, "Hurst exponent")->expected(1)->check(hurst);
    bench->add_option("--repeats", cfg.repeats, "Timing repeats (best is kept)")->check(CLI::PositiveNumber);
    add_m(bench, false);
    add_tables(bench);
    add_seed(bench);
    add_kappa(bench);
    add_output(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    for (auto* c : app.get_subcommands()) {
        auto given = [c](const std::string& name) {
            const auto* opt = c->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        cfg.H_given = given("--H");
        cfg.sigma_given = given("--sigma");
        cfg.n_given = given("--n");
    }

    try {
        if (*build) return cmd_build_table(cfg);
        if (*curves) return cmd_table_curves(cfg);
        if (*sim) return cmd_simulate(cfg);
        if (*est) return cmd_estimate(cfg);
        if (*rep) return cmd_replicate(cfg);
        if (*pred) return cmd_predict_study(cfg);
        if (*kl) return cmd_kld(cfg);
        if (*dec) return cmd_decompose(cfg);
        if (*bench) return cmd_bench(cfg);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const DegenerateData& e) {
        std::cerr << "error: degenerate data: " << e.what() << '\n';
        return failure;
    } catch (const FitFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
    return usage;
}
