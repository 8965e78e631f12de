#include "oracles.hpp"

#include "fgn/exact.hpp"
#include "fgn/mixture.hpp"

#include <doctest.h>

#include <sstream>

using namespace fgn;

namespace {

Ar1Mixture make_mixture(double H, std::initializer_list<double> w, std::initializer_list<double> phi) {
    Ar1Mixture mix;
    mix.H = H;
    mix.weights = Eigen::Map<const Eigen::VectorXd>(w.begin(), static_cast<Eigen::Index>(w.size()));
    mix.phi = Eigen::Map<const Eigen::VectorXd>(phi.begin(), static_cast<Eigen::Index>(phi.size()));
    return mix;
}

double max_acf_error(const Ar1Mixture& mix, Eigen::Index kmax) {
    return (mixture_acf(mix, kmax) - fgn_acf(mix.H, kmax)).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("mixture_acf examples") {
    const auto mix = make_mixture(0.7, {0.5, 0.5}, {0.9, 0.5});
    const Eigen::VectorXd acf = mixture_acf(mix, 3);
    CHECK(acf(0) == doctest::Approx(1.0));
    CHECK(acf(1) == doctest::Approx(0.7));
    CHECK(acf(2) == doctest::Approx(0.53));
    CHECK(acf(3) == doctest::Approx(0.5 * 0.729 + 0.5 * 0.125));
    CHECK(mixture_acf(make_mixture(0.7, {1.0}, {0.5}), 3)(3) == doctest::Approx(0.125));
}

TEST_CASE("mixture validation") {
    CHECK_NOTHROW(make_mixture(0.8, {0.3, 0.7}, {0.9, 0.2}).validate());
    CHECK_THROWS(make_mixture(0.8, {0.3, 0.6}, {0.9, 0.2}).validate());
    CHECK_THROWS(make_mixture(0.8, {0.3, 0.7}, {0.2, 0.9}).validate());
    CHECK_THROWS(make_mixture(0.8, {0.3, 0.7}, {1.0, 0.2}).validate());
    CHECK_THROWS(make_mixture(0.8, {-0.3, 1.3}, {0.9, 0.2}).validate());
}

TEST_CASE("reparametrization round trip") {
    const auto mix = make_mixture(0.8, {0.1, 0.2, 0.3, 0.4}, {0.999, 0.95, 0.7, 0.1});
    const FitParams p = FitParams::from_mixture(mix);
    const Ar1Mixture back = p.to_mixture(0.8);
    CHECK((back.weights - mix.weights).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((back.phi - mix.phi).cwiseAbs().maxCoeff() < 1e-12);

    const FitParams q = FitParams::unpack(p.packed(), 4);
    CHECK((q.packed() - p.packed()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(p.packed().size() == 7);

    Eigen::VectorXd theta(5);
    theta << 3.0, -2.0, -4.0, 1.5, 20.0;
    const Ar1Mixture any = FitParams::unpack(theta, 3).to_mixture(0.6);
    CHECK_NOTHROW(any.validate());
}

TEST_CASE("fit_gradient matches central differences") {
    Eigen::VectorXd theta(7);
    theta << 0.3, -0.2, 0.5, -5.0, 1.0, 1.5, 0.7;
    const FitParams p = FitParams::unpack(theta, 4);
    const Eigen::VectorXd g = fit_gradient(p, 0.8, 300);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = 1e-6;
        Eigen::VectorXd a = theta, b = theta;
        a(i) += h;
        b(i) -= h;
        const double fd = (fit_objective(FitParams::unpack(a, 4), 0.8, 300) -
                           fit_objective(FitParams::unpack(b, 4), 0.8, 300)) / (2 * h);
        INFO("coordinate " << i);
        CHECK(std::abs(g(i) - fd) < 1e-5 * g.norm() + 1e-10);
    }
}

TEST_CASE("fit at H = 0.829 reproduces the published four-component mixture") {
    const FitResult r = fit_single(0.829, 4);
    const Ar1Mixture& mix = r.mixture;
    const double w_ref[] = {0.0988, 0.1296, 0.2335, 0.5381};
    const double phi_ref[] = {0.9992, 0.9813, 0.8435, 0.2886};
    for (int j = 0; j < 4; ++j) {
        INFO("component " << j);
        CHECK(std::abs(mix.weights(j) - w_ref[j]) < 0.02);
        CHECK(std::abs(mix.phi(j) - phi_ref[j]) < 0.02);
    }
    CHECK(max_acf_error(mix, 1000) < 0.01);
    CHECK(r.objective == doctest::Approx(fit_objective(r.params, 0.829, 1000)));
}

TEST_CASE("fit quality trends") {
    FitOptions fast;
    fast.kmax = 400;
    const double mid3 = fit_single(0.75, 3, fast).objective;
    const double mid4 = fit_single(0.75, 4, fast).objective;
    CHECK(mid4 < mid3);
    CHECK(fit_single(0.51, 3, fast).objective < mid3);
    const FitResult high = fit_single(0.9, 4);
    CHECK(max_acf_error(high.mixture, 1000) < 0.01);
    CHECK_THROWS_AS(fit_single(0.5, 3), std::domain_error);
    CHECK_THROWS_AS(fit_single(1.0, 3), std::domain_error);
}

TEST_CASE("fits are stable across restarts and starts") {
    FitOptions a;
    a.kmax = 300;
    FitOptions b = a;
    b.seed = 99;
    const FitResult ra = fit_single(0.85, 3, a);
    const FitResult rb = fit_single(0.85, 3, b);
    CHECK(std::abs(ra.objective - rb.objective) < 1e-8);
    CHECK((ra.mixture.phi - rb.mixture.phi).cwiseAbs().maxCoeff() < 1e-3);

    // Warm starting from a converged fit never makes it worse.
    const FitResult warm = fit_single(0.85, 3, a, ra.params);
    CHECK(warm.objective <= ra.objective + 1e-14);
}

TEST_CASE("embedding a smaller fit") {
    FitOptions opt;
    opt.kmax = 300;
    const FitResult r3 = fit_single(0.8, 3, opt);
    const FitParams e = embed_start(r3.params);
    CHECK(e.size() == 4);
    const Ar1Mixture m4 = e.to_mixture(0.8);
    CHECK_NOTHROW(m4.validate());
    CHECK(std::abs(fit_objective(e, 0.8, 300) - r3.objective) < 1e-8);
}

TEST_CASE("coefficient table") {
    TableOptions options;
    options.grid_size = 11;
    options.hurst_lower = 0.6;
    options.hurst_upper = 0.9;
    options.fit.kmax = 300;
    const CoeffTable table = build_table(3, options);

    CHECK(table.components() == 3);
    CHECK(table.grid_size() == 11);
    CHECK(table.hurst_lower() == doctest::Approx(0.6));
    CHECK(table.hurst_upper() == doctest::Approx(0.9));

    SUBCASE("grid points reproduced") {
        for (Eigen::Index i = 0; i < table.grid_size(); ++i) {
            const Eigen::VectorXd row = table.params().row(i).transpose();
            CHECK((table.interpolate(table.h_grid()(i)) - row).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    SUBCASE("midpoints fit almost as well as a fresh fit") {
        for (Eigen::Index i = 0; i + 1 < table.grid_size(); ++i) {
            const double h = 0.5 * (table.h_grid()(i) + table.h_grid()(i + 1));
            const double H = hurst_from_h(h);
            const Ar1Mixture mix = table.lookup(H);
            CHECK_NOTHROW(mix.validate());
            const double interp = fit_objective(FitParams::from_mixture(mix), H, 300);
            const double fresh = fit_single(H, 3, options.fit).objective;
            INFO("H=" << H);
            CHECK(interp <= 2.0 * fresh + 1e-12);
        }
    }
    SUBCASE("continuity in H") {
        const double step = 1e-6;
        for (double H : {0.62, 0.7, 0.77, 0.85, 0.89}) {
            const Ar1Mixture a = table.lookup(H), b = table.lookup(H + step);
            CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() < 1e-3);
            CHECK((a.weights - b.weights).cwiseAbs().maxCoeff() < 1e-3);
        }
    }
    SUBCASE("outside the range") {
        CHECK_THROWS_AS(table.lookup(0.55), std::domain_error);
        CHECK_THROWS_AS(table.lookup(0.95), std::domain_error);
        CHECK_NOTHROW(table.lookup(0.6));
        CHECK_NOTHROW(table.lookup(0.9));
    }
    SUBCASE("text round trip") {
        std::stringstream buffer;
        save_table(table, buffer);
        const CoeffTable back = load_table(buffer);
        CHECK(back.components() == 3);
        CHECK(back.kmax() == 300);
        CHECK((back.params() - table.params()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.h_grid() - table.h_grid()).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back.objectives() - table.objectives()).cwiseAbs().maxCoeff() == 0.0);
        const Ar1Mixture a = table.lookup(0.733), b = back.lookup(0.733);
        CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("malformed files are rejected") {
        std::stringstream bad("fgn-coeff-table v1 m=3 kmax=300 grid=2\n0.1 1 2\n");
        CHECK_THROWS(load_table(bad));
        std::stringstream wrong_header("hello\n");
        CHECK_THROWS(load_table(wrong_header));
    }
}
