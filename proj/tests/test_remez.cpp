#include "obslab/errors.hpp"
#include "obslab/parallel.hpp"
#include "obslab/remez.hpp"
#include "obslab/spectral1d.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace obslab;

namespace {
std::vector<double> grid(double a, double b, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * double(i) / double(n - 1);
    return x;
}
CantorLevel h0_cantor(int depth, double a, double b) {
    return build_cantor(CantorSpec::gauge_rule(Gauge::h_alpha(0), a, b), depth);
}
}  // namespace

TEST_CASE("sup on circles") {
    for (int n : {1, 5, 40}) {
        auto s = sup_disc(Polynomial::monic(std::vector<cplx>(n, 0.0)), 1.0);
        CHECK(s.value.ln_mag == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(s.grid_points == std::max<std::size_t>(4096, 64 * n));
    }
    auto s = sup_disc(Polynomial::monic({cplx(-1.0)}), 1.0);
    CHECK(s.value.to_real() == doctest::Approx(2.0).epsilon(1e-14));

    auto rng = make_rng(1, 2, 3);
    for (int t = 0; t < 10; ++t) {
        Polynomial p = random_polynomial(RootEnsemble::UniformD2, 16, rng);
        auto a = sup_disc(p, 1.0), b = sup_disc(p, 1.0, 8192);
        CHECK((b.value - a.value).abs() <= a.lipschitz_slack);
        CHECK(b.value >= a.value);
        CHECK(b.value <= a.upper());
    }
}

TEST_CASE("Remez on the full interval") {
    RemezConfig cfg;
    cfg.degrees = {0};
    cfg.trials = 4;
    auto r0 = remez_experiment(grid(-1, 1, 2001), 1.0, cfg);
    CHECK(r0.max_ratio_ln == doctest::Approx(0.0));
    CHECK(r0.fitted_C == 0.0);
    CHECK(r0.violations == 0);

    cfg.degrees = {1, 2, 4, 8};
    cfg.alpha = 1.0;
    cfg.trials = 100;
    auto a = remez_experiment(grid(-1, 1, 2001), 1.0, cfg);
    cfg.trials = 1000;
    auto b = remez_experiment(grid(-1, 1, 2001), 1.0, cfg);
    CHECK(std::isfinite(b.fitted_C));
    CHECK(std::fabs(a.fitted_C - b.fitted_C) <= 0.2 * b.fitted_C + 1e-12);
    for (const auto& t : b.trials) CHECK(t.ratio_ln >= -1e-12);
    CHECK(b.violations == 0);
}

TEST_CASE("Remez on an h_0 Cantor set") {
    CantorLevel E = h0_cantor(8, -1, 1);
    RemezConfig cfg;
    cfg.alpha = 1.0;
    cfg.trials = 200;
    cfg.degrees = {2, 4, 8, 16};
    auto fit = remez_experiment(E, cfg);
    CHECK(fit.c > 0);
    CHECK(fit.violations == 0);
    cfg.degrees = {32};
    cfg.test_C = fit.fitted_C;
    cfg.seed = 17;
    auto ext = remez_experiment(E, cfg);
    CHECK(ext.violations == 0);
    for (const auto& t : ext.trials) CHECK(t.ratio_ln >= 0);

    // More content never needs a larger constant.
    cfg.test_C = -1;
    cfg.degrees = {4, 8};
    cfg.trials = 100;
    double prev_c = 0, prev_C = 1e300;
    for (int depth : {8, 4, 1}) {
        auto r = remez_experiment(h0_cantor(depth, -1, 1), cfg);
        if (r.c > prev_c) CHECK(r.fitted_C <= prev_C + 1e-12);
        prev_c = r.c;
        prev_C = r.fitted_C;
    }
    CHECK_THROWS_AS(remez_experiment(grid(-1, 1, 5), 0.0, cfg), DegenerateSet);
}

TEST_CASE("Jensen zero count") {
    auto one = jensen_zero_bound(Polynomial(1.0, {}));
    CHECK(one.m == 0);
    CHECK(one.bound == 0.0);
    auto lin = jensen_zero_bound(Polynomial::monic({cplx(1.0)}));
    CHECK(lin.m == 1);
    CHECK(lin.bound == doctest::Approx(std::log(5.0) / std::log(2.0)).epsilon(1e-12));
    auto rng = make_rng(5, 6, 7);
    std::uniform_int_distribution<int> deg(1, 64);
    int bad = 0;
    for (int t = 0; t < 2000; ++t) {
        Polynomial p = random_polynomial(RootEnsemble::UniformD2, deg(rng), rng);
        if (!jensen_zero_bound(p).holds) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("propagation of smallness") {
    std::vector<double> eps;
    for (int i = 0; i < 6; ++i) eps.push_back(-3.0 - 9.0 * i / 5.0);
    AnalyticFn constant{[](cplx) { return cplx(2.0); }, 0.0};
    auto r = propagation_experiment({constant}, 0, 1, {0.5}, 1.0, eps);
    CHECK(r.fitted_C == 0.0);
    CHECK(r.violations == 0);

    Polynomial p4 = Polynomial::monic({0.2, 0.4, cplx(0.5, 0.3), -0.7});
    double lip = 4 * sup_disc(p4, 1.0).upper().to_real();
    AnalyticFn poly{[p4](cplx z) { return p4.eval(z); }, lip};
    auto I = grid(0, 1, 8192);
    auto rp = propagation_experiment({poly}, 0, 1, I, 1.0, {-3.0});
    CHECK(rp.rows[0].C_needed <= 0);
    CHECK(rp.fitted_C == 0.0);

    std::vector<AnalyticFn> fns;
    for (int t = 0; t < 100; ++t) {
        SpectralVector v = sample_spectral(1.0, 400.0, 21, t);
        fns.push_back({[v](cplx z) { return evaluate(v, z); }, v.lipschitz()});
    }
    auto E = h0_cantor(8, 0, 1).sample_points();
    auto rs = propagation_experiment(fns, 0, 1, E, 1.0, eps);
    CHECK(std::isfinite(rs.fitted_C));
    CHECK(rs.violations == 0);
}
