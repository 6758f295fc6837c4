#include "obslab/errors.hpp"
#include "obslab/fractal.hpp"
#include "obslab/parallel.hpp"
#include "obslab/spectral1d.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace obslab;

namespace {
constexpr double kPi = std::numbers::pi;
std::vector<double> log_grid(double a, double b, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(a * std::pow(b / a, double(i) / (n - 1)));
    return g;
}
}  // namespace

TEST_CASE("sampling from E_lambda") {
    CHECK(sample_spectral(kPi, 9.0, 1).K() == 3);
    CHECK_THROWS_AS(sample_spectral(1.0, 9.0, 1), EmptySpace);
    for (double L : {0.5, 1.0, 3.0})
        for (double lam : {50.0, 400.0, 1e4}) {
            auto v = sample_spectral(L, lam, 4, 2);
            double s = 0;
            for (double c : v.coeffs) s += c * c;
            CHECK(s * L / 2 == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(v.K() == static_cast<std::size_t>(std::floor(std::sqrt(lam) * L / kPi)));
            auto w = sample_spectral(L, lam, 4, 2, Normalization::Coefficient);
            CHECK(w.coeff_norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    // Nested draws share their leading coefficients up to normalization.
    auto a = sample_spectral(1.0, 100.0, 9, 3), b = sample_spectral(1.0, 1000.0, 9, 3);
    double ra = a.coeffs[0] / b.coeffs[0];
    for (std::size_t k = 0; k < a.K(); ++k) CHECK(a.coeffs[k] / b.coeffs[k] == doctest::Approx(ra));
}

TEST_CASE("evaluation") {
    const double L = 2.0;
    SpectralVector first{L, (kPi / L) * (kPi / L) * 1.01, {1.0}};
    CHECK(std::abs(evaluate(first, L / 2) - 1.0) < 1e-15);
    for (double x : {0.1, 0.7, 1.3}) {
        cplx f = evaluate(first, x), f2 = evaluate(first, x, 2);
        CHECK(std::abs(f2 + (kPi / L) * (kPi / L) * f) < 1e-13);
    }
    auto rng = make_rng(3, 3, 3);
    std::uniform_real_distribution<double> U(0, 1);
    int thrown = 0;
    for (int t = 0; t < 10000; ++t) {
        double lam = 10 + 990 * U(rng);
        auto v = sample_spectral(1.0, lam, 8, t);
        cplx z = std::polar(5 * std::sqrt(U(rng)), 2 * kPi * U(rng));
        try {
            (void)evaluate(v, z);
        } catch (const BoundViolation&) {
            ++thrown;
        }
    }
    CHECK(thrown == 0);
    SpectralVector bad{1.0, 20.0, {10.0}};
    bad.coeffs.push_back(0);
    bad.lambda = 0.01;
    CHECK_THROWS_AS(evaluate(bad, 0.5), BoundViolation);
}

TEST_CASE("second derivative matches finite differences") {
    auto v = sample_spectral(1.0, 900.0, 12, 0);
    const double h = 1e-5;
    for (double x : {0.13, 0.5, 0.77}) {
        double fd = (evaluate(v, x + h) - 2.0 * evaluate(v, x) + evaluate(v, x - h)).real() / (h * h);
        double ex = evaluate(v, x, 2).real();
        double lam_sum = 0;
        for (std::size_t k = 1; k <= v.K(); ++k) lam_sum -= v.coeffs[k - 1] * std::pow(k * kPi, 2) * std::sin(k * kPi * x);
        CHECK(ex == doctest::Approx(lam_sum).epsilon(1e-12));
        CHECK(std::fabs(fd - ex) <= 1e-4 * std::fabs(ex));
    }
}

TEST_CASE("spectral cost") {
    std::vector<double> fine;
    for (int i = 0; i <= 4000; ++i) fine.push_back(i / 4000.0);
    auto lg = log_grid(100.0, 1e4, 5);
    auto flat = spectral_cost_experiment(fine, 1.0, 1.0, 0.0, lg, 10, 1);
    for (const auto& p : flat.curve) CHECK(p.ln_cost < 0.05);
    CHECK(flat.fitted_C < 1e-3);

    const double L = 1.0;
    double lam = (kPi / L) * (kPi / L) * 1.001;
    auto one = spectral_cost_experiment({L / 2}, 1.0, L, 0.0, {lam}, 5, 2);
    CHECK(one.curve[0].K == 1);
    CHECK(one.curve[0].ln_cost == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(one.curve[0].ln_cost < 1e-3);

    CantorLevel E = build_cantor(CantorSpec::gauge_rule(Gauge::h_alpha(0), 0, 1), 8);
    double c = frostman_lower(E, Gauge::h_alpha(0), MassModel::LimitCounting).lower_bound.to_real();
    auto lg9 = log_grid(100.0, 1e4, 9);
    auto cur = spectral_cost_experiment(E.sample_points(), c, 1.0, 0.0, lg9, 20, 5);
    CHECK(cur.violations == 0);
    for (std::size_t i = 1; i < cur.curve.size(); ++i) CHECK(cur.curve[i].ln_cost >= cur.curve[i - 1].ln_cost);
    CHECK(cur.curve.back().ln_cost / cur.curve.front().ln_cost < 1e4 / 100.0);
    auto again = spectral_cost_experiment(E.sample_points(), c, 1.0, 0.0, lg9, 20, 5);
    for (std::size_t i = 0; i < cur.curve.size(); ++i) CHECK(cur.curve[i].ln_cost == again.curve[i].ln_cost);
}

TEST_CASE("content of the best unit subinterval") {
    Gauge h0 = Gauge::h_alpha(0);
    for (double L : {2.0, 3.0}) {
        CantorLevel E = build_cantor(CantorSpec::gauge_rule(h0, 0, L), 6);
        double whole = frostman_lower(E, h0, MassModel::LimitCounting).lower_bound.to_real();
        int m0 = static_cast<int>(std::ceil(L));
        double best = 0;
        for (int j = 0; j < m0; ++j) {
            std::vector<Interval> part;
            for (const auto& iv : E.intervals()) {
                double x = iv.left.approx();
                if (x >= j && x < j + 1) part.push_back(iv);
            }
            if (!part.empty()) best = std::max(best, frostman_lower(part, h0, MassModel::LimitCounting).lower_bound.to_real());
        }
        CHECK(best >= whole / m0);
    }
}

TEST_CASE("Nazarov-Turan") {
    std::vector<ExpTerm> single{{cplx(1.5, -0.5), cplx(-3.0, 7.0)}};
    auto s = nazarov_turan_check(single, 0, 1, {{0.2, 0.3}});
    CHECK(s.ln_ratio <= s.ln_front + 1e-12);
    CHECK(s.needed_C == 0.0);

    std::vector<ExpTerm> trig{{cplx(0, -0.5), cplx(0, 3)}, {cplx(0, 0.5), cplx(0, -3)}, {cplx(1, 0), cplx(0, 11)}};
    auto t = nazarov_turan_check(trig, 0, 1, {{0, 1}});
    CHECK(t.ln_ratio == doctest::Approx(0.0).epsilon(1e-2));
    CHECK(t.ln_ratio < 1e-2);

    auto fit = [](std::size_t first, std::size_t trials) {
        double C = 0;
        for (std::size_t i = first; i < first + trials; ++i) {
            auto rng = make_rng(77, 1, i);
            std::uniform_real_distribution<double> U(0, 1);
            std::vector<ExpTerm> p;
            for (int k = 0; k < 6; ++k)
                p.push_back({std::polar(1.0, 2 * kPi * U(rng)), cplx(-10 + 20 * U(rng), -20 + 40 * U(rng))});
            double a = 0.4 * U(rng), b = 0.5 + 0.45 * U(rng);
            auto r = nazarov_turan_check(p, 0, 1, {{a, a + 0.05}, {b, b + 0.05}}, 4000);
            C = std::max(C, r.needed_C);
        }
        return C;
    };
    // Fitted on one block of 10^3 trials, a fresh block stays within 20%.
    double c3 = fit(0, 1000), fresh = fit(1000, 1000);
    CHECK(std::isfinite(c3));
    CHECK(std::fabs(fresh - c3) <= 0.2 * c3);
}
