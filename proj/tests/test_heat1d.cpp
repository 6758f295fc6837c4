#include "obslab/errors.hpp"
#include "obslab/fractal.hpp"
#include "obslab/heat1d.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace obslab;

namespace {
constexpr double kPi = std::numbers::pi;

SpectralVector mode(int n, double L = 1.0) {
    SpectralVector v;
    v.L = L;
    v.coeffs.assign(n, 0.0);
    v.coeffs[n - 1] = 1.0;
    v.lambda = std::pow(n * kPi / L, 2);
    return v;
}
}  // namespace

TEST_CASE("tower canonical form and ordering") {
    Tower a = Tower::from_double(90.0);
    CHECK(a.height == 0);
    Tower e = Tower::exp_of(Tower::from_double(800.0));
    CHECK(e.height == 1);
    CHECK(e.x == 800.0);
    CHECK(e.log().to_double() == 800.0);
    Tower ee = Tower::exp_of(Tower::from_double(1e300));
    CHECK(ee.height == 1);
    Tower eee = Tower::exp_of(ee);
    CHECK(eee.height == 2);
    CHECK(a < e);
    CHECK(e < ee);
    CHECK(ee < eee);
    CHECK(-eee < -ee);
    CHECK(Tower::exp_of(Tower::from_double(3.0)).to_double() == doctest::Approx(std::exp(3.0)));
    CHECK(e.scaled(std::exp(2.0)).x == doctest::Approx(802.0));
}

TEST_CASE("heat semigroup on log coefficients") {
    SpectralVector v = sample_spectral(1.0, 900.0, 7);
    HeatState s0 = heat_solution(v, 0.0);
    for (std::size_t i = 0; i < v.K(); ++i)
        CHECK(s0.ln_coeff[i] == doctest::Approx(std::log(std::fabs(v.coeffs[i]))).epsilon(1e-15));
    HeatState a = heat_solution(heat_solution(v, 0.3), 0.45), b = heat_solution(v, 0.75);
    for (std::size_t i = 0; i < v.K(); ++i) CHECK(std::fabs(a.ln_coeff[i] - b.ln_coeff[i]) <= 1e-12);

    HeatState m = heat_solution(mode(3), 0.2);
    CHECK(m.ln_coeff[2] == doctest::Approx(-9 * kPi * kPi * 0.2));
    HeatState far = heat_solution(mode(3), 1e6);
    CHECK(std::isfinite(far.ln_coeff[2]));

    double lam1 = kPi * kPi;
    for (double t : {0.01, 0.1, 1.0})
        CHECK(heat_solution(v, t).l2_norm().ln_mag <= s0.l2_norm().ln_mag - lam1 * t + 1e-12);
    CHECK(s0.l2_norm().to_real() == doctest::Approx(v.l2_norm()));
}

TEST_CASE("observability ratio for a single mode on [0,1]") {
    for (int n : {1, 2, 3}) {
        std::vector<double> E{1.0 / (2 * n)};
        for (int i = 0; i <= 200; ++i) E.push_back(i / 200.0);
        for (double T : {0.05, 1.0}) {
            double a = n * n * kPi * kPi;
            double expected = std::log(std::exp(-a * T) / std::sqrt(2.0)) - std::log(-std::expm1(-a * T) / a);
            auto r = observability_ratio(mode(n), T, E);
            CHECK(!r.zero_observation);
            CHECK(r.ratio.ln_mag == doctest::Approx(expected).epsilon(1e-5));
        }
    }
}

TEST_CASE("nodal observation point gives an infinite ratio") {
    auto r = observability_ratio(mode(2), 1.0, {0.5});
    CHECK(r.zero_observation);
    CHECK(std::isinf(r.ratio.ln_mag));
    CHECK(r.ratio.ln_mag > 0);
}

TEST_CASE("observability on an h_0 Cantor set") {
    CantorLevel lv = build_cantor(CantorSpec::gauge_rule(Gauge::h_alpha(0)), 6);
    std::vector<double> E = lv.sample_points();
    SpectralVector v = sample_spectral(1.0, 400.0, 11);
    auto a = observability_ratio(v, 1.0, E, 16);
    auto b = observability_ratio(v, 1.0, E, 256);
    CHECK(std::isfinite(a.ratio.ln_mag));
    CHECK(std::fabs(a.ratio.ln_mag - b.ratio.ln_mag) <= 1e-5);

    SpectralVector w = v;
    for (double& c : w.coeffs) c *= -37.5;
    auto c = observability_ratio(w, 1.0, E, 16);
    CHECK(c.ratio.ln_mag == doctest::Approx(a.ratio.ln_mag).epsilon(1e-10));
    CHECK_THROWS_AS(observability_ratio(v, 0.0, E), ParamError);
}

TEST_CASE("counterexample parameters") {
    EInfSpec s = build_counterexample(1.0, 4);
    CHECK(s.eps2 == 0.25);
    CHECK(s.eps1 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::fabs(3 * 0.75 - (2 + s.eps1)) <= 1e-12);
    CHECK(s.N == 5);
    CHECK(s.level(1).ln_q.to_double() == doctest::Approx(std::log(4.0)));
    CHECK(std::fabs(s.level(2).ln_q.to_double() - std::pow(4.0, 3.25)) <= 1e-9);
    CHECK(s.level(1).ln_length.to_double() == doctest::Approx(-std::pow(4.0, 2.25)));
    CHECK(s.level(3).ln_q.height == 0);
    CHECK(s.level(4).ln_q.height == 1);

    for (int k = 1; k <= 4; ++k) {
        const EInfLevel& lv = s.level(k);
        CHECK(s.value(lv.ln_J_rec - lv.ln_Jp_rec).sign >= 0);
        CHECK(s.value(lv.ln_Jp_rec - lv.ln_Jp_lower).to_double() == doctest::Approx(std::log(1.5)));
        CHECK(s.value(lv.ln_J_upper - lv.ln_J_rec).to_double() == doctest::Approx(std::log(2.0)));
    }
    // J_1 = q_1, J'_1 = q_1 - 1.
    CHECK(s.value(s.level(1).ln_J_rec).to_double() == doctest::Approx(std::log(4.0)));
    CHECK(s.value(s.level(1).ln_Jp_rec).to_double() == doctest::Approx(std::log(3.0)));

    for (double eps : {0.1, 0.5, 2.0, 7.0}) {
        EInfSpec t = build_counterexample(eps, 3);
        CHECK(t.eps1 > 0);
        CHECK(t.eps1 < eps);
        CHECK(t.eps2 < eps / 3);
    }
    CHECK_THROWS_AS(build_counterexample(0.0, 2), ParamError);
    CHECK_THROWS_AS(build_counterexample(1.0, 0), ParamError);
    CHECK(!s.to_json().empty());
}

TEST_CASE("counterexample ratio decays for k >= 2") {
    EInfSpec s = build_counterexample(1.0, 6);
    double q = 4, p = 2.25;
    double expected1 = -std::log(kPi * q) - std::pow(q, p) + q * q * kPi * kPi + 0.5 * std::log(2.0);
    CHECK(counterexample_ratio(s, 1, 1.0).to_double() == doctest::Approx(expected1).epsilon(1e-12));
    CHECK(expected1 == doctest::Approx(133.10).epsilon(1e-4));

    Tower r2 = counterexample_ratio(s, 2, 1.0);
    CHECK(r2.sign < 0);
    CHECK(std::log(-r2.to_double()) == doctest::Approx(p * std::pow(4.0, 3.25)).epsilon(1e-9));
    CHECK(r2.to_double() < -1e6);
    for (int k = 2; k < 6; ++k) CHECK(counterexample_ratio(s, k + 1, 1.0) < counterexample_ratio(s, k, 1.0));
    CHECK_THROWS_AS(counterexample_ratio(s, 7, 1.0), ParamError);
}

TEST_CASE("content sums along the levels") {
    EInfSpec s = build_counterexample(1.0, 6);
    Tower prev_mu;
    for (int k = 1; k <= 6; ++k) {
        EInfContent c = einf_content_report(s, k, 1.0);
        CHECK(c.ln_f0_sum <= c.ln_f0_bound);
        CHECK(c.ln_h_gap.sign > 0);
        if (k <= 2) CHECK(c.ln_h_sum < c.ln_f0_sum);
        CHECK(c.ln_f_eps_lower.sign >= 0);
        if (k > 1) CHECK(c.ln_mu < prev_mu);
        prev_mu = c.ln_mu;
    }
    EInfContent c1 = einf_content_report(s, 1, 1.0);
    // (J_1 + 1) f_0(e^{-4^{2.25}}) with J_1 <= 8.
    CHECK(c1.ln_f0_sum.to_double() == doctest::Approx(std::log(9.0) - 1.125 * std::log(4.0)));
    CHECK(c1.ln_f_eps_lower.to_double() == doctest::Approx(std::log(3.0) - 0.75 * std::log(4.0)));
    CHECK(einf_content_report(s, 2, 1.0).ln_f_eps_lower.to_double() == doctest::Approx(std::log(1.5)));
}
