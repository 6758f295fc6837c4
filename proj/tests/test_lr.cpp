#include "obslab/errors.hpp"
#include "obslab/fractal.hpp"
#include "obslab/lr.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace obslab;

TEST_CASE("psi inverse and tau closed forms") {
    for (double y = 0.0; y <= 1e6; y = y * 1.7 + 0.01)
        CHECK(psi(psi_inverse(y)) == doctest::Approx(y).epsilon(1e-12));
    // phi(lambda)/(4C) = e at lambda = exp((4Ce)^{3/(2 alpha)}), where tau = 1/e.
    const double alpha = 2, C = 0.1;
    double lam = tau_threshold(alpha, C);
    CHECK(std::log(lam) == doctest::Approx(std::pow(4 * C * std::numbers::e, 0.75)));
    CHECK(tau(lam, alpha, C) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(tau(lam * 0.9, alpha, C), DomainError);
    CHECK(tau(1e8, alpha, C) == doctest::Approx(1 / psi_inverse(std::pow(std::log(1e8), 4.0 / 3) / 0.4)));
}

TEST_CASE("tau flattens against loglog over phi") {
    for (double alpha : {2.0, 3.0}) {
        double lo = 1e300, hi = 0;
        for (double e = 6; e <= 12; e += 0.25) {
            double u = e * std::log(10.0);
            double v = tau_from_ln(u, alpha, 0.1) * std::pow(u, 2 * alpha / 3) / std::log(u);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi / lo - 1 <= 0.05);
    }
}

TEST_CASE("schedule table") {
    LRSchedule s = schedule(1000.0, 2.0, 0.1, 1.0, 200);
    REQUIRE(s.rows.size() == 200);
    CHECK(s.decreasing_from == 1);
    for (std::size_t i = 0; i + 1 < s.rows.size(); ++i) {
        CHECK(s.rows[i + 1].ln_lambda - s.rows[i].ln_lambda == doctest::Approx(std::log(1.25)).epsilon(1e-12));
        CHECK(s.rows[i].tau > 0);
        CHECK(s.rows[i].T > s.rows[i + 1].T);
        CHECK(s.rows[i].ln_f > s.rows[i + 1].ln_f);
        CHECK(s.rows[i].T - s.rows[i + 1].T == doctest::Approx(s.rows[i].tau));
    }
    // The finite sum up to row 200 plus the certified tail exceeds a longer finite sum.
    LRSchedule longer = schedule(1000.0, 2.0, 0.1, 1.0, 2000);
    double partial = 0;
    for (const auto& r : longer.rows) partial += r.tau;
    CHECK(s.rows[0].T >= partial);
    CHECK(s.rows[0].T <= longer.rows[0].T * 1.01);
    // Certified tail against a direct sum of 10^6 terms beyond row 10.
    double direct = 0;
    for (int k = 10; k < 1'000'000; ++k) direct += tau_from_ln(std::log(1000.0) + (k - 1) * std::log(1.25), 2.0, 0.1);
    CHECK(tau_tail_upper(s.rows[8].ln_lambda, 2.0, 0.1) >= direct);
    CHECK(std::isinf(schedule(1000.0, 1.5, 0.1, 1.0, 10).rows[0].T));
}

TEST_CASE("convergence threshold at alpha = 3/2") {
    for (double alpha : {1.6, 2.0, 3.0}) {
        ConvergenceResult r = convergence_test(alpha, 0.1, 1.0, 1000.0);
        CHECK(r.converges);
        CHECK(std::isfinite(r.T1_bound));
        CHECK(r.T1_bound > 0);
    }
    double T1_two = convergence_test(2.0, 0.1, 1.0, 1000.0).T1_bound;
    for (double alpha : {1.0, 1.5}) {
        ConvergenceResult r = convergence_test(alpha, 0.1, 1.0, 1000.0);
        CHECK(!r.converges);
        CHECK(r.target == doctest::Approx(10 * T1_two));
        CHECK(r.integral_lower >= r.target);
        CHECK(r.witness_partial_sum >= r.integral_lower);
    }
    ConvergenceResult big = convergence_test(1.0, 0.1, 1.0, 1000.0, 1e4);
    CHECK(big.integral_lower >= 1e4);
}

TEST_CASE("cost constant") {
    const double alpha = 2, C = 0.1, L = 1, lam1 = 1000;
    double T1 = schedule(lam1, alpha, C, L, 400).rows[0].T;
    CostConstant one = cost_constant(T1, alpha, C, L, lam1, 400, 1e300);
    CHECK(one.N == 1);
    CHECK(one.ln_C_obs.to_double() == doctest::Approx(std::log(2.0) + 1000.0 * tau(1000.0, alpha, C) / 4));

    Tower prev = Tower::from_double(-1e300);
    double prevN = 0;
    for (double T : {0.02, 0.05, 0.1, 0.2, 0.3, 1.0, 10.0}) {
        CostConstant c = cost_constant(T, alpha, C, L, lam1);
        CHECK(c.T_N <= std::min(T, c.T0));
        CHECK(c.T0 < std::exp(-1.0));
        if (prevN > 0) {
            CHECK(c.N <= prevN);
            CHECK(c.ln_C_obs <= prev);
        }
        prev = c.ln_C_obs;
        prevN = c.N;
        if (T == 0.1) {
            CostConstant half = cost_constant(T / 2, alpha, C, L, lam1);
            CHECK(half.N > c.N);
            CHECK(c.ln_C_obs < half.ln_C_obs);
        }
    }
    CHECK_THROWS_AS(cost_constant(1.0, 1.5, C, L, lam1), ParamError);
    CHECK_THROWS_AS(cost_constant(1e-300, alpha, C, L, lam1), NoFeasibleN);
}

TEST_CASE("T0 and the lambda_1 crossover") {
    LRSchedule s = schedule(1000.0, 2.0, 0.1, 1.0, 100);
    double T0 = T0_threshold(s);
    for (const auto& r : s.rows) {
        double b = 0.1 * std::exp(r.ln_lambda) / std::pow(r.ln_lambda, 4.0 / 3);
        double lt = std::log(1 / T0);
        CHECK(lt + b <= lt * b * (1 + 1e-12));
    }
    CHECK_THROWS_AS(T0_threshold(schedule(20.0, 2.0, 0.1, 1.0, 4)), DomainError);

    double a0 = heat_l2_linf_constant(1.0);
    for (double t = 1e-6; t < 10; t *= 3) {
        double sum = 0;
        for (int k = 1; k < 200000; ++k) {
            double term = std::exp(-2 * std::pow(k * std::numbers::pi, 2) * t);
            sum += term;
            if (term < 1e-20) break;
        }
        CHECK(std::pow(t, 0.25) * std::sqrt(2 * sum) <= a0);
    }
    double u = lambda1_crossover(s, a0);
    CHECK(u >= std::log(1000.0));
    CHECK(u < s.rows.back().ln_lambda);
}

TEST_CASE("telescoped recurrence on a Cantor observation set") {
    CantorLevel lv = build_cantor(CantorSpec::gauge_rule(Gauge::h_alpha(0), 0.1, 0.9), 8);
    std::vector<double> E = lv.sample_points();
    double Cl = lr_constant_from_spectral(0.05, 1.0, 0.5, 2.0, 1000.0);
    CHECK(Cl > 0.05 * 4 / 0.25);
    LRSchedule s = schedule(1000.0, 2.0, Cl, 1.0, 40);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        SpectralVector v = sample_spectral(1.0, 400.0, seed);
        TelescopingResult t = telescoping_check(s, v, E, 1, 6);
        CHECK(t.violations == 0);
        CHECK(t.lhs <= t.rhs);
    }
}
