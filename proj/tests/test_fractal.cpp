#include "obslab/errors.hpp"
#include "obslab/fractal.hpp"

#include <doctest.h>

#include <cmath>

using namespace obslab;

namespace {
const double kLn2 = std::log(2.0);
CantorSpec h0_spec(double a = 0, double b = 1) { return CantorSpec::gauge_rule(Gauge::h_alpha(0), a, b); }
}  // namespace

TEST_CASE("h_0 rule gives c_k = e^{-4^k}") {
    CantorLevel d1 = build_cantor(h0_spec(), 1);
    REQUIRE(d1.count() == 2);
    CHECK(d1.left(0).approx() == 0.0);
    CHECK(d1.right(0).approx() == doctest::Approx(std::exp(-4.0)));
    CHECK(d1.left(1).approx() == doctest::Approx(1 - std::exp(-4.0)));
    CHECK(d1.right(1).approx() == doctest::Approx(1.0));

    CantorLevel d0 = build_cantor(h0_spec(), 0);
    CHECK(d0.count() == 1);
    CHECK(d0.right(0).approx() == 1.0);

    CantorLevel d3 = build_cantor(h0_spec(), 3);
    CHECK(d3.count() == 8);
    CHECK(d3.ln_length() == doctest::Approx(-64.0).epsilon(1e-13));
}

TEST_CASE("nesting of consecutive levels") {
    CantorLevel lo = build_cantor(h0_spec(), 3), hi = build_cantor(h0_spec(), 4);
    for (std::size_t j = 0; j < hi.count(); ++j) {
        std::size_t parent = j / 2;
        CHECK(difference(hi.left(j), lo.left(parent)).sign >= 0);
        CHECK(difference(lo.right(parent), hi.right(j)).sign >= 0);
    }
}

TEST_CASE("content upper bounds") {
    Gauge h0 = Gauge::h_alpha(0);
    for (int k = 1; k <= 20; ++k) {
        CantorLevel lv = build_cantor(h0_spec(), k);
        CHECK(std::fabs(content_upper(lv, h0).ln_mag) <= 1e-10);
    }
    const double delta = 0.5;
    for (int k = 1; k <= 6; ++k) {
        CantorLevel lv = build_cantor(h0_spec(), k);
        double expected = k * kLn2 - delta * std::ldexp(1.0, 2 * k);
        CHECK(content_upper(lv, Gauge::power(delta)).ln_mag == doctest::Approx(expected).epsilon(1e-12));
    }
    CantorLevel one = build_cantor(CantorSpec::explicit_rule({}, 0, std::exp(-4.0)), 0);
    CHECK(content_upper(one, h0).to_real() == doctest::Approx(0.5));
}

TEST_CASE("separation is enforced") {
    CHECK_THROWS_AS(build_cantor(CantorSpec::explicit_rule({std::log(0.4), std::log(0.25)}), 2),
                    SeparationError);
    CHECK_NOTHROW(build_cantor(CantorSpec::explicit_rule({std::log(0.4), std::log(0.19)}), 2));
}

TEST_CASE("Frostman certificate for the h_0 Cantor set") {
    Gauge h0 = Gauge::h_alpha(0);
    CantorLevel lv = build_cantor(h0_spec(), 8);
    FrostmanCertificate c = frostman_lower(lv, h0);
    CHECK(c.lower_bound.to_real() >= 0.25 - 0.05);
    CHECK(c.lower_bound <= content_upper(lv, h0));
    CHECK(c.total_mass == doctest::Approx(1.0));
    CHECK(!c.worst_balls.empty());
}

TEST_CASE("Frostman certificate, simple cases") {
    Gauge lin = Gauge::power(1);
    CantorLevel unit = build_cantor(CantorSpec::explicit_rule({}), 0);
    FrostmanCertificate c = frostman_lower(unit, lin, MassModel::Uniform);
    CHECK(c.A2_hat.to_real() <= 1 + 1e-9);
    CHECK(c.lower_bound.to_real() >= 1 - 1e-9);

    double ln_c = -7.0;
    CantorLevel single = build_cantor(CantorSpec::explicit_rule({}, 0, std::exp(ln_c)), 0);
    Gauge h0 = Gauge::h_alpha(0);
    FrostmanCertificate s = frostman_lower(single, h0);
    CHECK(s.A2_hat.ln_mag == doctest::Approx(-h0.ln_eval(ln_c)).epsilon(1e-12));
    CHECK(s.lower_bound.ln_mag == doctest::Approx(h0.ln_eval(ln_c)).epsilon(1e-12));
}

TEST_CASE("sandwich and translation invariance across depths") {
    for (double alpha : {0.0, 1.0}) {
        Gauge g = Gauge::h_alpha(alpha);
        for (int k = 4; k <= 7; ++k) {
            CantorLevel lv = build_cantor(h0_spec(), k);
            CantorLevel moved = build_cantor(h0_spec(3.5, 4.5), k);
            auto c0 = frostman_lower(lv, g), c1 = frostman_lower(moved, g);
            CHECK(c0.lower_bound <= content_upper(lv, g));
            CHECK(c1.lower_bound.ln_mag == doctest::Approx(c0.lower_bound.ln_mag).epsilon(1e-9));
            CHECK(content_upper(moved, g).ln_mag == doctest::Approx(content_upper(lv, g).ln_mag));
        }
    }
}

TEST_CASE("thickness of periodic sets") {
    Gauge h0 = Gauge::h_alpha(0);
    CantorLevel lv = build_cantor(h0_spec(), 8);
    PeriodicSet full{{lv}};
    std::vector<double> xs;
    for (int i = 0; i < 16; ++i) xs.push_back(-3.0 + i * 0.37);
    auto rep = thickness_report(full, h0, 2.0, xs);
    CHECK(rep.gamma_hat >= (0.25 - 0.05) / 2);

    PeriodicSet sparse{{lv, std::nullopt}};
    CHECK(thickness_report(sparse, h0, 1.0, {1.0}).gamma_hat == 0.0);

    const double gamma = 0.3;
    CantorLevel seg = build_cantor(CantorSpec::explicit_rule({}, 0.0, gamma), 0);
    PeriodicSet stripes{{seg}, MassModel::Uniform};
    auto st = thickness_report(stripes, Gauge::power(1), 1.0, {0.0, 0.1, 0.25, 0.5, 0.9});
    CHECK(st.gamma_hat == doctest::Approx(gamma).epsilon(1e-9));
    for (double v : st.per_window) CHECK(v == doctest::Approx(gamma).epsilon(1e-9));
}
