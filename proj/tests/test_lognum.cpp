#include "obslab/lognum.hpp"
#include "obslab/position.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using obslab::LogNum;
using obslab::Position;

TEST_CASE("round trip through the log representation") {
    for (double x : {1.0, -2.5, 1e-300, 3.7e250, -4e-12, 0.0}) {
        double back = LogNum::from_real(x).to_real();
        if (x == 0.0) CHECK(back == 0.0);
        else CHECK(std::fabs(back - x) <= 1e-12 * std::fabs(x));
    }
}

TEST_CASE("field operations agree with doubles") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        double a = u(rng), b = u(rng);
        LogNum A = LogNum::from_real(a), B = LogNum::from_real(b);
        double sum = (A + B).to_real();
        CHECK(std::fabs(sum - (a + b)) <= 1e-10 * (std::fabs(a) + std::fabs(b)));
        CHECK((A * B).to_real() == doctest::Approx(a * b).epsilon(1e-10));
        CHECK((A / B).to_real() == doctest::Approx(a / b).epsilon(1e-10));
        CHECK((a < b) == (A < B));
    }
}

TEST_CASE("magnitudes far outside double range") {
    LogNum tiny = LogNum::from_ln(-1e6);
    LogNum tinier = LogNum::from_ln(-2e6);
    CHECK(tinier < tiny);
    CHECK((tiny + tinier).ln_mag == doctest::Approx(-1e6));
    CHECK((tiny - tiny).is_zero());
    CHECK((tiny * tinier).ln_mag == doctest::Approx(-3e6));
    CHECK(-tiny < tinier);
}

TEST_CASE("positions cancel shared terms exactly") {
    // 1 - e^{-4} + e^{-16} minus (1 - e^{-4}) leaves e^{-16} untouched.
    Position a = Position::constant(1.0) + Position::term(-1.0, -4.0) + Position::term(1.0, -16.0);
    Position b = Position::constant(1.0) + Position::term(-1.0, -4.0);
    LogNum d = obslab::difference(a, b);
    CHECK(d.sign == 1);
    CHECK(d.ln_mag == doctest::Approx(-16.0).epsilon(1e-14));
    Position c = Position::term(1.0, -65536.0);
    CHECK(obslab::difference(a + c, a).ln_mag == doctest::Approx(-65536.0));
}
