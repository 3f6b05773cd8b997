#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oscilla/error.hpp"
#include "oscilla/nonlinearity.hpp"

using namespace oscilla;
using std::numbers::pi;

TEST_CASE("catalog evaluations") {
    CHECK(std::abs(Nonlinearity::power_sin(1)(1.5 * pi)) < 1e-14);
    CHECK(Nonlinearity::pure_sine()(pi / 2) == 1.0);
    // (pi/2)^2 * 2, checked against a 30-digit evaluation: 4.934802200544679309...
    CHECK(Nonlinearity::power_sin(2)(pi / 2) == doctest::Approx(4.934802200544679).epsilon(1e-15));
    CHECK(Nonlinearity::reciprocal_sin(1)(0.0) == 0.0);
    CHECK(Nonlinearity::reciprocal_sin(2)(0.25) == doctest::Approx(0.5 * (1.0 + std::sin(4.0))));
}

TEST_CASE("negative arguments evaluate to f(0)") {
    const auto f = Nonlinearity::table(PiecewiseLinear({{0, 2}, {1, 3}}));
    CHECK(f(-5.0) == 2.0);
    CHECK(f.f0() == 2.0);
}

TEST_CASE("table interpolation and linear extension") {
    const auto f = Nonlinearity::table(PiecewiseLinear({{0, 0}, {1, 2}, {3, -2}}));
    CHECK(f(0.5) == doctest::Approx(1.0));
    CHECK(f(2.0) == doctest::Approx(0.0));
    CHECK(f(4.0) == doctest::Approx(-4.0));
}

TEST_CASE("table validation") {
    CHECK_THROWS_AS(PiecewiseLinear({{0.5, 0}, {1, 1}}), Error);
    CHECK_THROWS_AS(PiecewiseLinear({{0, 0}, {1, 1}, {1, 2}}), Error);
    CHECK_THROWS_AS(Nonlinearity::power_sin(0), Error);
    CHECK_THROWS_AS(Nonlinearity::envelope_sin(PiecewiseLinear({{0, 2}, {1, 1}})), Error);
    CHECK_THROWS_AS(Nonlinearity::envelope_sin(PiecewiseLinear({{0, 0}, {1, 1}})), Error);
}

TEST_CASE("zeros of s(1+sin s)") {
    const auto z = find_zeros(Nonlinearity::power_sin(1), 3);
    REQUIRE(z.alphas.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(z.alphas[k] == doctest::Approx(1.5 * pi + 2 * pi * k).epsilon(1e-14));
}

TEST_CASE("zeros of s^(1/r)(1 + sin(1/s)) toward 0") {
    const auto z = find_zeros(Nonlinearity::reciprocal_sin(1), 2);
    CHECK(z.direction == Direction::Zero);
    CHECK(z.alphas[0] == doctest::Approx(1.0 / (1.5 * pi)).epsilon(1e-13));
    CHECK(z.alphas[1] == doctest::Approx(1.0 / (3.5 * pi)).epsilon(1e-13));
    CHECK(z.alphas[0] == doctest::Approx(0.2122).epsilon(1e-3));
}

TEST_CASE("constant table has no zeros") {
    const auto f = Nonlinearity::table(PiecewiseLinear({{0, 1}, {1, 1}}));
    CHECK_THROWS_AS((void)find_zeros(f, 1), Error);
    try {
        (void)find_zeros(f, 1);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoZerosFound);
    }
}

TEST_CASE("zero sequences are zeros and monotone for every catalog kind") {
    const Nonlinearity kinds[] = {
        Nonlinearity::power_sin(1),
        Nonlinearity::power_sin(2.5),
        Nonlinearity::reciprocal_sin(2),
        Nonlinearity::envelope_sin(PiecewiseLinear({{0, 1}, {10, 3}, {40, 5}})),
        Nonlinearity::pure_sine(),
        Nonlinearity::table(PiecewiseLinear({{0, 1}, {1, -1}, {2, 1}, {3, -1}, {4, 1}, {5, -1}})),
    };
    for (const auto& f : kinds) {
        CAPTURE(f.describe());
        const auto z = find_zeros(f, 5);
        REQUIRE(z.alphas.size() == 5);
        for (std::size_t i = 0; i < z.alphas.size(); ++i) {
            CHECK(std::abs(f(z.alphas[i])) < 1e-9);
            if (i > 0) {
                if (z.direction == Direction::Infinity) CHECK(z.alphas[i] > z.alphas[i - 1]);
                if (z.direction == Direction::Zero) CHECK(z.alphas[i] < z.alphas[i - 1]);
            }
        }
    }
}

TEST_CASE("interval index") {
    const auto z = find_zeros(Nonlinearity::power_sin(1), 4);
    CHECK(z.interval_index(1.0) == 1);
    CHECK(z.interval_index(z.alphas[0]) == 1);
    CHECK(z.interval_index(z.alphas[0] + 1e-9) == 2);
    CHECK(z.interval_index(z.alphas[3] + 1.0) == 0);
}

TEST_CASE("clipping to the positive part") {
    const auto f = Nonlinearity::table(PiecewiseLinear({{0, -1}, {2, 1}})).clipped_below(1.0);
    CHECK(f(0.0) == 0.0);
    CHECK(f(0.5) == 0.0);
    CHECK(f(1.5) == doctest::Approx(0.5));
}
