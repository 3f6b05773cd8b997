#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oscilla/error.hpp"
#include "oscilla/quadrature.hpp"

using namespace oscilla;

TEST_CASE("smooth integrals") {
    CHECK(integrate([](double x) { return std::exp(x); }, 0, 1, 1e-12).value ==
          doctest::Approx(std::exp(1.0) - 1).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sin(x); }, 0, std::numbers::pi, 1e-12).value ==
          doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("tiny and reversed panels") {
    CHECK(integrate([](double) { return 1.0; }, 0, 6.8e-21, 1e-10).value == doctest::Approx(6.8e-21));
    CHECK(integrate([](double x) { return x; }, 1, 0, 1e-12).value == doctest::Approx(-0.5));
    CHECK(integrate([](double) { return 1.0; }, 2, 2, 1e-12).value == 0.0);
}

TEST_CASE("oscillatory tail against the sine integral") {
    // int_x^inf sin(u)/u du = pi/2 - Si(x); Si(1) = 0.946083070367183014941353...
    CHECK(oscillatory_tail(1.0, 1.0, 1e-12) == doctest::Approx(std::numbers::pi / 2 - 0.946083070367183).epsilon(1e-10));
    // int_x^inf u^-2 sin u du at large x behaves like cos(x)/x^2.
    const double x = 1e5;
    CHECK(std::abs(oscillatory_tail(x, 2.0, 1e-12) - std::cos(x) / (x * x)) < 3.0 / (x * x * x));
}
