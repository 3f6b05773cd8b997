#include <doctest.h>

#include <cmath>
#include <random>

#include "oscilla/error.hpp"
#include "oscilla/pucci.hpp"

using namespace oscilla;

namespace {

ShootResult run(const Nonlinearity& f, double Lambda, int N, double c) {
    PucciShootConfig cfg;
    cfg.Lambda = Lambda;
    cfg.N = N;
    cfg.c = c;
    return pucci_shoot(cfg, f);
}

}  // namespace

TEST_CASE("constant source: v = c - Lambda r^2 / (2N)") {
    const auto one = Nonlinearity::table(PiecewiseLinear({{0, 1}, {1, 1}}));
    for (double Lambda : {1.0, 2.0, 3.5}) {
        for (int N : {1, 2, 3}) {
            const auto r = run(one, Lambda, N, 2.0);
            REQUIRE(r.outcome == Outcome::HitZero);
            CHECK(r.rho == doctest::Approx(std::sqrt(2.0 * 2 * N / Lambda)).epsilon(1e-9));
            CHECK(r.q_sign_changes == 0);
        }
    }
}

TEST_CASE("Lambda = 1 reproduces the Laplacian shoot") {
    const auto f = Nonlinearity::power_sin(1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.1, 60.0);
    for (int i = 0; i < 20; ++i) {
        const double c = U(rng);
        const int N = 1 + i % 3;
        ShootConfig sc;
        sc.N = N;
        sc.c = c;
        const auto a = shoot(sc, f);
        const auto b = run(f, 1.0, N, c);
        CAPTURE(c);
        REQUIRE(a.outcome == Outcome::HitZero);
        REQUIRE(b.outcome == Outcome::HitZero);
        CHECK(std::abs(b.rho / a.rho - 1) <= 1e-7);
    }
}

TEST_CASE("pointwise inequality holds for Lambda = 2") {
    const auto f = Nonlinearity::power_sin(1);
    PrimitiveCalculus pc(f, 2.0, 2.0);
    for (double c : {0.5, 3.0, 9.0, 25.0, 50.0}) {
        for (int N : {1, 2, 3}) {
            const auto r = run(f, 2.0, N, c);
            REQUIRE(r.outcome == Outcome::HitZero);
            const auto chk = pucci_inequality_check(r, pc, r.lambda_shoot, 1.0);
            CAPTURE(c);
            CAPTURE(N);
            CHECK(chk.min_slack >= -1e-8);
            CHECK(chk.lower_bound_slack >= -1e-8);
            CHECK(chk.ok);
        }
    }
}

TEST_CASE("rescaling and failures") {
    const auto f = Nonlinearity::power_sin(1);
    const auto r = run(f, 2.0, 2, 3.0);
    REQUIRE(r.outcome == Outcome::HitZero);
    CHECK(pucci_rescale(r, 2.0) == doctest::Approx(r.rho * r.rho / 4.0));
    const auto s = run(f, 2.0, 2, 1.5 * std::numbers::pi);
    CHECK(s.outcome == Outcome::Stalled);
    CHECK_THROWS_AS((void)pucci_rescale(s, 1.0), Error);
}
