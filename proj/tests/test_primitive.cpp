#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "oscilla/error.hpp"
#include "oscilla/primitive.hpp"

using namespace oscilla;
using std::numbers::pi;

namespace {

Nonlinearity one_plus_sin() { return Nonlinearity::envelope_sin(PiecewiseLinear({{0, 1}, {1, 1}})); }
Nonlinearity cosine() {
    return Nonlinearity::function([](double s) { return std::cos(s); }, Direction::Infinity, "cos");
}

std::vector<Nonlinearity> catalog() {
    return {Nonlinearity::power_sin(1),
            Nonlinearity::power_sin(0.5),
            Nonlinearity::reciprocal_sin(2),
            Nonlinearity::envelope_sin(PiecewiseLinear({{0, 1}, {10, 2}, {50, 4}})),
            Nonlinearity::pure_sine(),
            Nonlinearity::table(PiecewiseLinear({{0, 0.5}, {1, -1}, {3, 2}, {4, -0.5}}))};
}

}  // namespace

TEST_CASE("closed-form primitives") {
    PrimitiveCalculus a(one_plus_sin());
    CHECK(a.F(2 * pi) == doctest::Approx(2 * pi).epsilon(1e-10));

    PrimitiveCalculus zero(Nonlinearity::table(PiecewiseLinear({{0, 0}, {1, 0}})));
    CHECK(zero.F(7.3) == 0.0);

    PrimitiveCalculus b(Nonlinearity::power_sin(1));
    CHECK(b.F(10) == doctest::Approx(50 + std::sin(10.0) - 10 * std::cos(10.0)).epsilon(1e-10));
    CHECK(b.F(10) == doctest::Approx(57.8467).epsilon(1e-5));
    CHECK(b.F(0) == 0.0);

    // 30-digit quadrature of s^2 (1 + sin s) on [0, 10].
    PrimitiveCalculus c(Nonlinearity::power_sin(2));
    CHECK(c.F(10) == doctest::Approx(402.68192096503827739).epsilon(1e-10));
}

TEST_CASE("reciprocal oscillation against high-precision quadrature") {
    // s^{3/2}/(3/2) + int_{1/s}^inf u^{-5/2} sin u du, evaluated to 30 digits.
    PrimitiveCalculus pc(Nonlinearity::reciprocal_sin(2), 1.5);
    CHECK(pc.F(0.05) == doctest::Approx(0.0077384491127811668937).epsilon(1e-10));
    CHECK(pc.F(0.2) == doctest::Approx(0.057763387936859000256).epsilon(1e-10));
    CHECK(pc.F(1.0) == doctest::Approx(1.1043470192044665642).epsilon(1e-10));
}

TEST_CASE("running range primitive") {
    PrimitiveCalculus cs(cosine());
    CHECK(cs.F(2 * pi) == doctest::Approx(0.0).epsilon(1e-10).scale(1.0));
    CHECK(cs.Fbar(2 * pi) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(cs.Fbar(0) == 0.0);

    PrimitiveCalculus pos(Nonlinearity::power_sin(1));
    for (double s : {0.3, 4.0, 17.0, 123.4}) CHECK(pos.Fbar(s) == doctest::Approx(pos.F(s)).epsilon(1e-12));
}

TEST_CASE("sign-split primitive") {
    PrimitiveCalculus sn(Nonlinearity::pure_sine(), 2.0, 2.0);
    CHECK(sn.Fplus(2 * pi) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(sn.Fminus(2 * pi) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(sn.F_Lambda(2 * pi) == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(sn.Fbar_Lambda(2 * pi) >= 0.0);

    PrimitiveCalculus pos(Nonlinearity::power_sin(1), 2.0, 3.0);
    for (double s : {1.0, 9.0, 40.0}) CHECK(pos.F_Lambda(s) == doctest::Approx(pos.F(s)).epsilon(1e-12));
}

TEST_CASE("lower primitive") {
    PrimitiveCalculus sn(Nonlinearity::pure_sine());
    CHECK(sn.Funder(pi, 2 * pi) == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(sn.Funder(0, 2.5) == doctest::Approx(sn.F(2.5)).epsilon(1e-12));
    CHECK_THROWS_AS((void)sn.Funder(2, 1), Error);

    PrimitiveCalculus pos(Nonlinearity::power_sin(1));
    for (double s : {1.0, 5.0, 30.0}) CHECK(std::abs(pos.Funder(s, s)) < 1e-10 * (1 + pos.F(s)));
}

TEST_CASE("running range invariants on a grid") {
    for (const auto& f : catalog()) {
        CAPTURE(f.describe());
        PrimitiveCalculus pc(f);
        const double top = f.direction() == Direction::Zero ? 1.0 : 60.0;
        double prev_max = 0.0, prev_min = 0.0, grid_min = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double s = top * i / 400.0;
            const auto v = pc.values(s);
            const double fb = pc.Fbar(s);
            const double tol = 1e-12 * (1 + std::abs(v.F) + fb);
            CHECK(fb >= 0.0);
            CHECK(fb >= pc.F(s) - 1e-12);
            CHECK(v.max_F >= prev_max - tol);
            CHECK(v.min_F <= prev_min + tol);
            grid_min = std::min(grid_min, v.F);
            CHECK(fb >= v.F - grid_min - tol);
            prev_max = v.max_F;
            prev_min = v.min_F;
        }
    }
}

TEST_CASE("F equals F+ minus F- at random points") {
    std::mt19937_64 rng(7);
    for (const auto& f : catalog()) {
        CAPTURE(f.describe());
        PrimitiveCalculus pc(f);
        const double top = f.direction() == Direction::Zero ? 1.0 : 200.0;
        std::uniform_real_distribution<double> U(0.0, top);
        for (int i = 0; i < 100; ++i) {
            const double s = U(rng);
            const auto v = pc.values(s);
            const double scale = std::max({std::abs(v.F), v.Fplus, v.Fminus, 1e-300});
            CHECK(std::abs(v.F - (v.Fplus - v.Fminus)) <= 1e-8 * scale);
        }
    }
}

TEST_CASE("Lambda = 1 collapses F_Lambda to F") {
    for (const auto& f : catalog()) {
        CAPTURE(f.describe());
        PrimitiveCalculus pc(f, 2.0, 1.0);
        const double top = f.direction() == Direction::Zero ? 1.0 : 60.0;
        for (int i = 0; i <= 200; ++i) {
            const double s = top * i / 200.0;
            CHECK(std::abs(pc.F_Lambda(s) - pc.F(s)) <= 1e-10 * (1 + std::abs(pc.F(s))));
            CHECK(std::abs(pc.Fbar_Lambda(s) - pc.Fbar(s)) <= 1e-10 * (1 + std::abs(pc.F(s))));
        }
    }
}

TEST_CASE("lower primitive is dominated by every admissible integral") {
    std::mt19937_64 rng(11);
    for (const auto& f : catalog()) {
        CAPTURE(f.describe());
        PrimitiveCalculus pc(f);
        const double top = f.direction() == Direction::Zero ? 1.0 : 60.0;
        std::uniform_real_distribution<double> U(0.0, top);
        for (int k = 0; k < 5; ++k) {
            double s1 = U(rng), s2 = U(rng);
            if (s1 > s2) std::swap(s1, s2);
            const double fu = pc.Funder(s1, s2);
            const double tol = 1e-10 * (1 + std::abs(pc.F(s2)) + std::abs(pc.running_max(s1)));
            CHECK(fu <= pc.F(s2) + tol);
            std::uniform_real_distribution<double> T(0.0, s1);
            for (int j = 0; j < 20; ++j) {
                const double t = T(rng);
                CHECK(fu <= pc.F(s2) - pc.F(t) + tol);
            }
        }
    }
}

TEST_CASE("concurrent evaluation matches serial") {
    PrimitiveCalculus shared(Nonlinearity::power_sin(1));
    std::vector<double> xs;
    for (int i = 1; i <= 400; ++i) xs.push_back(2.5 * i);
    std::vector<double> par(xs.size());
    std::vector<std::thread> pool;
    for (int t = 0; t < 4; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < xs.size(); i += 4) par[i] = shared.F(xs[xs.size() - 1 - i]);
        });
    }
    for (auto& th : pool) th.join();
    PrimitiveCalculus serial(Nonlinearity::power_sin(1));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(par[i] == doctest::Approx(serial.F(xs[xs.size() - 1 - i])).epsilon(1e-12));
    }
}
