// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oscilla/diagram.hpp"
#include "oscilla/pucci.hpp"
#include "oscilla/shoot.hpp"
#include "oscilla/thresholds.hpp"
#include "oscilla/variational.hpp"

using namespace oscilla;
using std::numbers::pi;

namespace {

struct Outcome_ {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Nonlinearity identity() { return Nonlinearity::table(PiecewiseLinear({{0, 0}, {1, 1}})); }
Nonlinearity constant_one() { return Nonlinearity::table(PiecewiseLinear({{0, 1}, {1, 1}})); }

// Solutions gathered by criteria 3 and 4 for the necessary-condition audit.
std::vector<DiagramPoint> audited;

void collect(const BifurcationDiagram& d, const std::vector<Crossing>& cr) {
    for (const auto& p : d.points) {
        if (p.outcome == Outcome::HitZero) audited.push_back(p);
    }
    for (const auto& c : cr) audited.push_back(c.point);
}

Outcome_ oracle_shooting() {
    double worst = 0.0;
    auto rel = [&](const ShootResult& r, double exact, double tol) {
        if (r.outcome != Outcome::HitZero) return false;
        const double e = std::abs(r.rho / exact - 1);
        worst = std::max(worst, e);
        return e <= tol;
    };
    ShootConfig a;
    a.c = 1.0;
    ShootConfig b = a;
    b.N = 3;
    ShootConfig c = a;
    c.p = 3.0;
    const bool ok = rel(shoot(a, identity()), pi / 2, 1e-7) && rel(shoot(b, constant_one()), std::sqrt(6.0), 1e-7) &&
                    rel(shoot(c, constant_one()), std::pow(1.5, 2.0 / 3.0), 1e-6);
    return {ok, fmt("worst relative rho error %.2e", worst)};
}

Outcome_ energy_identity() {
    const auto f = Nonlinearity::power_sin(1);
    const auto grid = make_c_grid(0.1, 60, 500, false);
    double worst = 0.0;
    std::size_t hits = 0, shots = 0;
    for (double p : {2.0, 3.0}) {
        PrimitiveCalculus pc(f, p);
        for (int N : {1, 2, 3}) {
            for (double c : grid) {
                ShootConfig cfg;
                cfg.p = p;
                cfg.N = N;
                cfg.c = c;
                const auto r = shoot(cfg, f);
                ++shots;
                if (r.outcome != Outcome::HitZero) continue;
                ++hits;
                worst = std::max(worst, energy_residual(r, pc, r.lambda_shoot));
            }
        }
    }
    return {hits > 0 && worst <= 1e-6, fmt("%zu/%zu trajectories hit zero, worst residual %.2e", hits, shots, worst)};
}

Outcome_ growing_heights() {
    const auto f = Nonlinearity::power_sin(1);
    const auto rep = analyze(f, OperatorSpec::plap(2), 1, 1.0);
    if (!rep.existence_available) return {false, "existence sequence unavailable: " + rep.existence_note};
    const double lambda_star = 10 * rep.lambda_bar.value;
    PrimitiveCalculus pc(f, 2.0);
    const auto z = find_zeros(f, 12);
    DiagramConfig cfg;
    const auto d = diagram(f, pc, cfg, cluster_near_zeros(make_c_grid(0.1, 60, 400, false), z, 8), z);
    const auto cr = find_crossings(d, f, pc, lambda_star);
    collect(d, cr);
    std::map<int, double> top;
    for (const auto& c : cr) {
        if (c.point.zero_interval_index > 0) top[c.point.zero_interval_index] = std::max(top[c.point.zero_interval_index], c.point.c);
    }
    bool increasing = true;
    double prev = 0.0;
    for (const auto& [n, h] : top) {
        increasing = increasing && h > prev;
        prev = h;
    }
    return {top.size() >= 5 && increasing,
            fmt("lambda_bar %.4f, lambda* %.3f: %zu solutions in %zu distinct intervals, top height %.3f", rep.lambda_bar.value,
                lambda_star, cr.size(), top.size(), prev)};
}

Outcome_ threshold_witness() {
    const auto f = Nonlinearity::power_sin(1);
    const double lambda_under = lambda_under_plap(2, 1, 0.5, 0.5);
    PrimitiveCalculus pc(f, 2.0);
    const auto z = find_zeros(f, 1600);
    // Log-spaced scan plus about eighty whole zero intervals, each sampled
    // from end to end, spread geometrically over the c range.
    std::vector<double> grid = make_c_grid(10, 1e4, 2000, true);
    const int n0 = z.interval_index(10.0), n1 = z.interval_index(1e4);
    std::set<int> picked;
    for (int k = 0; k < 80; ++k) picked.insert(static_cast<int>(std::lround(n0 * std::pow(double(n1) / n0, k / 79.0))));
    for (int n : picked) {
        const double lo = n == 1 ? 0.0 : z.alphas[n - 2], hi = z.alphas[n - 1];
        for (double t : {1e-4, 1e-3, 0.01, 0.05, 0.15, 0.3, 0.5, 0.7, 0.85, 0.95, 0.99, 0.999, 1 - 1e-4}) {
            const double c = lo + (hi - lo) * t;
            if (c >= 10 && c <= 1e4) grid.push_back(c);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    DiagramConfig cfg;
    const auto d = diagram(f, pc, cfg, grid, z);
    std::vector<Crossing> all;
    for (double ls : {2.0, 3.0, 5.0, 10.0}) {
        const auto cr = find_crossings(d, f, pc, ls);
        all.insert(all.end(), cr.begin(), cr.end());
    }
    collect(d, all);
    std::size_t below = 0, bound_fail = 0;
    double cmin = INFINITY, cmax = 0, lmin = INFINITY;
    for (const auto& c : all) {
        const double bound = per_solution_lower_bound(pc, c.point.c, 2.0, 1.0);
        if (c.point.lambda < lambda_under - 1e-6) ++below;
        if (c.point.lambda < bound - 1e-8) ++bound_fail;
        cmin = std::min(cmin, c.point.c);
        cmax = std::max(cmax, c.point.c);
        lmin = std::min(lmin, c.point.lambda);
    }
    std::size_t hits = 0, hit_below = 0;
    for (const auto& p : d.points) {
        if (p.outcome != Outcome::HitZero) continue;
        ++hits;
        if (p.lambda < lambda_under - 1e-6 || p.lambda < p.lower_bound - 1e-8) ++hit_below;
        lmin = std::min(lmin, p.lambda);
    }
    const bool ok = !all.empty() && below == 0 && bound_fail == 0 && hit_below == 0;
    return {ok, fmt("lambda_under %.6f; %zu crossings over c in [%.1f, %.1f], %zu grid solutions; min lambda %.4f; "
                    "%zu below threshold, %zu per-solution bound failures",
                    lambda_under, all.size(), cmin, cmax, hits, lmin, below + hit_below, bound_fail)};
}

Outcome_ necessary_conditions() {
    PrimitiveCalculus pc(Nonlinearity::power_sin(1), 2.0);
    std::size_t fail_sign = 0, fail_area = 0;
    for (const auto& p : audited) {
        const auto v = pc.values(p.c);
        if (v.F < -1e-8) ++fail_sign;
        if (v.F - v.max_F < -1e-8 || !p.area_ok) ++fail_area;
    }
    return {!audited.empty() && fail_sign == 0 && fail_area == 0,
            fmt("%zu solutions audited, %zu sign failures, %zu area failures", audited.size(), fail_sign, fail_area)};
}

Outcome_ pucci_consistency() {
    const auto f = Nonlinearity::power_sin(1);
    PrimitiveCalculus pc2(f, 2.0, 2.0);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0.1, 60.0);
    std::uniform_int_distribution<int> D(1, 3);
    double worst_match = 0.0, worst_slack = INFINITY;
    std::size_t compared = 0, checked = 0;
    bool outcomes_agree = true;
    for (int i = 0; i < 50; ++i) {
        const double c = U(rng);
        const int N = D(rng);
        ShootConfig sc;
        sc.N = N;
        sc.c = c;
        const auto a = shoot(sc, f);
        PucciShootConfig pc;
        pc.N = N;
        pc.c = c;
        pc.Lambda = 1.0;
        const auto b = pucci_shoot(pc, f);
        outcomes_agree = outcomes_agree && a.outcome == b.outcome;
        if (a.outcome == Outcome::HitZero && b.outcome == Outcome::HitZero) {
            ++compared;
            worst_match = std::max(worst_match, std::abs(b.rho / a.rho - 1));
        }
        pc.Lambda = 2.0;
        const auto l2 = pucci_shoot(pc, f);
        if (l2.outcome == Outcome::HitZero) {
            ++checked;
            worst_slack = std::min(worst_slack, pucci_inequality_check(l2, pc2, l2.lambda_shoot, 1.0).min_slack);
        }
    }
    const auto rep = analyze(f, OperatorSpec::plap(2), 1, 1.0);
    const double a = lambda_under_pucci(1.0, 1.0, rep.limits.L_minus, rep.limits.L_plus);
    const double b = lambda_under_plap(2.0, 1.0, rep.limits.L_minus, rep.limits.L_plus);
    const bool ok = outcomes_agree && compared == 50 && worst_match <= 1e-7 && checked > 0 && worst_slack >= -1e-8 &&
                    a == b;
    return {ok, fmt("%zu matched shoots, worst rho mismatch %.2e; %zu Lambda=2 trajectories, min slack %.2e; "
                    "thresholds %.12g vs %.12g",
                    compared, worst_match, checked, worst_slack, a, b)};
}

Outcome_ variational_mechanism() {
    TruncatedNonlinearity lin(Nonlinearity::function([](double) { return 1.0; }, Direction::Infinity, "one"), 10.0, 256);
    const auto pot = Potential::p_laplacian(2);
    std::vector<double> errs;
    for (std::size_t J : {20, 40, 80, 160}) {
        const auto m = minimize(lin, pot, 1.0, RadialGrid::uniform(1.0, J), 1);
        errs.push_back(std::abs(radial_energy(m.u, lin, pot, 1.0) + 1.0 / 6.0));
    }
    double order = INFINITY;
    for (std::size_t i = 1; i < errs.size(); ++i) order = std::min(order, std::log2(errs[i - 1] / errs[i]));

    const auto f = Nonlinearity::power_sin(1);
    const auto rep = analyze(f, OperatorSpec::plap(2), 1, 1.0);
    const auto& t3 = rep.sequence.at(2);
    const double alpha3 = rep.zeros.alphas.at(2);
    const double lambda = 2 * t3.lambda;
    TruncatedNonlinearity tn(f, alpha3);
    const auto grid = RadialGrid::uniform(1.0, 400);
    const auto neg = negativity_test(tn, pot, lambda, t3.gamma, t3.delta, grid, 1);
    const auto m = minimize(tn, pot, lambda, grid, 1);
    bool in_box = true;
    for (double v : m.u.u) in_box = in_box && v >= 0.0 && v <= alpha3;
    const double sup = m.u.sup_norm();
    const bool nontrivial = sup > 0.01 * alpha3 && m.energy < 0.0;
    ShootConfig sc;
    sc.c = sup;
    const auto s = shoot(sc, f);
    const double bridge = s.outcome == Outcome::HitZero ? std::abs(rescale_to_ball(s, 1.0, 2.0) / lambda - 1) : INFINITY;
    const bool ok = order >= 1.9 && neg.negative && in_box && nontrivial && m.converged && bridge <= 0.02;
    return {ok, fmt("energy order %.3f; lambda %.4f: I(w) %.4g, minimizer height %.6f of %.6f, energy %.4g; "
                    "bridge mismatch %.2e",
                    order, lambda, neg.energy, sup, alpha3, m.energy, bridge)};
}

Outcome_ primitive_calculus() {
    double worst = 0.0;
    auto check = [&](double got, double want) {
        const double e = std::abs(got - want) / std::max(1.0, std::abs(want));
        worst = std::max(worst, e);
        return e <= 1e-8;
    };
    bool ok = true;
    PrimitiveCalculus one_plus(Nonlinearity::envelope_sin(PiecewiseLinear({{0, 1}, {1, 1}})));
    ok &= check(one_plus.F(2 * pi), 2 * pi);
    PrimitiveCalculus zero(Nonlinearity::table(PiecewiseLinear({{0, 0}, {1, 0}})));
    ok &= check(zero.F(3.7), 0.0);
    PrimitiveCalculus ps(Nonlinearity::power_sin(1), 2.0, 2.0);
    ok &= check(ps.F(10), 50 + std::sin(10.0) - 10 * std::cos(10.0));
    for (double s : {0.5, 5.0, 25.0}) {
        ok &= check(ps.Fbar(s), ps.F(s));
        ok &= check(ps.F_Lambda(s), ps.F(s));
        ok &= check(ps.Funder(s, s), 0.0);
    }
    ok &= check(ps.Fbar(0), 0.0);
    ok &= check(ps.Funder(0, 12.0), ps.F(12.0));
    PrimitiveCalculus cs(Nonlinearity::function([](double s) { return std::cos(s); }, Direction::Infinity, "cos"));
    ok &= check(cs.Fbar(2 * pi), 1.0);
    PrimitiveCalculus sn1(Nonlinearity::pure_sine(), 2.0, 1.0), sn2(Nonlinearity::pure_sine(), 2.0, 2.0);
    for (double s : {1.0, 4.0, 9.0}) ok &= check(sn1.F_Lambda(s), sn1.F(s));
    ok &= check(sn2.F_Lambda(2 * pi), 1.5);
    ok &= check(sn1.Funder(pi, 2 * pi), -2.0);

    const auto a = analyze(Nonlinearity::power_sin(1), OperatorSpec::plap(2), 1, 1.0);
    const auto b = analyze(Nonlinearity::reciprocal_sin(2), OperatorSpec::plap(1.5), 1, 1.0);
    const bool ordered = a.existence_available && b.existence_available && a.lambda_under <= a.lambda_bar.value &&
                         b.lambda_under <= b.lambda_bar.value && a.lambda_under > 0 && b.lambda_under > 0;
    return {ok && ordered, fmt("worst closed-form error %.2e; s(1+sin s): %.5f <= %.4f; s^(1/2)(1+sin(1/s)), p=1.5: "
                               "%.5f <= %.4f",
                               worst, a.lambda_under, a.lambda_bar.value, b.lambda_under, b.lambda_bar.value)};
}

Outcome_ gradient_check() {
    const auto f = Nonlinearity::power_sin(1);
    TruncatedNonlinearity tn(f, find_zeros(f, 3).alphas[2]);
    std::mt19937_64 rng(99);
    double worst = 0.0;
    for (double p : {2.0, 3.0}) {
        const auto pot = Potential::p_laplacian(p);
        for (int k = 0; k < 100; ++k) {
            GridFunction u{RadialGrid::graded(1.0, 40), std::vector<double>(41), 1 + k % 3, p};
            std::uniform_real_distribution<double> U(0.0, tn.alpha());
            for (double& v : u.u) v = U(rng);
            const auto g = energy_gradient(u, tn, pot, 3.0);
            const double h = 1e-6 * tn.alpha();
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                auto a = u, b = u;
                a.u[i] += h;
                b.u[i] -= h;
                const double fd = (assemble_energy(a, tn, pot, 3.0) - assemble_energy(b, tn, pot, 3.0)) / (2 * h);
                num = std::max(num, std::abs(fd - g[i]));
                den = std::max(den, std::abs(g[i]));
            }
            worst = std::max(worst, num / den);
        }
    }
    return {worst <= 1e-6, fmt("200 random points, worst relative error %.2e", worst)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome_()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "oracle shooting accuracy", 1, oracle_shooting},
        {2, "energy identity on a 500-point scan", 30, energy_identity},
        {3, "growing solution heights at 10 lambda_bar", 60, growing_heights},
        {4, "nonexistence threshold and per-solution bound", 120, threshold_witness},
        {5, "sign and area conditions on all computed solutions", 60, necessary_conditions},
        {6, "Pucci consistency", 60, pucci_consistency},
        {7, "variational mechanism", 60, variational_mechanism},
        {8, "primitive calculus and threshold ordering", 60, primitive_calculus},
        {9, "energy gradient check", 60, gradient_check},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome_ o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && secs < c.budget;
        failures += pass ? 0 : 1;
        std::printf("%s criterion %d %s: %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
