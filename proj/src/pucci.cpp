#include "oscilla/pucci.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oscilla/error.hpp"
#include "oscilla/ode.hpp"
#include "oscilla/roots.hpp"

namespace oscilla {

namespace {
constexpr int kMaxRestarts = 100000;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }
}  // namespace

ShootResult pucci_shoot(const PucciShootConfig& cfg, const Nonlinearity& f) {
    if (!(cfg.Lambda >= 1.0)) throw Error(ErrorCode::DomainError, "Pucci shoot needs Lambda >= 1");
    if (cfg.N < 1 || !(cfg.c > 0.0) || !(cfg.lambda_shoot > 0.0)) {
        throw Error(ErrorCode::DomainError, "Pucci shoot needs N >= 1, c > 0, lambda > 0");
    }
    if (!(cfg.r_max > 0.0) || !(cfg.tol_ode > 0.0) || !(cfg.event_tol > 0.0)) {
        throw Error(ErrorCode::DomainError, "Pucci shoot needs positive r_max, tol_ode and event_tol");
    }
    ShootResult res;
    res.c = cfg.c;
    res.p = 2.0;
    res.N = cfg.N;
    res.lambda_shoot = cfg.lambda_shoot;
    res.trajectory.push_back({0.0, cfg.c, 0.0, 0.0});

    const double Lam = cfg.Lambda;
    const double lam = cfg.lambda_shoot;
    const double Nm1 = cfg.N - 1.0;
    const double fc = f(cfg.c);
    if (detail::is_stalled(fc, cfg.c)) {
        res.outcome = Outcome::Stalled;
        res.message = "f(c) = 0: c is a critical point and the trajectory is constant";
        return res;
    }
    if (fc < 0.0) {
        // v''(0) = -lam f(c) / (Lambda N) > 0: the profile rises from the centre.
        res.outcome = Outcome::Bounced;
        res.r_turn = 0.0;
        res.v_turn = cfg.c;
        res.message = "f(c) < 0: the trajectory rises from the centre";
        return res;
    }

    const double a0 = -Lam * lam * fc / cfg.N;  // v''(0) on the q >= 0 branch
    const double L = std::sqrt(2.0 * cfg.c / -a0);
    const double r0 = std::max(cfg.event_tol, 1e-6 * L);
    ode::Vec<2> y0{cfg.c + 0.5 * a0 * r0 * r0, a0 * r0};
    res.trajectory.push_back({r0, y0[0], y0[1], 0.0});

    auto q_of = [&](double r, const ode::Vec<2>& y) { return lam * f(y[0]) + Nm1 * y[1] / (Lam * r); };
    ode::DormandPrince54<2> dp([&](double r, const ode::Vec<2>& y, ode::Vec<2>& dy) {
        const double q = q_of(r, y);
        dy[0] = y[1];
        dy[1] = q >= 0.0 ? -Lam * q : -q / Lam;
    });

    ode::StepControl ctl;
    ctl.rtol = cfg.tol_ode;
    ctl.atol = cfg.tol_ode * 1e-2 * cfg.c;
    ctl.h_init = r0;

    double err_v = 0.0;
    bool hit = false, bounce = false;
    int seg_sign = sign_of(q_of(r0, y0));
    std::size_t steps = 0;
    auto on_step = [&](const ode::Step<2>& st, double& r, ode::Vec<2>& y) {
        ++steps;
        err_v += std::abs(st.err[0]);
        const double inf = std::numeric_limits<double>::infinity();
        const double xtol = cfg.event_tol + 4.0 * std::numeric_limits<double>::epsilon() * st.r0;
        auto at = [&](double t) { return t == 0.0 ? st.y0 : dp.advance(st.r0, st.y0, t); };
        double t_hit = inf, t_bounce = inf, t_q = inf;
        if (st.y1[0] <= 0.0) t_hit = bracketed_root([&](double t) { return at(t)[0]; }, 0.0, st.h, xtol);
        if (st.y1[1] >= 0.0) t_bounce = bracketed_root([&](double t) { return at(t)[1]; }, 0.0, st.h, xtol);
        const int s1 = sign_of(q_of(st.r0 + st.h, st.y1));
        if (seg_sign != 0 && s1 != 0 && s1 != seg_sign) {
            const double g0 = q_of(st.r0, st.y0);
            if (sign_of(g0) == seg_sign && res.q_sign_changes < kMaxRestarts) {
                t_q = bracketed_root([&](double t) { return q_of(st.r0 + t, at(t)); }, 0.0, st.h, xtol);
            } else {
                // q already sat on the far side at the step start (restart point).
                seg_sign = s1;
            }
        }
        const double t = std::min({t_hit, t_bounce, t_q});
        if (t == inf) {
            if (seg_sign == 0) seg_sign = s1;
            res.trajectory.push_back({r, y[0], y[1], 0.0});
            return ode::Action::Continue;
        }
        r = st.r0 + t;
        y = at(t);
        res.trajectory.push_back({r, y[0], y[1], 0.0});
        if (t == t_q && t < t_hit && t < t_bounce) {
            ++res.q_sign_changes;
            seg_sign = -seg_sign;
            return ode::Action::Continue;
        }
        hit = t_hit <= t_bounce;
        bounce = !hit;
        return ode::Action::Stop;
    };
    const double r_end =
        ode::drive(dp, r0, y0, cfg.r_max, ctl, on_step, [L](double r) { return 0.25 * (r + L); });
    res.r_end = r_end;
    res.steps = steps;
    const TrajectorySample last = res.trajectory.back();
    if (hit) {
        res.outcome = Outcome::HitZero;
        res.rho = r_end;
        res.rho_error_estimate = err_v / std::max(std::abs(last.dv), 1e-300);
    } else if (bounce) {
        res.outcome = Outcome::Bounced;
        res.r_turn = r_end;
        res.v_turn = last.v;
        res.message = "v' returned to 0 with v > 0";
    } else {
        res.outcome = Outcome::HorizonExceeded;
        res.message = "no zero of v before r_max";
    }
    detail::thin(res.trajectory, cfg.max_samples);
    return res;
}

double pucci_rescale(const ShootResult& res, double R) { return rescale_to_ball(res, R, 2.0); }

PucciCheck pucci_inequality_check(const ShootResult& res, const PrimitiveCalculus& pc, double lambda, double R,
                                  double tol) {
    if (res.outcome != Outcome::HitZero) throw Error(ErrorCode::NotAZeroHit, "Pucci check needs a first zero");
    PucciCheck out;
    const double Lam = pc.Lambda();
    const auto vc = pc.values(res.c);
    double worst = std::numeric_limits<double>::infinity();
    for (const TrajectorySample& s : res.trajectory) {
        const double rhs = lambda * (vc.F_Lambda - pc.F_Lambda(std::max(s.v, 0.0)));
        const double lhs = s.dv * s.dv / (2.0 * Lam);
        worst = std::min(worst, (rhs - lhs) / (1.0 + std::abs(rhs)));
    }
    out.min_slack = worst;
    const double fbar = vc.F_Lambda - vc.min_F_Lambda;
    out.lower_bound = fbar > 0.0 ? res.c * res.c / (2.0 * Lam * R * R * fbar) : std::numeric_limits<double>::infinity();
    out.lower_bound_slack = pucci_rescale(res, R) - out.lower_bound;
    out.ok = out.min_slack >= -tol && out.lower_bound_slack >= -tol;
    return out;
}

}  // namespace oscilla
