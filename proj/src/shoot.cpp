#include "oscilla/shoot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "oscilla/error.hpp"
#include "oscilla/ode.hpp"
#include "oscilla/roots.hpp"

namespace oscilla {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::HitZero: return "hit_zero";
        case Outcome::Bounced: return "bounced";
        case Outcome::Stalled: return "stalled";
        case Outcome::HorizonExceeded: return "horizon_exceeded";
    }
    return "unknown";
}

namespace detail {

void thin(std::vector<TrajectorySample>& t, std::size_t max_samples) {
    if (max_samples < 2 || t.size() <= max_samples) return;
    std::vector<TrajectorySample> out;
    out.reserve(max_samples);
    const double stride = static_cast<double>(t.size() - 1) / static_cast<double>(max_samples - 1);
    for (std::size_t i = 0; i < max_samples; ++i) {
        out.push_back(t[static_cast<std::size_t>(std::llround(stride * static_cast<double>(i)))]);
    }
    out.back() = t.back();
    t = std::move(out);
}

bool is_stalled(double fc, double c) { return std::abs(fc) <= 1e-14 * (1.0 + std::abs(c)); }

}  // namespace detail

namespace {

void validate(const ShootConfig& cfg) {
    if (!(cfg.p > 1.0)) throw Error(ErrorCode::DomainError, "shoot needs p > 1");
    if (cfg.N < 1) throw Error(ErrorCode::DomainError, "shoot needs N >= 1");
    if (!(cfg.c > 0.0)) throw Error(ErrorCode::DomainError, "shoot needs c > 0");
    if (!(cfg.lambda_shoot > 0.0)) throw Error(ErrorCode::DomainError, "shoot needs lambda > 0");
    if (!(cfg.r_max > 0.0) || !(cfg.tol_ode > 0.0) || !(cfg.event_tol > 0.0)) {
        throw Error(ErrorCode::DomainError, "shoot needs positive r_max, tol_ode and event_tol");
    }
}

double signed_pow(double x, double e) { return x < 0.0 ? -std::pow(-x, e) : std::pow(x, e); }

}  // namespace

ShootResult shoot(const ShootConfig& cfg, const Nonlinearity& f) {
    validate(cfg);
    ShootResult res;
    res.c = cfg.c;
    res.p = cfg.p;
    res.N = cfg.N;
    res.lambda_shoot = cfg.lambda_shoot;
    res.trajectory.push_back({0.0, cfg.c, 0.0, 0.0});

    const double p = cfg.p;
    const double lam = cfg.lambda_shoot;
    const double Nm1 = cfg.N - 1.0;
    const double fc = f(cfg.c);
    if (detail::is_stalled(fc, cfg.c)) {
        res.outcome = Outcome::Stalled;
        res.message = "f(c) = 0: c is a critical point and the trajectory is constant";
        return res;
    }
    if (fc < 0.0) {
        res.outcome = Outcome::Bounced;
        res.r_turn = 0.0;
        res.v_turn = cfg.c;
        res.message = "f(c) < 0: the trajectory rises from the centre";
        return res;
    }

    // Origin series: w = -(lam f(c)/N) r, v = c - (p-1)/p k r^{p/(p-1)}.
    const double q = p / (p - 1.0);
    const double k = std::pow(lam * fc / cfg.N, 1.0 / (p - 1.0));
    const double L = std::pow(cfg.c * p / ((p - 1.0) * k), 1.0 / q);
    const double r0 = std::max(cfg.event_tol, 1e-6 * L);
    ode::Vec<3> y0{cfg.c - (p - 1.0) / p * k * std::pow(r0, q), -(lam * fc / cfg.N) * r0,
                   std::pow(k, p) * (p - 1.0) / p * std::pow(r0, q)};
    res.trajectory.push_back({r0, y0[0], -k * std::pow(r0, 1.0 / (p - 1.0)), y0[2]});

    const double inv = 1.0 / (p - 1.0);
    auto dv_of = [p, inv](double w) { return p == 2.0 ? w : signed_pow(w, inv); };
    ode::DormandPrince54<3> dp([&](double r, const ode::Vec<3>& y, ode::Vec<3>& dy) {
        const double dv = dv_of(y[1]);
        dy[0] = dv;
        dy[1] = -lam * f(y[0]) - Nm1 * y[1] / r;
        dy[2] = std::pow(std::abs(dv), p) / r;
    });

    ode::StepControl ctl;
    ctl.rtol = cfg.tol_ode;
    ctl.atol = cfg.tol_ode * 1e-2 * cfg.c;
    ctl.h_init = r0;

    double err_v = 0.0;
    bool hit = false, bounce = false;
    std::size_t steps = 0;
    auto on_step = [&](const ode::Step<3>& st, double& r, ode::Vec<3>& y) {
        ++steps;
        err_v += std::abs(st.err[0]);
        const bool h_hit = st.y1[0] <= 0.0;
        const bool h_bounce = st.y1[1] >= 0.0;
        if (h_hit || h_bounce) {
            const double xtol = cfg.event_tol + 4.0 * std::numeric_limits<double>::epsilon() * st.r0;
            double t_hit = std::numeric_limits<double>::infinity();
            double t_bounce = t_hit;
            if (h_hit) {
                t_hit = bracketed_root([&](double t) { return t == 0.0 ? st.y0[0] : dp.advance(st.r0, st.y0, t)[0]; },
                                       0.0, st.h, xtol);
            }
            if (h_bounce) {
                t_bounce = bracketed_root(
                    [&](double t) { return t == 0.0 ? st.y0[1] : dp.advance(st.r0, st.y0, t)[1]; }, 0.0, st.h, xtol);
            }
            const double t = std::min(t_hit, t_bounce);
            hit = t_hit <= t_bounce;
            bounce = !hit;
            r = st.r0 + t;
            y = dp.advance(st.r0, st.y0, t);
            res.trajectory.push_back({r, y[0], dv_of(y[1]), y[2]});
            return ode::Action::Stop;
        }
        res.trajectory.push_back({r, y[0], dv_of(y[1]), y[2]});
        return ode::Action::Continue;
    };
    const double r_end = ode::drive(dp, r0, y0, cfg.r_max, ctl, on_step,
                                    [L](double r) { return 0.25 * (r + L); });
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

double rescale_to_ball(const ShootResult& res, double R, double p) {
    if (res.outcome != Outcome::HitZero) throw Error(ErrorCode::NotAZeroHit, "rescaling needs a first zero");
    if (!(R > 0.0) || !(p > 0.0)) throw Error(ErrorCode::DomainError, "rescaling needs R > 0, p > 0");
    return res.lambda_shoot * std::pow(res.rho / R, p);
}

double energy_residual(const ShootResult& res, const PrimitiveCalculus& pc, double lambda) {
    const double p = res.p;
    const double Fc = pc.F(res.c);
    double worst = 0.0;
    for (const TrajectorySample& s : res.trajectory) {
        const double lhs = (p - 1.0) / p * std::pow(std::abs(s.dv), p) + (res.N - 1.0) * s.E;
        const double rhs = lambda * (Fc - pc.F(std::max(s.v, 0.0)));
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    return worst;
}

Diagnostics check_necessary_conditions(const ShootResult& res, const PrimitiveCalculus& pc, double p, double R,
                                       double tol) {
    if (res.outcome != Outcome::HitZero) throw Error(ErrorCode::NotAZeroHit, "diagnostics need a first zero");
    Diagnostics d;
    d.computed = true;
    const auto v = pc.values(res.c);
    d.F_at_max_ok = v.F >= -tol;
    // F(c) - F(s) >= 0 for every s in [0, c] is F(c) >= max_{[0, c]} F.
    d.area_condition_ok = v.F - v.max_F >= -tol;
    const double lambda = rescale_to_ball(res, R, p);
    const double fbar = v.F - v.min_F;
    d.lower_bound = fbar > 0.0 ? (p - 1.0) * std::pow(res.c, p) / (p * std::pow(R, p) * fbar)
                               : std::numeric_limits<double>::infinity();
    d.lower_bound_slack = lambda - d.lower_bound;
    d.energy_residual_max = energy_residual(res, pc, res.lambda_shoot);
    return d;
}

}  // namespace oscilla
