#pragma once

#include <cstddef>

#include "oscilla/shoot.hpp"

namespace oscilla {

struct PucciShootConfig {
    double Lambda = 1.0;
    int N = 1;
    double c = 1.0;
    double lambda_shoot = 1.0;
    double r_max = 1e6;
    double tol_ode = 1e-10;
    double event_tol = 1e-14;
    std::size_t max_samples = 400;
};

/// Radial shoot for -M+(D^2 v) = lambda f(v): v'' = -Lambda q if q >= 0 and
/// v'' = -q / Lambda otherwise, q = lambda f(v) + (N-1) v' / (Lambda r).
/// Integration restarts at every sign change of q; the count is recorded.
[[nodiscard]] ShootResult pucci_shoot(const PucciShootConfig& cfg, const Nonlinearity& f);

/// lambda_shoot (rho/R)^2. Throws NotAZeroHit.
[[nodiscard]] double pucci_rescale(const ShootResult& res, double R);

struct PucciCheck {
    /// min over samples of [lambda (F_L(c) - F_L(v)) - v'^2 / (2 Lambda)] / (1 + |lambda (F_L(c) - F_L(v))|)
    double min_slack = 0.0;
    double lower_bound = 0.0;  ///< c^2 / (2 Lambda R^2 Fbar_Lambda(c))
    double lower_bound_slack = 0.0;
    bool ok = false;
};

/// Pointwise energy inequality along the trajectory and the per-solution
/// bound on B_R. Lambda is taken from pc.
[[nodiscard]] PucciCheck pucci_inequality_check(const ShootResult& res, const PrimitiveCalculus& pc, double lambda,
                                                double R, double tol = 1e-8);

}  // namespace oscilla
