#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "oscilla/nonlinearity.hpp"
#include "oscilla/primitive.hpp"

namespace oscilla {

struct ShootConfig {
    double p = 2.0;
    int N = 1;
    double c = 1.0;
    double lambda_shoot = 1.0;
    double r_max = 1e6;
    double tol_ode = 1e-10;
    double event_tol = 1e-14;
    std::size_t max_samples = 400;
};

enum class Outcome { HitZero, Bounced, Stalled, HorizonExceeded };

[[nodiscard]] const char* to_string(Outcome o);

struct TrajectorySample {
    double r = 0.0;
    double v = 0.0;
    double dv = 0.0;
    double E = 0.0;  ///< integral of |v'|^p / t over [0, r] (p-Laplacian only)
};

struct Diagnostics {
    bool computed = false;
    double energy_residual_max = std::numeric_limits<double>::quiet_NaN();
    bool F_at_max_ok = false;
    bool area_condition_ok = false;
    double lower_bound = std::numeric_limits<double>::quiet_NaN();
    double lower_bound_slack = std::numeric_limits<double>::quiet_NaN();
};

struct ShootResult {
    Outcome outcome = Outcome::HorizonExceeded;
    double c = 0.0;
    double p = 2.0;  ///< homogeneity exponent used for rescaling
    int N = 1;
    double lambda_shoot = 1.0;
    double rho = std::numeric_limits<double>::quiet_NaN();     ///< HitZero
    double r_turn = std::numeric_limits<double>::quiet_NaN();  ///< Bounced
    double v_turn = std::numeric_limits<double>::quiet_NaN();  ///< Bounced
    double r_end = 0.0;
    double lambda_rescaled = std::numeric_limits<double>::quiet_NaN();
    /// Accumulated local error of v over the run divided by |v'(rho)|.
    double rho_error_estimate = std::numeric_limits<double>::quiet_NaN();
    std::size_t steps = 0;
    int q_sign_changes = 0;  ///< Pucci only
    std::vector<TrajectorySample> trajectory;
    Diagnostics diag;
    std::string message;
};

/// Radial p-Laplacian shoot from height c, integrated in flux form
/// w = |v'|^{p-2} v' with (r^{N-1} w)' = -lambda r^{N-1} f(v).
[[nodiscard]] ShootResult shoot(const ShootConfig& cfg, const Nonlinearity& f);

/// lambda on the ball of radius R: lambda_shoot (rho/R)^p. Throws NotAZeroHit.
[[nodiscard]] double rescale_to_ball(const ShootResult& res, double R, double p);

/// max over samples of |(p-1)/p |v'|^p + (N-1) E - lambda (F(c) - F(v))| / (1 + |RHS|).
[[nodiscard]] double energy_residual(const ShootResult& res, const PrimitiveCalculus& pc, double lambda);

/// Sign condition F(c) >= -tol, area condition F(c) - F(s) >= -tol on [0, c],
/// and the slack of the per-solution bound on B_R.
[[nodiscard]] Diagnostics check_necessary_conditions(const ShootResult& res, const PrimitiveCalculus& pc, double p,
                                                     double R, double tol = 1e-8);

namespace detail {
void thin(std::vector<TrajectorySample>& t, std::size_t max_samples);
bool is_stalled(double fc, double c);
}  // namespace detail

}  // namespace oscilla
