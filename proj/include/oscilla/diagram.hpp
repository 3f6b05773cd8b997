#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "oscilla/nonlinearity.hpp"
#include "oscilla/primitive.hpp"
#include "oscilla/shoot.hpp"
#include "oscilla/thresholds.hpp"

namespace oscilla {

struct DiagramConfig {
    OperatorSpec op;
    int N = 1;
    double R = 1.0;
    double tol_ode = 1e-10;
    double event_tol = 1e-14;
    double r_max = 1e6;
    double check_tol = 1e-8;
    unsigned threads = 1;
    std::size_t samples = 400;  ///< trajectory samples kept for the diagnostics
};

/// c values on [c_min, c_max], uniform or geometric. Throws EmptyGrid.
[[nodiscard]] std::vector<double> make_c_grid(double c_min, double c_max, std::size_t points, bool log_spacing);

/// Adds alpha (1 -+ 10^-k), k = 1..levels, for every zero inside the grid's
/// range, so the steep ends of each branch are resolved. Exact zeros are dropped.
[[nodiscard]] std::vector<double> cluster_near_zeros(std::vector<double> grid, const ZeroSequence& zeros,
                                                     int levels = 8);

struct DiagramPoint {
    double c = 0.0;
    Outcome outcome = Outcome::HorizonExceeded;
    double rho = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double F_c = 0.0;
    double Fbar_c = 0.0;
    double lower_bound = std::numeric_limits<double>::quiet_NaN();
    /// Energy identity residual (p-Laplacian) or min normalised slack of the
    /// pointwise Pucci inequality.
    double energy_residual = std::numeric_limits<double>::quiet_NaN();
    bool F_ok = false;
    bool area_ok = false;
    bool bound_ok = false;
    int zero_interval_index = 0;
    int q_sign_changes = 0;
    double rho_error_estimate = std::numeric_limits<double>::quiet_NaN();
};

struct Branch {
    std::size_t first = 0;  ///< index into points
    std::size_t last = 0;   ///< inclusive
    int zero_interval_index = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
};

struct Crossing {
    double lambda_star = 0.0;
    std::size_t branch = 0;
    bool refined = false;  ///< located by root finding on re-shot solutions
    DiagramPoint point;
};

struct BifurcationDiagram {
    DiagramConfig config;
    ZeroSequence zeros;
    std::vector<DiagramPoint> points;
    std::vector<Branch> branches;
};

/// One shoot at height c with all diagnostics evaluated on B_R.
[[nodiscard]] DiagramPoint evaluate_point(const Nonlinearity& f, const PrimitiveCalculus& pc,
                                          const DiagramConfig& cfg, const ZeroSequence& zeros, double c);

/// Shoots every c of the grid (in parallel) and splits the HitZero runs into
/// branches that do not straddle a zero of f.
[[nodiscard]] BifurcationDiagram diagram(const Nonlinearity& f, const PrimitiveCalculus& pc, const DiagramConfig& cfg,
                                         std::span<const double> c_grid, const ZeroSequence& zeros);

/// Solutions with lambda(c) = lambda_star, located by root finding in c between
/// bracketing grid points of the same branch. Ordered by c.
[[nodiscard]] std::vector<Crossing> find_crossings(const BifurcationDiagram& d, const Nonlinearity& f,
                                                   const PrimitiveCalculus& pc, double lambda_star);

struct DiagramSummary {
    std::size_t points = 0;
    std::size_t hits = 0;
    std::size_t stalled = 0;
    std::size_t bounced = 0;
    std::size_t horizon = 0;
    std::size_t branches = 0;
    std::size_t sign_violations = 0;
    std::size_t area_violations = 0;
    std::size_t bound_violations = 0;
    double worst_residual = 0.0;
};

[[nodiscard]] DiagramSummary summarize(const BifurcationDiagram& d);

}  // namespace oscilla
