#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "oscilla/nonlinearity.hpp"
#include "oscilla/primitive.hpp"
#include "oscilla/thresholds.hpp"

namespace oscilla {

/// f_n: f(0) below 0, f on [0, alpha_n], 0 above. Its primitive F_n is held
/// as a cubic Hermite table (values F, slopes f) on [0, alpha_n]; energy and
/// gradient both use this table, so they are exactly consistent.
class TruncatedNonlinearity {
public:
    TruncatedNonlinearity(const Nonlinearity& base, double alpha_n, std::size_t table_nodes = 4096,
                          double tol_quad = 1e-10);

    [[nodiscard]] double alpha() const { return alpha_; }
    [[nodiscard]] const Nonlinearity& base() const { return base_; }
    /// f_n itself (exact, not the table slope).
    [[nodiscard]] double f(double s) const;
    /// Table primitive F_n and its first two derivatives.
    [[nodiscard]] double F(double s) const;
    [[nodiscard]] double dF(double s) const;
    [[nodiscard]] double d2F(double s) const;
    /// |f_n(alpha-) - f_n(alpha+)| = |f(alpha_n)|.
    [[nodiscard]] double jump() const { return std::abs(base_(alpha_)); }
    [[nodiscard]] double max_abs_f() const { return max_abs_f_; }

private:
    Nonlinearity base_;
    double alpha_;
    double f0_;
    double step_;
    double max_abs_f_ = 0.0;
    std::vector<double> F_;
    std::vector<double> f_;
};

/// Radial nodes 0 = r_0 < ... < r_J = R.
struct RadialGrid {
    std::vector<double> r;

    static RadialGrid uniform(double R, std::size_t cells);
    /// r_j = R (1 - (1 - j/J)^grading): cells shrink toward r = R.
    static RadialGrid graded(double R, std::size_t cells, double grading = 1.5);

    [[nodiscard]] double R() const { return r.back(); }
    [[nodiscard]] std::size_t cells() const { return r.size() - 1; }
    [[nodiscard]] double max_step() const;
};

struct GridFunction {
    RadialGrid grid;
    std::vector<double> u;
    int N = 1;
    double p = 2.0;

    [[nodiscard]] double sup_norm() const;
};

/// Phi(r, xi) for the radial derivative xi, with dPhi/dxi and d2Phi/dxi2.
struct Potential {
    std::function<double(double, double)> phi;
    std::function<double(double, double)> dphi;
    std::function<double(double, double)> d2phi;
    double alpha = 1.0;
    double beta = 1.0;
    double p = 2.0;
    std::string name;

    /// Phi = |xi|^p / p.
    static Potential p_laplacian(double p);
    /// Phi = a(r) |xi|^p / p with alpha <= a <= beta.
    static Potential weighted(double p, std::function<double(double)> a, double alpha, double beta);
};

struct PotentialCheck {
    bool growth_ok = true;
    bool zero_ok = true;
    bool convex_ok = true;
    [[nodiscard]] bool ok() const { return growth_ok && zero_ok && convex_ok; }
};

/// Samples the growth bounds, Phi(r, 0) = 0 and midpoint strict convexity.
[[nodiscard]] PotentialCheck check_potential(const Potential& pot, double R, std::size_t samples = 64);

/// Surface measure of the unit sphere in R^N (2 for N = 1).
[[nodiscard]] double sphere_measure(int N);

/// Discrete I_n(lambda, u): |S^{N-1}| sum_j [Phi(r_mid, Du_j) - lambda F_n(u_mid)] W_j,
/// W_j = (r_{j+1}^N - r_j^N) / N.
[[nodiscard]] double assemble_energy(const GridFunction& u, const TruncatedNonlinearity& tn, const Potential& pot,
                                     double lambda);
/// The same sum without the sphere factor (the one-dimensional radial integral).
[[nodiscard]] double radial_energy(const GridFunction& u, const TruncatedNonlinearity& tn, const Potential& pot,
                                   double lambda);
/// Gradient of assemble_energy with respect to every nodal value (the
/// Dirichlet node included, for checking).
[[nodiscard]] std::vector<double> energy_gradient(const GridFunction& u, const TruncatedNonlinearity& tn,
                                                  const Potential& pot, double lambda);

struct MinimizeOptions {
    double tol_stat = 1e-8;
    std::size_t max_iter = 20000;
    bool throw_on_failure = true;
    unsigned threads = 1;
    /// Extra initial guesses tried after the three standard starts.
    std::vector<GridFunction> extra_starts;
};

struct MinimizeResult {
    GridFunction u;
    double energy = 0.0;
    double residual = 0.0;  ///< masked nodal Euler-Lagrange residual, max norm
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t start_index = 0;  ///< 0 zero, 1 ramp, 2 half-height constant, 3+ extra
    std::vector<int> active;      ///< -1 at 0, +1 at alpha_n, 0 free
    /// Energy after each accepted step. Armijo steps decrease it strictly;
    /// polishing steps (taken once decreases fall below rounding) may move it
    /// by rounding error only.
    std::vector<double> energy_history;
    std::size_t polish_steps = 0;
};

/// Single projected descent run from u0 within the box [0, alpha_n].
[[nodiscard]] MinimizeResult minimize_from(const GridFunction& u0, const TruncatedNonlinearity& tn,
                                           const Potential& pot, double lambda, const MinimizeOptions& opts = {});

/// Multi-start minimization of I_n over grid functions with 0 <= u <= alpha_n
/// and u(R) = 0. Lowest energy wins; ties go to the earlier start.
[[nodiscard]] MinimizeResult minimize(const TruncatedNonlinearity& tn, const Potential& pot, double lambda,
                                      const RadialGrid& grid, int N, const MinimizeOptions& opts = {});

/// w(r) = gamma min{1, (R - r)/delta}.
[[nodiscard]] GridFunction comparison_function(double gamma, double delta, const RadialGrid& grid, int N,
                                               double p = 2.0);

struct NegativityResult {
    bool negative = false;
    double energy = 0.0;
};

/// I_n(lambda, w_n) < 0 for the comparison ramp.
[[nodiscard]] NegativityResult negativity_test(const TruncatedNonlinearity& tn, const Potential& pot, double lambda,
                                               double gamma, double delta, const RadialGrid& grid, int N);

struct SequenceItem {
    std::size_t n = 0;
    double alpha_n = 0.0;
    double sup_norm = 0.0;
    double energy = 0.0;
    double residual = 0.0;
    int interval_index = 0;
    bool trivial = false;
    bool converged = false;
    GridFunction u;
};

struct SequenceResult {
    std::vector<SequenceItem> items;
    bool all_trivial = false;
    bool trend_toward_limit = false;  ///< sup norms monotone in the direction of the zeros
};

/// Minimizes I_n for n = 1..K on the same grid. When terms[n-1] is given, its
/// comparison ramp (gamma_n, delta_n) joins the starts for level n.
[[nodiscard]] SequenceResult run_sequence(const Nonlinearity& f, const Potential& pot, double lambda,
                                          const ZeroSequence& zeros, const RadialGrid& grid, int N, std::size_t K,
                                          const MinimizeOptions& opts = {}, std::span<const LambdaTerm> terms = {});

}  // namespace oscilla
