#pragma once

#include <span>
#include <string>
#include <vector>

#include "oscilla/limits.hpp"
#include "oscilla/nonlinearity.hpp"
#include "oscilla/primitive.hpp"

namespace oscilla {

/// Volume of the unit ball in R^N.
[[nodiscard]] double unit_ball_volume(int N);

struct BallGeometry {
    int N = 1;
    double R = 1.0;
    double delta = 0.5;

    BallGeometry() = default;
    BallGeometry(int N, double R, double delta);

    [[nodiscard]] double measure() const;
    /// Measure of the layer of width delta along the boundary.
    [[nodiscard]] double layer_measure() const;
};

struct OperatorSpec {
    enum class Kind { PLaplacian, Pucci };
    Kind kind = Kind::PLaplacian;
    double p = 2.0;       ///< PLaplacian exponent; 2 for Pucci
    double Lambda = 1.0;  ///< Pucci ellipticity; 1 for PLaplacian

    static OperatorSpec plap(double p) { return {Kind::PLaplacian, p, 1.0}; }
    static OperatorSpec pucci(double Lambda) { return {Kind::Pucci, 2.0, Lambda}; }
    [[nodiscard]] std::string describe() const;
};

/// Nonexistence threshold (p-1)/(p R^p (L+ - min{0, L-})); +inf in the
/// degenerate cases L+ < 0 or L- = L+ = 0, and 0 when a limit is infinite.
[[nodiscard]] double lambda_under_plap(double p, double R, double L_minus, double L_plus);
/// Pucci analogue 1/(2 Lambda R^2 (L+_Lambda - min{0, L-_Lambda})).
[[nodiscard]] double lambda_under_pucci(double Lambda, double R, double L_minus, double L_plus);

struct LambdaTerm {
    double gamma = 0.0;
    double delta = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    double lambda = 0.0;
    double Fbar = 0.0;
};

/// lambda_n = (C2/C1) gamma_n^p / Fbar(gamma_n), with delta_n chosen on a
/// geometric grid in (0, R) to minimize lambda_n subject to C1 > 0.
[[nodiscard]] std::vector<LambdaTerm> lambda_n_sequence(const PrimitiveCalculus& pc, int N, double R,
                                                        std::span<const double> gammas, double M, double beta,
                                                        Direction ell, int delta_points = 64);

struct LambdaBar {
    double value = 0.0;
    bool monotone = false;
    std::size_t window = 0;
};

/// Mean of the last quartile of the sequence, with a monotone-trend flag.
[[nodiscard]] LambdaBar summarize_lambda_bar(std::span<const LambdaTerm> terms);

/// gamma_n maximizing Fbar(s)/s^p over each zero interval.
[[nodiscard]] std::vector<double> select_gammas(const PrimitiveCalculus& pc, const ZeroSequence& zeros);

/// Smallest M >= 0 with -min_{[0, gamma_n]} F <= M F(gamma_n) on the given gammas
/// (+inf if some F(gamma_n) <= 0 while F dips below 0).
[[nodiscard]] double estimate_M(const PrimitiveCalculus& pc, std::span<const double> gammas);

/// (p-1) c^p / (p R^p Fbar(c)): every radial solution with maximum c needs lambda above this.
[[nodiscard]] double per_solution_lower_bound(const PrimitiveCalculus& pc, double c, double p, double R);
/// c^2 / (2 Lambda R^2 Fbar_Lambda(c)), Lambda taken from pc.
[[nodiscard]] double per_solution_lower_bound_pucci(const PrimitiveCalculus& pc, double c, double R);

struct Reduction {
    Nonlinearity g;
    bool applied = false;
    std::string note;
};

/// For f(0) < 0 and ell = Infinity: g = f+ on [0, alpha_1], g = f above.
/// Otherwise returns f unchanged with applied = false.
[[nodiscard]] Reduction reduce_negative_f0(const Nonlinearity& f);

struct AnalyzeOptions {
    std::size_t zero_count = 12;
    LimitOptions limits;
    int delta_points = 64;
    double beta = 1.0;
    double tol_quad = 1e-10;
    ZeroOptions zeros;
};

struct ThresholdReport {
    OperatorSpec op;
    Direction ell = Direction::Infinity;
    int N = 1;
    double R = 1.0;
    double f0 = 0.0;
    bool reduced = false;
    std::string reduction_note;

    LimitEstimate limits;         ///< F(s)/s^p
    LimitEstimate limits_Lambda;  ///< F_Lambda(s)/s^2
    double lambda_under_plap = 0.0;
    double lambda_under_pucci = 0.0;
    double lambda_under = 0.0;  ///< the value for op

    bool existence_available = false;
    std::string existence_note;
    ZeroSequence zeros;
    std::vector<double> gammas;
    double M = 0.0;
    std::vector<LambdaTerm> sequence;
    LambdaBar lambda_bar;

    bool ordering_ok = true;

    static constexpr const char* formula_plap = "(p-1)/(p R^p (L+ - min{0, L-}))";
    static constexpr const char* formula_pucci = "1/(2 Lambda R^2 (L+_Lambda - min{0, L-_Lambda}))";
    static constexpr const char* formula_lambda_n = "(C2/C1) gamma_n^p / Fbar(gamma_n)";
};

/// Limits, both nonexistence thresholds and the existence sequence for f on B_R.
/// The existence sequence uses the divergence-form exponent op.p.
[[nodiscard]] ThresholdReport analyze(const Nonlinearity& f, const OperatorSpec& op, int N, double R,
                                      const AnalyzeOptions& opts = {});

}  // namespace oscilla
