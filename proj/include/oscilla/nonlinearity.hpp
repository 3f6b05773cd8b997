#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace oscilla {

/// Which end of the half-line the analysis targets: zeros accumulating at 0
/// (small solutions) or diverging to infinity (large solutions).
enum class Direction { Zero, Infinity };

[[nodiscard]] const char* to_string(Direction d);

enum class NonlinearityKind {
    PowerTimesOnePlusSin,     ///< s^r (1 + sin s)
    ReciprocalOscillation,    ///< s^{1/r} (1 + sin(1/s)), extended by 0 at s = 0
    EnvelopeTimesOnePlusSin,  ///< g(s) (1 + sin s), g a sampled positive nondecreasing table
    PureSine,                 ///< sin s
    CustomTable,              ///< piecewise-linear interpolation of samples
    Function,                 ///< arbitrary continuous callable (library use only)
};

[[nodiscard]] const char* to_string(NonlinearityKind k);

/// Piecewise-linear interpolant through (s, value) samples. Abscissae start
/// at 0 and increase strictly; the last segment is extended linearly.
class PiecewiseLinear {
public:
    PiecewiseLinear() = default;
    explicit PiecewiseLinear(const std::vector<std::pair<double, double>>& samples);

    [[nodiscard]] double operator()(double s) const;
    [[nodiscard]] std::span<const double> abscissae() const { return xs_; }
    [[nodiscard]] std::span<const double> values() const { return ys_; }
    [[nodiscard]] bool empty() const { return xs_.empty(); }

private:
    std::vector<double> xs_;
    std::vector<double> ys_;
};

/// The oscillating nonlinearity f. Cheap to copy; evaluation is pure.
class Nonlinearity {
public:
    static Nonlinearity power_sin(double r, Direction dir = Direction::Infinity);
    static Nonlinearity reciprocal_sin(double r, Direction dir = Direction::Zero);
    static Nonlinearity envelope_sin(PiecewiseLinear envelope, Direction dir = Direction::Infinity);
    static Nonlinearity pure_sine(Direction dir = Direction::Infinity);
    static Nonlinearity table(PiecewiseLinear samples, Direction dir = Direction::Infinity);
    /// `scan_step` is the sampling pitch used to locate sign changes and zeros.
    static Nonlinearity function(std::function<double(double)> f, Direction dir,
                                 std::string name = "function", double scan_step = 1e-2);

    /// f(s) for s >= 0. Negative arguments evaluate to f(0).
    [[nodiscard]] double operator()(double s) const;

    [[nodiscard]] NonlinearityKind kind() const { return kind_; }
    [[nodiscard]] Direction direction() const { return direction_; }
    [[nodiscard]] double parameter() const { return r_; }
    [[nodiscard]] double f0() const { return (*this)(0.0); }
    [[nodiscard]] const PiecewiseLinear& samples() const { return table_; }
    [[nodiscard]] double scan_step() const { return scan_step_; }
    [[nodiscard]] std::string describe() const;

    /// Replace f by its positive part on [0, limit]; f is unchanged above.
    [[nodiscard]] Nonlinearity clipped_below(double limit) const;
    [[nodiscard]] double clip_limit() const { return clip_; }

    /// Points in (a, b) where f changes sign, ascending.
    [[nodiscard]] std::vector<double> sign_changes(double a, double b) const;
    /// Points in (a, b) where f is not smooth (table nodes, clip end), ascending.
    [[nodiscard]] std::vector<double> kinks(double a, double b) const;
    /// True when f >= 0 on [0, inf) is known structurally.
    [[nodiscard]] bool known_nonnegative() const;
    /// Length scale of one oscillation, used to size quadrature checkpoints.
    [[nodiscard]] double oscillation_scale() const;

private:
    Nonlinearity() = default;
    [[nodiscard]] double raw(double s) const;

    NonlinearityKind kind_ = NonlinearityKind::PureSine;
    Direction direction_ = Direction::Infinity;
    double r_ = 1.0;
    double clip_ = 0.0;
    double scan_step_ = 1e-2;
    PiecewiseLinear table_;
    std::shared_ptr<const std::function<double(double)>> fn_;
    std::string name_;
};

struct ZeroOptions {
    double zero_tolerance = 1e-9;
    /// Search limit: largest abscissa for Infinity, upper end of the search
    /// for Zero. 0 selects a per-kind default.
    double horizon = 0.0;
};

/// Positive zeros alpha_n of f, monotone in the direction of the analysis.
struct ZeroSequence {
    std::vector<double> alphas;
    std::size_t count = 0;
    Direction direction = Direction::Infinity;

    /// Index n >= 1 with height c in the n-th zero interval: (alpha_{n-1}, alpha_n]
    /// for Infinity (alpha_0 = 0) and (alpha_{n+1}, alpha_n] for Zero. Returns 0
    /// when c lies outside the computed range.
    [[nodiscard]] int interval_index(double c) const;
};

/// First `count` positive zeros of f in the direction of f.direction().
/// Throws NoZerosFound when fewer are located within the horizon.
[[nodiscard]] ZeroSequence find_zeros(const Nonlinearity& f, std::size_t count,
                                      const ZeroOptions& opts = {});

}  // namespace oscilla
