#pragma once

#include <cstddef>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "oscilla/nonlinearity.hpp"

namespace oscilla {

/// Cached primitives of f: F, the sign-split parts of F, F_Lambda, and the
/// running extrema behind Fbar, Fbar_Lambda and Funder.
///
/// [0, inf) is cut into cells of equal dyadic width. Each cell is integrated
/// once, on pieces of constant sign, and its prefix sums and prefix extrema are
/// kept; a query finishes with one partial cell. Cells are appended on demand
/// under an exclusive lock, so concurrent readers are safe.
class PrimitiveCalculus {
public:
    explicit PrimitiveCalculus(Nonlinearity f, double p = 2.0, double Lambda = 1.0, double tol_quad = 1e-10);

    PrimitiveCalculus(const PrimitiveCalculus&) = delete;
    PrimitiveCalculus& operator=(const PrimitiveCalculus&) = delete;

    [[nodiscard]] const Nonlinearity& nonlinearity() const { return f_; }
    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] double Lambda() const { return Lambda_; }
    [[nodiscard]] double tol() const { return tol_; }
    [[nodiscard]] double cell_width() const { return h_; }

    [[nodiscard]] double F(double s) const;
    [[nodiscard]] double Fplus(double s) const;
    [[nodiscard]] double Fminus(double s) const;
    [[nodiscard]] double F_Lambda(double s) const;

    /// min / max of F over [0, s].
    [[nodiscard]] double running_min(double s) const;
    [[nodiscard]] double running_max(double s) const;
    [[nodiscard]] double running_min_Lambda(double s) const;

    [[nodiscard]] double Fbar(double s) const;
    [[nodiscard]] double Fbar_Lambda(double s) const;
    /// min over t in [0, s1] of the integral of f over [t, s2]; needs s1 <= s2.
    [[nodiscard]] double Funder(double s1, double s2) const;

    /// All primitive values at s in one pass.
    struct Values {
        double F = 0.0;
        double Fplus = 0.0;
        double Fminus = 0.0;
        double F_Lambda = 0.0;
        double min_F = 0.0;
        double max_F = 0.0;
        double min_F_Lambda = 0.0;
    };
    [[nodiscard]] Values values(double s) const;

    [[nodiscard]] std::size_t cached_cells() const;

private:
    struct Critical {
        double s;
        double F;
        double F_Lambda;
    };
    struct Cell {
        double plus_start = 0.0;   // integral of f+ over [0, start]
        double minus_start = 0.0;  // integral of f- over [0, start]
        double min_start = 0.0;    // extrema over [0, start]
        double max_start = 0.0;
        double min_L_start = 0.0;
        std::vector<Critical> crit;  // sign changes of f inside the cell
    };
    struct Partial {
        double plus = 0.0;
        double minus = 0.0;
    };

    Partial integrate_span(double a, double b) const;
    Partial small_argument(double s) const;
    void extend_to(std::size_t k) const;
    Cell cell(std::size_t k) const;

    Nonlinearity f_;
    double p_;
    double Lambda_;
    double tol_;
    double h_;
    bool reciprocal_;
    mutable std::shared_mutex mu_;
    mutable std::vector<Cell> cells_;
};

}  // namespace oscilla
