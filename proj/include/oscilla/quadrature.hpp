#pragma once

#include <functional>

namespace oscilla {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (7/15) integral of f over [a, b]. Throws
/// QuadratureFailure when the error estimate stays above the tolerance
/// after `max_depth` bisection levels.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     unsigned max_depth = 18);

/// Tail integral of u^{-a} sin(u) over [u0, inf) for a > 1.
double oscillatory_tail(double u0, double a, double rel_tol);

}  // namespace oscilla
