#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "oscilla/error.hpp"

namespace oscilla {

/// Root of `f` in [a, b] given a sign change, polished until the bracket is
/// narrower than `x_tol`. Endpoint roots are returned as-is.
template <class F>
double bracketed_root(F&& f, double a, double b, double x_tol, std::uintmax_t max_iter = 200) {
    const double fa = f(a);
    if (fa == 0.0) return a;
    const double fb = f(b);
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0)) {
        throw Error(ErrorCode::DomainError, "bracketed_root: no sign change on the bracket");
    }
    auto done = [x_tol](double lo, double hi) { return std::abs(hi - lo) <= x_tol; };
    std::uintmax_t iters = max_iter;
    const auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, done, iters);
    return 0.5 * (lo + hi);
}

/// Local minimiser of `f` on [a, b] (Brent's parabolic/golden-section search).
template <class F>
std::pair<double, double> local_minimum(F&& f, double a, double b, int bits = 40) {
    std::uintmax_t iters = 200;
    return boost::math::tools::brent_find_minima(f, a, b, bits, iters);
}

}  // namespace oscilla
