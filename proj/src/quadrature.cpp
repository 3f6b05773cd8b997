#include "oscilla/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oscilla/error.hpp"

namespace oscilla {

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     unsigned max_depth) {
    QuadResult out;
    if (a == b) return out;
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    // boost's error estimate carries an absolute floor near machine epsilon,
    // so the panel is mapped to [0, 1] and the integrand normalised to unit size.
    const double w = b - a;
    double fs = 0.0;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double v = std::abs(f(a + t * w));
        if (std::isfinite(v)) fs = std::max(fs, v);
    }
    if (!(fs > 0.0)) fs = 1.0;
    auto g = [&f, a, w, fs](double t) { return f(a + t * w) / fs; };
    // Rounding of the abscissa alone perturbs f at the level eps |x| / width,
    // relative to its size on the panel; no error estimate can go below that.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)) /
                         std::abs(w);
    const double rel = rel_tol + noise;
    double l1 = 0.0;
    out.value = GK::integrate(g, 0.0, 1.0, 0, rel_tol, &out.error, &l1);
    if (!(out.error <= rel * std::max(l1, std::abs(out.value)))) {
        out.value = GK::integrate(g, 0.0, 1.0, max_depth, rel_tol, &out.error, &l1);
    }
    const double jac = std::abs(w) * fs;
    out.value *= w * fs;
    out.error *= jac;
    l1 *= jac;
    // Accept up to a few hundred times the requested tolerance: GK error
    // estimates are pessimistic on smooth panels.
    const double scale = std::max(l1, std::abs(out.value));
    const double budget = 256.0 * rel * scale + 1e-300;
    if (!std::isfinite(out.value) || out.error > budget) {
        std::ostringstream os;
        os.precision(17);
        os << "integral over [" << a << ", " << b << "] has error " << out.error << " > " << budget;
        throw Error(ErrorCode::QuadratureFailure, os.str());
    }
    return out;
}

double oscillatory_tail(double u0, double a, double rel_tol) {
    constexpr double pi = std::numbers::pi;
    // Integrate numerically to a multiple of 2 pi far enough out, then use the
    // asymptotic expansion at V = 2 pi k where sin V = 0 and cos V = 1:
    //   int_V^inf u^-a sin u du ~ V^-a (1 - a(a+1)/V^2 + a(a+1)(a+2)(a+3)/V^4 - ...)
    const double v = 2.0 * pi * std::ceil((std::max(u0, 250.0) + 16.0 * pi) / (2.0 * pi));
    // Each half period [k pi, (k+1) pi] is integrated in the local variable
    // tau = u - k pi so that sin is evaluated without large-argument rounding.
    double sum = 0.0;
    const double k0 = std::floor(u0 / pi);
    const double k1 = std::round(v / pi);
    for (double k = k0; k < k1; k += 1.0) {
        const double base = pi * k;
        const double sgn = std::fmod(k, 2.0) == 0.0 ? 1.0 : -1.0;
        const double t0 = k == k0 ? u0 - base : 0.0;
        auto g = [a, base, sgn](double tau) { return sgn * std::pow(base + tau, -a) * std::sin(tau); };
        sum += integrate(g, t0, pi, rel_tol).value;
    }
    double term = std::pow(v, -a);
    double tail = term;
    for (int k = 0; k < 6; ++k) {
        const double m = 2.0 * k;
        term *= -(a + m) * (a + m + 1.0) / (v * v);
        tail += term;
    }
    return sum + tail;
}

}  // namespace oscilla
