#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>

#include "oscilla/error.hpp"

namespace oscilla::ode {

template <std::size_t D>
using Vec = std::array<double, D>;

/// Dormand-Prince 5(4) explicit pair. step() advances with the 5th-order
/// solution and returns the embedded difference as the error estimate.
template <std::size_t D>
class DormandPrince54 {
public:
    using Rhs = std::function<void(double, const Vec<D>&, Vec<D>&)>;

    explicit DormandPrince54(Rhs f) : f_(std::move(f)) {}

    void step(double r, const Vec<D>& y, double h, Vec<D>& out, Vec<D>& err) const {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                                a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                                b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                                e6 = 22.0 / 525, e7 = -1.0 / 40;
        Vec<D> k1, k2, k3, k4, k5, k6, k7, t;
        f_(r, y, k1);
        for (std::size_t i = 0; i < D; ++i) t[i] = y[i] + h * a21 * k1[i];
        f_(r + c2 * h, t, k2);
        for (std::size_t i = 0; i < D; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f_(r + c3 * h, t, k3);
        for (std::size_t i = 0; i < D; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f_(r + c4 * h, t, k4);
        for (std::size_t i = 0; i < D; ++i)
            t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f_(r + c5 * h, t, k5);
        for (std::size_t i = 0; i < D; ++i)
            t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f_(r + h, t, k6);
        for (std::size_t i = 0; i < D; ++i)
            out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f_(r + h, out, k7);
        for (std::size_t i = 0; i < D; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }

    [[nodiscard]] Vec<D> advance(double r, const Vec<D>& y, double h) const {
        Vec<D> out, err;
        step(r, y, h, out, err);
        return out;
    }

private:
    Rhs f_;
};

struct StepControl {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-6;
    double h_min = 1e-300;
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
};

template <std::size_t D>
struct Step {
    double r0;
    Vec<D> y0;
    double h;
    Vec<D> y1;
    Vec<D> err;
};

enum class Action { Continue, Stop };

/// Adaptive driver. After each accepted step `on_step(step, r, y)` is called
/// with (r, y) preset to the step end; it may move them back to an event
/// inside the step and returns Stop to end the integration.
template <std::size_t D, class OnStep, class HMax>
double drive(const DormandPrince54<D>& dp, double r, Vec<D> y, double r_end, const StepControl& ctl,
             OnStep&& on_step, HMax&& h_max_at) {
    double h = std::min(ctl.h_init, r_end - r);
    Step<D> st;
    for (std::size_t n = 0; n < ctl.max_steps && r < r_end; ++n) {
        h = std::min({h, r_end - r, ctl.h_max, h_max_at(r)});
        dp.step(r, y, h, st.y1, st.err);
        double en = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < D; ++i) {
            if (!std::isfinite(st.y1[i])) finite = false;
            const double sc = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(st.y1[i]));
            en = std::max(en, std::abs(st.err[i]) / sc);
        }
        if (!finite) en = 1e10;
        if (en <= 1.0) {
            st.r0 = r;
            st.y0 = y;
            st.h = h;
            double r_new = r + h;
            Vec<D> y_new = st.y1;
            const Action a = on_step(st, r_new, y_new);
            r = r_new;
            y = y_new;
            if (a == Action::Stop) return r;
            const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            h *= fac;
        } else {
            h *= std::clamp(0.9 * std::pow(en, -0.25), 0.1, 0.9);
            if (h < ctl.h_min || h <= std::abs(r) * 1e-15) {
                std::ostringstream os;
                os << "step size underflow at r = " << r;
                throw Error(ErrorCode::NonintegrableStep, os.str());
            }
        }
    }
    if (r < r_end) throw Error(ErrorCode::NonintegrableStep, "step budget exhausted");
    return r;
}

}  // namespace oscilla::ode
