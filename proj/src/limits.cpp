#include "oscilla/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "oscilla/error.hpp"

namespace oscilla {

const char* to_string(LimitClass c) {
    switch (c) {
        case LimitClass::FinitePair: return "finite_pair";
        case LimitClass::PlusInfinite: return "plus_infinite";
        case LimitClass::MinusInfinite: return "minus_infinite";
        case LimitClass::BothZero: return "both_zero";
    }
    return "unknown";
}

LimitEstimate estimate_limits(const PrimitiveCalculus& pc, Direction ell, LimitTarget which,
                              const LimitOptions& opts) {
    if (opts.points < 8 || !(opts.decades > 0.0) || !(opts.tail_decades > 0.0) ||
        opts.tail_decades > opts.decades || !(opts.anchor > 0.0)) {
        throw Error(ErrorCode::DomainError, "invalid limit-estimation window");
    }
    LimitEstimate est;
    est.target = which;
    est.exponent = which == LimitTarget::F ? pc.p() : 2.0;
    const double sign = ell == Direction::Infinity ? 1.0 : -1.0;
    const double tail_start = opts.decades - opts.tail_decades;

    std::vector<double> ratios;
    for (int i = 0; i < opts.points; ++i) {
        const double t = opts.decades * static_cast<double>(i) / (opts.points - 1);
        if (t < tail_start) continue;
        const double s = opts.anchor * std::pow(10.0, sign * t);
        const auto v = pc.values(s);
        const double num = which == LimitTarget::F ? v.F : v.F_Lambda;
        est.window.push_back(s);
        ratios.push_back(num / std::pow(s, est.exponent));
    }
    if (ratios.size() < 4) throw Error(ErrorCode::DomainError, "limit tail window holds too few points");

    const std::size_t half = ratios.size() / 2;
    auto [i1, s1] = std::minmax_element(ratios.begin(), ratios.begin() + half);
    auto [i2, s2] = std::minmax_element(ratios.begin() + half, ratios.end());
    const double inf1 = *i1, sup1 = *s1, inf2 = *i2, sup2 = *s2;
    const double k = opts.divergence_factor;
    constexpr double floor = 1e-12;
    constexpr double inf = std::numeric_limits<double>::infinity();

    const bool minus_div = inf2 < -floor && -inf2 > k * std::abs(inf1);
    const bool plus_div = sup2 > floor && sup2 > k * std::abs(sup1);
    const double mag1 = std::max(std::abs(inf1), std::abs(sup1));
    const double mag2 = std::max(std::abs(inf2), std::abs(sup2));
    const bool vanishing = mag2 == 0.0 || (mag2 * k <= mag1);

    est.L_minus = std::min(inf1, inf2);
    est.L_plus = std::max(sup1, sup2);
    if (minus_div) {
        est.classification = LimitClass::MinusInfinite;
        est.L_minus = -inf;
        if (plus_div) est.L_plus = inf;
    } else if (plus_div) {
        est.classification = LimitClass::PlusInfinite;
        est.L_plus = inf;
    } else if (vanishing) {
        est.classification = LimitClass::BothZero;
        est.L_minus = 0.0;
        est.L_plus = 0.0;
    } else {
        est.classification = LimitClass::FinitePair;
    }
    return est;
}

}  // namespace oscilla
