#pragma once

#include <vector>

#include "oscilla/nonlinearity.hpp"
#include "oscilla/primitive.hpp"

namespace oscilla {

enum class LimitClass { FinitePair, PlusInfinite, MinusInfinite, BothZero };
enum class LimitTarget { F, FLambda };

[[nodiscard]] const char* to_string(LimitClass c);

struct LimitOptions {
    int points = 200;
    double decades = 6.0;
    double tail_decades = 3.0;
    double divergence_factor = 10.0;
    double anchor = 1.0;  ///< grid starts here and moves toward the limit point
};

/// Tail inf / sup of F(s)/s^p (or F_Lambda(s)/s^2) near the limit point.
/// Always a numerical estimate; infinite limits are stored as +-inf.
struct LimitEstimate {
    double L_minus = 0.0;
    double L_plus = 0.0;
    std::vector<double> window;
    LimitClass classification = LimitClass::FinitePair;
    LimitTarget target = LimitTarget::F;
    double exponent = 2.0;
};

[[nodiscard]] LimitEstimate estimate_limits(const PrimitiveCalculus& pc, Direction ell, LimitTarget which,
                                            const LimitOptions& opts = {});

}  // namespace oscilla
