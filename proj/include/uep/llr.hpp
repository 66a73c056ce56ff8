#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace uep {

using LlrVector = std::vector<double>;

// Positive LLR favors bit 0. Saturation magnitude shared by the SPA decoder
// and the composite graph decoder.
constexpr double kLlrMax = 50.0;

// Clamp to [-kLlrMax, kLlrMax]; +-inf saturate, NaN maps to 0 (no information).
inline double clamp_llr(double x) {
    if (std::isnan(x)) return 0.0;
    return std::clamp(x, -kLlrMax, kLlrMax);
}

// Hard decision: tie at 0 resolves to bit 0.
inline int hard_bit(double llr) { return llr < 0.0 ? 1 : 0; }

// 2*atanh(tanh(a/2)*tanh(b/2)) in the numerically stable log-domain form
// log((1+e^{a+b})/(e^a+e^b)). Exact for the whole double range.
inline double boxplus(double a, double b) {
    const double s = a + b;
    const double d = a - b;
    return std::max(0.0, s) + std::log1p(std::exp(-std::abs(s))) -
           (std::max(a, b) + std::log1p(std::exp(-std::abs(d))));
}

} // namespace uep
