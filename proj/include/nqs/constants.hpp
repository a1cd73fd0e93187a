#pragma once

#include <cmath>
#include <numbers>

namespace nqs {

/// |cos x| ≥ exp(-β₁² x² / 2) on [0, π/3].
inline double beta1() { return 3.0 * std::sqrt(2.0 * std::numbers::ln2) / std::numbers::pi; }

/// Phase-growth constant of the ratio-argument estimate.
inline double beta2() { return 3.0 * std::sqrt(3.0) / std::numbers::pi; }

/// F1(x) = c₁ x + O(x²).
inline double c1() {
    const double b1 = beta1();
    return 4.0 * (1.0 + b1 * b1);
}

/// F2(x) = c₂ x + O(x^{3/2}).
inline double c2() {
    const double b1 = beta1();
    const double b2 = beta2();
    return 4.0 * b1 * b1 + 4.0 * std::sqrt(b1 * b1 * b1 * b1 + 4.0 * b2 * b2);
}

}  // namespace nqs
