#pragma once

#include <cstdint>
#include <random>

#include "nqs/rbm.hpp"

namespace nqs::testing {

inline cplx random_cplx(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    const double re = u(rng);
    const double im = u(rng);
    return {re, im};
}

/// Entries with independent uniform real and imaginary parts in [-scale, scale].
inline RbmParams random_params(int L, int Nh, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto p = RbmParams::zeros(L, Nh);
    for (int j = 0; j < L; ++j) p.a[j] = random_cplx(rng, scale);
    for (int k = 0; k < Nh; ++k) p.b[k] = random_cplx(rng, scale);
    for (int j = 0; j < L; ++j)
        for (int k = 0; k < Nh; ++k) p.W(j, k) = random_cplx(rng, scale);
    return p;
}

inline TranslationInvariantRbm random_ti(int L, int alpha, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto t = TranslationInvariantRbm::zeros(L, alpha);
    t.a0 = random_cplx(rng, scale);
    for (int k = 0; k < alpha; ++k) {
        t.b_level[k] = random_cplx(rng, scale);
        for (int r = 0; r < L; ++r) t.filters(k, r) = random_cplx(rng, scale);
    }
    return t;
}

/// e^{Σ a σ} Π cosh θ_k as a plain complex product.
inline cplx direct_psi(const RbmParams& p, const SpinConfig& s) {
    cplx v = 1.0;
    for (int j = 0; j < p.L; ++j) v *= std::exp(static_cast<double>(s.spin0(j)) * p.a[j]);
    for (int k = 0; k < p.Nh(); ++k) {
        cplx t = p.b[k];
        for (int j = 0; j < p.L; ++j) t += static_cast<double>(s.spin0(j)) * p.W(j, k);
        v *= std::cosh(t);
    }
    return v;
}

inline double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace nqs::testing
