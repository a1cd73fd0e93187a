#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "nqs/bounds.hpp"
#include "nqs/constants.hpp"
#include "nqs/error.hpp"
#include "nqs/parallel.hpp"
#include "nqs/profile.hpp"
#include "nqs/rbm.hpp"

namespace nqs {

/// filters_{k̃}(r) = c_w λ(k̃) μ(|r|_circ), b_level = c_b λ(k̃) μ(0), a0 from the profile.
inline TranslationInvariantRbm build_lrfd(const DecayProfile& profile, int L, int alpha) {
    profile.validate();
    detail::require(alpha >= 0, "build_lrfd: alpha must be >= 0");
    detail::require(alpha <= profile.lambda.max_level(), "build_lrfd: level table shorter than alpha");
    detail::require(L / 2 <= profile.mu.max_distance(), "build_lrfd: orbital table shorter than L/2");
    auto t = TranslationInvariantRbm::zeros(L, alpha);
    t.a0 = profile.a0;
    std::vector<double> mu(static_cast<std::size_t>(L / 2 + 1));
    for (int r = 0; r <= L / 2; ++r) mu[r] = profile.mu(r);
    for (int lv = 1; lv <= alpha; ++lv) {
        const double lam = profile.lambda(lv);
        t.b_level[lv - 1] = profile.c_b * lam * mu[0];
        for (int off = 0; off < L; ++off) {
            const int r = std::min(off, L - off);
            t.filters(lv - 1, off) = profile.c_w * lam * mu[r];
        }
    }
    return t;
}

/// The 1-range stabilizer RBM of the cluster Hamiltonian as a single level.
inline TranslationInvariantRbm cluster_filter(int L) {
    detail::require(L >= 3, "cluster RBM needs L >= 3");
    using std::numbers::pi;
    auto t = TranslationInvariantRbm::zeros(L, 1);
    t.b_level[0] = {0.0, pi / 4};
    t.filters(0, 0) = {0.0, 3 * pi / 4};
    t.filters(0, 1) = {0.0, pi / 4};
    t.filters(0, L - 1) = {0.0, pi / 2};
    return t;
}

inline RbmParams build_cluster_rbm(int L) { return expand(cluster_filter(L)); }

/// Cluster level followed by alpha LRFD levels of `profile`; a = 0.
inline RbmParams build_perturbed_cluster(int L, const DecayProfile& profile, int alpha) {
    auto pert = build_lrfd(profile, L, alpha);
    pert.a0 = 0.0;
    return concatenate(build_cluster_rbm(L), expand(pert));
}

/// Translation-invariant form of build_perturbed_cluster.
inline TranslationInvariantRbm perturbed_cluster_ti(int L, const DecayProfile& profile, int alpha) {
    auto pert = build_lrfd(profile, L, alpha);
    auto c = cluster_filter(L);
    auto t = TranslationInvariantRbm::zeros(L, alpha + 1);
    t.b_level[0] = c.b_level[0];
    t.filters.row(0) = c.filters.row(0);
    for (int lv = 0; lv < alpha; ++lv) {
        t.b_level[lv + 1] = pert.b_level[lv];
        t.filters.row(lv + 1) = pert.filters.row(lv);
    }
    return t;
}

/// Real positive RBM peaked at the all-up configuration: W = b = μ₀ λ(k̃), a = 0.
inline TranslationInvariantRbm build_kron_delta(int L, double mu0, const std::vector<double>& lambda, int alpha) {
    detail::require(mu0 > 0.0, "build_kron_delta: mu0 must be positive");
    detail::require(alpha >= 0 && alpha <= static_cast<int>(lambda.size()),
                    "build_kron_delta: level table shorter than alpha");
    auto t = TranslationInvariantRbm::zeros(L, alpha);
    for (int lv = 0; lv < alpha; ++lv) {
        detail::require(lambda[lv] >= 0.0, "build_kron_delta: lambda must be nonnegative");
        t.b_level[lv] = mu0 * lambda[lv];
        t.filters.row(lv).setConstant(mu0 * lambda[lv]);
    }
    return t;
}

/// ln|ψ(σ₀)/ψ(σ₁)| for the Kronecker-delta RBM, σ₁ = σ₀ with one spin flipped:
/// Σ_k̃ L [ln cosh((L+1)μ₀λ) - ln cosh((L-1)μ₀λ)].
inline double kron_log_ratio(int L, double mu0, const std::vector<double>& lambda) {
    double acc = 0.0;
    for (double lam : lambda) {
        const double x = (L - 1) * mu0 * lam;
        const double d = 2 * mu0 * lam;
        // ln cosh(x+d) - ln cosh(x) = ln(1 + 2 sinh(x+d/2) sinh(d/2) / cosh x)
        acc += L * std::log1p(2.0 * std::sinh(x + 0.5 * d) * std::sinh(0.5 * d) / std::cosh(x));
    }
    return acc;
}

struct Beta3Certificate {
    double x0 = 0.5;
    double beta3 = 0.0;
    int grid = 0;
    int attempts = 0;
};

/// β₃ with cosh(x+Δx)/cosh(x) ≥ exp(β₃ x Δx) for 0 < Δx < x < x₀, checked on a
/// grid; shrunk by 10% until the grid check passes.
inline Beta3Certificate certify_beta3(double x0 = 0.5, int grid = 400) {
    detail::require(x0 > 0.0 && grid >= 2, "certify_beta3: bad arguments");
    Beta3Certificate c;
    c.x0 = x0;
    c.grid = grid;
    double beta3 = std::tanh(x0) / x0 * (1.0 - x0 * x0 / 6.0);
    for (c.attempts = 1; c.attempts <= 50; ++c.attempts) {
        const double b = beta3;
        const int bad = parallel_reduce<int>(
            static_cast<std::size_t>(grid), 16, 0,
            [&](std::size_t lo, std::size_t hi) {
                int fails = 0;
                for (std::size_t i = lo; i < hi; ++i) {
                    const double x = x0 * (static_cast<double>(i) + 1.0) / (grid + 1.0);
                    for (int m = 1; m <= grid; ++m) {
                        const double d = x * m / (grid + 1.0);
                        const double lhs = std::log1p(2.0 * std::sinh(x + 0.5 * d) * std::sinh(0.5 * d) / std::cosh(x));
                        if (!(lhs >= b * x * d)) ++fails;
                    }
                }
                return fails;
            },
            [](int p, int q) { return p + q; });
        if (bad == 0) {
            c.beta3 = beta3;
            return c;
        }
        beta3 *= 0.9;
    }
    throw NumericalError("certify_beta3: no admissible beta3 found");
}

/// Smallest k̃₀ with (L-1)μ₀λ(k̃) < x₀ for every k̃ > k̃₀ (λ nonincreasing).
inline int kron_k0(int L, double mu0, const LevelDecay& lambda, double x0) {
    int k0 = 0;
    while ((L - 1) * mu0 * lambda(k0 + 1) >= x0) {
        if (++k0 > 100000000) throw DivergenceError("kron_k0: lambda does not decay below x0");
    }
    return k0;
}

/// exp(2β₃ L(L-1) μ₀² Σ_{k̃>k̃₀} λ²(k̃)), a lower bound on |ψ(σ₀)/ψ(σ₁)|.
inline double kron_ratio_lower_bound(int L, double mu0, const LevelDecay& lambda, int k0, double beta3) {
    detail::require(beta3 > 0.0 && beta3 < 1.0, "kron_ratio_lower_bound: beta3 must be in (0, 1)");
    detail::require(k0 >= 0, "kron_ratio_lower_bound: k0 must be >= 0");
    const double P = P_tail(lambda, k0);
    return std::exp(2.0 * beta3 * L * (L - 1) * mu0 * mu0 * P);
}

/// η(j, k̃) = (Re W_{j,kc})² + β₁² (Im W_{j,kc})² at the center node of each level.
struct EtaSurface {
    int L = 0;
    int alpha = 0;
    Eigen::MatrixXd values;  // L × alpha, values(j-1, k̃-1)

    [[nodiscard]] double operator()(int j, int k) const { return values(j - 1, k - 1); }

    /// max_j η(j, k̃) per level.
    [[nodiscard]] std::vector<double> ridge() const {
        std::vector<double> out(static_cast<std::size_t>(alpha));
        for (int k = 0; k < alpha; ++k) out[k] = values.col(k).maxCoeff();
        return out;
    }
};

inline EtaSurface eta_surface(const RbmParams& p) {
    p.validate();
    detail::require(p.L % 2 == 1, "eta_surface: L must be odd");
    const double b1sq = beta1() * beta1();
    EtaSurface e;
    e.L = p.L;
    e.alpha = p.levels();
    e.values.resize(p.L, e.alpha);
    for (int lv = 0; lv < e.alpha; ++lv) {
        const int kc = (p.L + 1) / 2 - 1 + lv * p.L;
        for (int j = 0; j < p.L; ++j)
            e.values(j, lv) = std::norm(p.W(j, kc).real()) + b1sq * std::norm(p.W(j, kc).imag());
    }
    return e;
}

inline EtaSurface eta_surface(const TranslationInvariantRbm& t) { return eta_surface(expand(t)); }

struct PowerFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};

/// Least squares of ln y against ln x over points with y > 0.
inline PowerFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require(x.size() == y.size(), "fit_loglog: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    PowerFit f;
    f.points = n;
    if (n < 2) return f;
    const double den = n * sxx - sx * sx;
    if (den == 0.0) return f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

/// Slope of ln(ridge) vs ln k̃ over levels [first_level, alpha].
inline PowerFit ridge_fit(const EtaSurface& e, int first_level = 1) {
    const auto r = e.ridge();
    std::vector<double> x, y;
    for (int k = first_level; k <= e.alpha; ++k) {
        x.push_back(k);
        y.push_back(r[k - 1]);
    }
    return fit_loglog(x, y);
}

}  // namespace nqs
