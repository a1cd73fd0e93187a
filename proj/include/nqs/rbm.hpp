#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "nqs/constants.hpp"
#include "nqs/error.hpp"
#include "nqs/spinspace.hpp"

namespace nqs {

/// Visible biases a, hidden biases b and weights W (L × Nh).
struct RbmParams {
    int L = 0;
    Eigen::VectorXcd a;
    Eigen::VectorXcd b;
    Eigen::MatrixXcd W;

    static RbmParams zeros(int L, int Nh) {
        detail::require(L >= 1 && L <= kMaxSites, "RbmParams: L must be in [1, 30]");
        detail::require(Nh >= 0 && Nh % L == 0, "RbmParams: Nh must be a nonnegative multiple of L");
        RbmParams p;
        p.L = L;
        p.a = Eigen::VectorXcd::Zero(L);
        p.b = Eigen::VectorXcd::Zero(Nh);
        p.W = Eigen::MatrixXcd::Zero(L, Nh);
        return p;
    }

    [[nodiscard]] int Nh() const noexcept { return static_cast<int>(b.size()); }
    [[nodiscard]] int levels() const noexcept { return L > 0 ? Nh() / L : 0; }

    void validate() const {
        detail::require(L >= 1 && L <= kMaxSites, "RbmParams: L must be in [1, 30]");
        detail::require(a.size() == L, "RbmParams: a must have length L");
        detail::require(W.rows() == L && W.cols() == b.size(), "RbmParams: W must be L x Nh");
        detail::require(Nh() % L == 0, "RbmParams: Nh must be a multiple of L");
        detail::require(a.allFinite() && b.allFinite() && W.allFinite(), "RbmParams: entries must be finite");
    }
};

/// ln|ψ| and the accumulated (unreduced) argument of ψ.
struct LogAmplitude {
    double log_mod = 0.0;
    double arg = 0.0;

    [[nodiscard]] bool is_zero() const noexcept { return log_mod == -std::numeric_limits<double>::infinity(); }

    /// ψ · e^{-shift}.
    [[nodiscard]] cplx value(double shift = 0.0) const {
        if (is_zero()) return {0.0, 0.0};
        return std::polar(std::exp(log_mod - shift), arg);
    }

    LogAmplitude& operator+=(const LogAmplitude& o) {
        log_mod += o.log_mod;
        arg = (std::isinf(log_mod) && log_mod < 0) ? 0.0 : arg + o.arg;
        return *this;
    }
};

namespace detail {

/// ln|cosh θ| and Arg cosh θ without overflow for large |Re θ|.
///
/// For u ≥ 0, cosh(u + iv) = (e^u / 2)(e^{iv} + e^{-2u-iv}); cosh is even, so
/// u < 0 is mirrored.
inline LogAmplitude log_cosh(cplx theta) {
    double u = theta.real();
    double v = theta.imag();
    if (u < 0) {
        u = -u;
        v = -v;
    }
    const double e = std::exp(-2.0 * u);
    const double re = std::cos(v) * (1.0 + e);
    const double im = std::sin(v) * -std::expm1(-2.0 * u);
    const double log_mod = u - std::numbers::ln2 + 0.5 * std::log(re * re + im * im);
    const double floor = std::log(8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(theta)));
    if (!(log_mod > floor)) return {-std::numeric_limits<double>::infinity(), 0.0};
    return {log_mod, std::atan2(im, re)};
}

inline double log_cosh_real(double x) {
    x = std::abs(x);
    return x - std::numbers::ln2 + std::log1p(std::exp(-2.0 * x));
}

}  // namespace detail

/// θ_k = b_k + Σ_j σ_j W_{j,k}, k 1-based.
inline cplx effective_angle(const RbmParams& p, const SpinConfig& s, int k) {
    detail::require(k >= 1 && k <= p.Nh(), "effective_angle: hidden index out of range");
    detail::require(s.length() == p.L, "effective_angle: length mismatch");
    cplx t = p.b[k - 1];
    for (int j = 0; j < p.L; ++j) t += static_cast<double>(s.spin0(j)) * p.W(j, k - 1);
    return t;
}

namespace detail {

inline LogAmplitude visible_part(const RbmParams& p, const SpinConfig& s) {
    LogAmplitude out;
    for (int j = 0; j < p.L; ++j) {
        const double sj = s.spin0(j);
        out.log_mod += sj * p.a[j].real();
        out.arg += sj * p.a[j].imag();
    }
    return out;
}

/// Σ_{k in [k_lo, k_hi)} log cosh θ_k, 0-based hidden range.
inline LogAmplitude hidden_part(const RbmParams& p, const SpinConfig& s, int k_lo, int k_hi) {
    LogAmplitude out;
    for (int k = k_lo; k < k_hi; ++k) {
        cplx t = p.b[k];
        for (int j = 0; j < p.L; ++j) t += static_cast<double>(s.spin0(j)) * p.W(j, k);
        out += log_cosh(t);
        if (out.is_zero()) return out;
    }
    return out;
}

}  // namespace detail

inline LogAmplitude log_psi(const RbmParams& p, const SpinConfig& s) {
    detail::require(s.length() == p.L, "log_psi: length mismatch");
    LogAmplitude out = detail::visible_part(p, s);
    out += detail::hidden_part(p, s, 0, p.Nh());
    return out;
}

/// ψ(s1)/ψ(s2) from the log-domain amplitudes.
inline cplx psi_ratio(const RbmParams& p, const SpinConfig& s1, const SpinConfig& s2) {
    const LogAmplitude l2 = log_psi(p, s2);
    if (l2.is_zero()) throw NumericalError("psi_ratio: psi(s2) is zero");
    const LogAmplitude l1 = log_psi(p, s1);
    if (l1.is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(l1.log_mod - l2.log_mod), l1.arg - l2.arg);
}

/// Keeps the first Nh_keep hidden nodes.
inline RbmParams truncate(const RbmParams& p, int Nh_keep) {
    detail::require(Nh_keep >= 0 && Nh_keep <= p.Nh(), "truncate: Nh_keep out of range");
    detail::require(Nh_keep % p.L == 0, "truncate: Nh_keep must be a multiple of L");
    RbmParams out;
    out.L = p.L;
    out.a = p.a;
    out.b = p.b.head(Nh_keep);
    out.W = p.W.leftCols(Nh_keep);
    return out;
}

/// Hidden layer of `first` followed by that of `second`; visible biases add.
inline RbmParams concatenate(const RbmParams& first, const RbmParams& second) {
    detail::require(first.L == second.L, "concatenate: L mismatch");
    RbmParams out = RbmParams::zeros(first.L, first.Nh() + second.Nh());
    out.a = first.a + second.a;
    out.b << first.b, second.b;
    out.W << first.W, second.W;
    return out;
}

/// Translation-invariant parametrization: one filter of length L per level.
///
/// filters(k̃-1, r) couples hidden node j_c of level k̃ to spin j_c + r (mod L).
struct TranslationInvariantRbm {
    int L = 0;
    cplx a0{0.0, 0.0};
    Eigen::VectorXcd b_level;
    Eigen::MatrixXcd filters;

    static TranslationInvariantRbm zeros(int L, int alpha) {
        detail::require(L >= 1 && L <= kMaxSites, "TranslationInvariantRbm: L must be in [1, 30]");
        detail::require(alpha >= 0, "TranslationInvariantRbm: alpha must be >= 0");
        TranslationInvariantRbm t;
        t.L = L;
        t.b_level = Eigen::VectorXcd::Zero(alpha);
        t.filters = Eigen::MatrixXcd::Zero(alpha, L);
        return t;
    }

    [[nodiscard]] int alpha() const noexcept { return static_cast<int>(b_level.size()); }
    [[nodiscard]] int Nh() const noexcept { return alpha() * L; }
    [[nodiscard]] int num_params() const noexcept { return 1 + alpha() + alpha() * L; }

    void validate() const {
        detail::require(L >= 1 && L <= kMaxSites, "TranslationInvariantRbm: L must be in [1, 30]");
        detail::require(filters.rows() == b_level.size() && filters.cols() == L,
                        "TranslationInvariantRbm: filters must be alpha x L");
        detail::require(std::isfinite(a0.real()) && std::isfinite(a0.imag()) && b_level.allFinite() &&
                            filters.allFinite(),
                        "TranslationInvariantRbm: entries must be finite");
    }

    /// Flat parameter vector [a0, b_level..., filters row-major].
    [[nodiscard]] Eigen::VectorXcd flatten() const {
        Eigen::VectorXcd v(num_params());
        v[0] = a0;
        for (int k = 0; k < alpha(); ++k) v[1 + k] = b_level[k];
        for (int k = 0; k < alpha(); ++k)
            for (int r = 0; r < L; ++r) v[1 + alpha() + k * L + r] = filters(k, r);
        return v;
    }

    void unflatten(const Eigen::VectorXcd& v) {
        detail::require(v.size() == num_params(), "unflatten: size mismatch");
        a0 = v[0];
        for (int k = 0; k < alpha(); ++k) b_level[k] = v[1 + k];
        for (int k = 0; k < alpha(); ++k)
            for (int r = 0; r < L; ++r) filters(k, r) = v[1 + alpha() + k * L + r];
    }
};

/// W_{j,k} = filter_{k̃}((j - j_c) mod L), b_k = b_level_{k̃}, a_j = a0.
inline RbmParams expand(const TranslationInvariantRbm& t) {
    t.validate();
    const int L = t.L;
    RbmParams p = RbmParams::zeros(L, t.Nh());
    p.a.setConstant(t.a0);
    for (int lv = 0; lv < t.alpha(); ++lv) {
        for (int jc = 0; jc < L; ++jc) {
            const int k = lv * L + jc;
            p.b[k] = t.b_level[lv];
            for (int j = 0; j < L; ++j) p.W(j, k) = t.filters(lv, ((j - jc) % L + L) % L);
        }
    }
    return p;
}

/// Effective angles θ_{k̃, j_c} of a translation-invariant RBM, level-major.
inline void ti_angles(const TranslationInvariantRbm& t, const SpinConfig& s, std::vector<cplx>& theta) {
    const int L = t.L;
    theta.assign(static_cast<std::size_t>(t.Nh()), cplx{});
    int sig[2 * kMaxSites];
    for (int j = 0; j < L; ++j) sig[j] = sig[j + L] = s.spin0(j);
    for (int lv = 0; lv < t.alpha(); ++lv) {
        const cplx* f = &t.filters(lv, 0);
        const std::ptrdiff_t stride = t.filters.outerStride();
        for (int jc = 0; jc < L; ++jc) {
            cplx acc = t.b_level[lv];
            for (int r = 0; r < L; ++r) acc += static_cast<double>(sig[jc + r]) * f[r * stride];
            theta[static_cast<std::size_t>(lv * L + jc)] = acc;
        }
    }
}

inline LogAmplitude log_psi(const TranslationInvariantRbm& t, const SpinConfig& s) {
    detail::require(s.length() == t.L, "log_psi: length mismatch");
    LogAmplitude out;
    const double m = s.magnetization();
    out.log_mod = m * t.a0.real();
    out.arg = m * t.a0.imag();
    std::vector<cplx> theta;
    ti_angles(t, s, theta);
    for (const cplx& th : theta) {
        out += detail::log_cosh(th);
        if (out.is_zero()) break;
    }
    return out;
}

/// Σ_j (Re W_{j,k})² + β₁² (Im W_{j,k})² for one hidden node (0-based column).
inline double node_score(const Eigen::MatrixXcd& W, int k) {
    const double b1sq = beta1() * beta1();
    double s = 0.0;
    for (int j = 0; j < W.rows(); ++j) s += std::norm(W(j, k).real()) + b1sq * std::norm(W(j, k).imag());
    return s;
}

/// Groups hidden nodes into levels by descending node score and orders each
/// level by center site (argmax of the per-edge score). Ties keep the
/// original order.
inline RbmParams reorder_hidden_nodes(const RbmParams& p) {
    p.validate();
    const int L = p.L;
    const int Nh = p.Nh();
    const double b1sq = beta1() * beta1();
    std::vector<double> score(Nh);
    std::vector<int> center(Nh);
    for (int k = 0; k < Nh; ++k) {
        score[k] = node_score(p.W, k);
        double best = -1.0;
        for (int j = 0; j < L; ++j) {
            const double e = std::norm(p.W(j, k).real()) + b1sq * std::norm(p.W(j, k).imag());
            if (e > best) {
                best = e;
                center[k] = j;
            }
        }
    }
    std::vector<int> order(Nh);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return score[x] > score[y]; });
    for (int lv = 0; lv < Nh / L; ++lv) {
        auto first = order.begin() + lv * L;
        std::stable_sort(first, first + L, [&](int x, int y) { return center[x] < center[y]; });
    }
    RbmParams out = RbmParams::zeros(L, Nh);
    out.a = p.a;
    for (int k = 0; k < Nh; ++k) {
        out.b[k] = p.b[order[k]];
        out.W.col(k) = p.W.col(order[k]);
    }
    return out;
}

/// Translation-invariant form of the same sort: each filter is rotated so its
/// largest-score entry sits at offset 0 (a relabeling of j_c), then levels are
/// ordered by descending score. The represented state is unchanged.
inline TranslationInvariantRbm canonicalize(const TranslationInvariantRbm& t) {
    t.validate();
    const int L = t.L;
    const int alpha = t.alpha();
    const double b1sq = beta1() * beta1();
    std::vector<double> score(alpha, 0.0);
    Eigen::MatrixXcd centered(alpha, L);
    for (int lv = 0; lv < alpha; ++lv) {
        int peak = 0;
        double best = -1.0;
        for (int r = 0; r < L; ++r) {
            const double e = std::norm(t.filters(lv, r).real()) + b1sq * std::norm(t.filters(lv, r).imag());
            score[lv] += e;
            if (e > best) {
                best = e;
                peak = r;
            }
        }
        for (int r = 0; r < L; ++r) centered(lv, r) = t.filters(lv, (r + peak) % L);
    }
    std::vector<int> order(alpha);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return score[x] > score[y]; });
    TranslationInvariantRbm out = TranslationInvariantRbm::zeros(L, alpha);
    out.a0 = t.a0;
    for (int lv = 0; lv < alpha; ++lv) {
        out.b_level[lv] = t.b_level[order[lv]];
        out.filters.row(lv) = centered.row(order[lv]);
    }
    return out;
}

}  // namespace nqs
