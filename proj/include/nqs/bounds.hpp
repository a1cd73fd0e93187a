#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nqs/constants.hpp"
#include "nqs/error.hpp"
#include "nqs/profile.hpp"

namespace nqs {

struct BoundConstants {
    double beta1;
    double beta2;
    double c1;
    double c2;
};

inline BoundConstants bound_constants() { return {beta1(), beta2(), c1(), c2()}; }

/// F1(x) = 2 - 2 exp[-2(1+β₁²)x] cos(4β₂x), written without cancellation:
/// -2 expm1(-αx) + 4 e^{-αx} sin²(2β₂x).
inline double F1(double x) {
    detail::require(x >= 0.0, "F1: x must be nonnegative");
    const double b1 = beta1();
    const double a = 2.0 * (1.0 + b1 * b1);
    const double s = std::sin(2.0 * beta2() * x);
    return -2.0 * std::expm1(-a * x) + 4.0 * std::exp(-a * x) * s * s;
}

/// F2(x) of the expectation-value bound. Each square root uses
/// R² - 2R cos(2φ) + 1 = (R-1)² + 4R sin²φ.
inline double F2(double x) {
    detail::require(x >= 0.0, "F2: x must be nonnegative");
    const double b1sq = beta1() * beta1();
    const double s = std::sin(4.0 * beta2() * x);
    const double m1 = std::expm1(4.0 * x);
    const double m2 = std::expm1(-4.0 * b1sq * x);
    auto root = [&](double rm1) {
        const double R = 1.0 + rm1;
        return std::sqrt(rm1 * rm1 + 4.0 * R * s * s);
    };
    return std::max(std::abs(m1), std::abs(m2)) + std::max(root(m1), root(m2));
}

struct TailSum {
    double value = 0.0;
    std::int64_t switchover = 0;  // first index handled by the analytic remainder
};

/// Σ_{n=a+1}^∞ n^{-s}: direct summation up to the switchover N, then the
/// Euler-Maclaurin expansion of Σ_{n≥N} n^{-s}.
inline TailSum tail_sum_power_detail(std::int64_t a, double s) {
    if (!(s > 1.0)) throw DivergenceError("tail_sum_power: requires s > 1");
    detail::require(a >= 0, "tail_sum_power: a must be >= 0");
    // Size of the first omitted term relative to the leading integral.
    auto omitted = [s](double N) {
        double poch = 1.0;
        for (int i = 0; i < 7; ++i) poch *= s + i;
        return poch / 1209600.0 * (s - 1.0) * std::pow(N, -8.0);
    };
    std::int64_t N = a + 1;
    while (omitted(static_cast<double>(N)) > 1e-17) N = std::max<std::int64_t>(N + 8, N + N / 2);
    long double direct = 0.0L;
    for (std::int64_t n = N - 1; n >= a + 1; --n) direct += std::pow(static_cast<long double>(n), -s);
    const double Nd = static_cast<double>(N);
    const double f = std::pow(Nd, -s);
    const double rem = Nd * f / (s - 1.0) + 0.5 * f + s * f / (12.0 * Nd) -
                       s * (s + 1) * (s + 2) * f / (720.0 * Nd * Nd * Nd) +
                       s * (s + 1) * (s + 2) * (s + 3) * (s + 4) * f / (30240.0 * std::pow(Nd, 5));
    return {static_cast<double>(direct + rem), N};
}

inline double tail_sum_power(std::int64_t a, double s) { return tail_sum_power_detail(a, s).value; }

namespace detail {

/// Σ_{x=N}^∞ 1/(x ln²x) for N ≥ 2: direct up to 1024 then Euler-Maclaurin.
inline double inverse_log_tail(std::int64_t N) {
    const std::int64_t M = std::max<std::int64_t>(N, 1024);
    long double direct = 0.0L;
    for (std::int64_t x = M - 1; x >= N; --x) {
        const long double lx = std::log(static_cast<long double>(x));
        direct += 1.0L / (x * lx * lx);
    }
    const double m = static_cast<double>(M);
    const double l = std::log(m);
    const double f = 1.0 / (m * l * l);
    const double fp = -(l + 2.0) / (m * m * l * l * l);
    return static_cast<double>(direct) + 1.0 / l + 0.5 * f - fp / 12.0;
}

}  // namespace detail

/// P(m) = Σ_{k̃=m+1}^∞ λ²(k̃).
inline TailSum P_tail_detail(const LevelDecay& lambda, int m) {
    detail::require(m >= 0, "P_tail: m must be >= 0");
    const double c2 = lambda.scale * lambda.scale;
    switch (lambda.kind) {
        case LevelDecay::Kind::exponential: {
            const double d = lambda.delta_P;
            if (!(d > 1.0)) throw DivergenceError("P_tail: exponential decay needs delta_P > 1");
            const double q = 1.0 / (d * d);
            return {c2 * std::exp(-2.0 * (m + 1.0 - lambda.shift) * std::log(d)) / (1.0 - q), 0};
        }
        case LevelDecay::Kind::power: {
            if (!(lambda.alpha_P > 0.5)) throw DivergenceError("P_tail: power decay needs alpha_P > 1/2");
            auto t = tail_sum_power_detail(m, 2.0 * lambda.alpha_P);
            t.value *= c2;
            return t;
        }
        case LevelDecay::Kind::inverse_log:
            return {c2 * detail::inverse_log_tail(static_cast<std::int64_t>(m) + 2), 1024};
        case LevelDecay::Kind::table: {
            double acc = 0.0;
            for (int k = static_cast<int>(lambda.table.size()); k > m; --k) acc += lambda.table[k - 1] * lambda.table[k - 1];
            return {acc, 0};
        }
    }
    return {};
}

inline double P_tail(const LevelDecay& lambda, int m) { return P_tail_detail(lambda, m).value; }
inline double P_tail(const DecayProfile& profile, int m) { return P_tail(profile.lambda, m); }

/// Largest circular distance summed in Q(L): (L-1)/2 for odd L, L/2 for even L.
inline int q_range(int L) { return L % 2 == 1 ? (L - 1) / 2 : L / 2; }

inline double orbital_sum(const OrbitalDecay& mu, int L) {
    detail::require(L >= 1, "Q_val: L must be >= 1");
    double s = 0.0;
    for (int r = 0; r <= q_range(L); ++r) s += mu(r);
    return s;
}

/// Q(L) = (Σ_{r=0}^{(L-1)/2} μ(r))².
inline double Q_val(const OrbitalDecay& mu, int L) {
    const double s = orbital_sum(mu, L);
    return s * s;
}
inline double Q_val(const DecayProfile& profile, int L) { return Q_val(profile.mu, L); }

/// An LRFD family whose bounded levels start after `leading_levels` levels
/// that are not covered by the profile (k̃_s). Composite level n > k̃_s carries
/// profile level n - k̃_s.
struct LrfdFamily {
    DecayProfile profile;
    int leading_levels = 0;
};

inline double P_tail(const LrfdFamily& f, int m) {
    if (m < f.leading_levels) throw DomainError("P_tail: m below the first bounded level");
    return P_tail(f.profile.lambda, m - f.leading_levels);
}

/// x = L Q(L) s² P(n), s the prefactor scale of the profile.
inline double composite_x(const LrfdFamily& f, int L, int n) {
    const double s = f.profile.bound_scale();
    return L * Q_val(f.profile, L) * s * s * P_tail(f, n);
}

/// V bound 2 s λ(ℓ) Σ_{r≤(L-1)/2} μ(r) for profile level ℓ.
inline double V_bound(const DecayProfile& p, int L, int level) {
    return 2.0 * p.bound_scale() * p.lambda(level) * orbital_sum(p.mu, L);
}

/// V_k = |Im b_k| + Σ_j |Im W_{j,k}| for a node of profile level ℓ.
inline double V_exact(const DecayProfile& p, int L, int level) {
    double s = 0.0;
    for (int j = 0; j < L; ++j) s += p.mu(std::min(j, L - j));
    const double lam = p.lambda(level);
    return lam * (std::abs(p.c_b.imag()) * p.mu(0) + std::abs(p.c_w.imag()) * s);
}

/// U_k = |Re b_k| + Σ_j |Re W_{j,k}| for a node of profile level ℓ.
inline double U_exact(const DecayProfile& p, int L, int level) {
    double s = 0.0;
    for (int j = 0; j < L; ++j) s += p.mu(std::min(j, L - j));
    const double lam = p.lambda(level);
    return lam * (std::abs(p.c_b.real()) * p.mu(0) + std::abs(p.c_w.real()) * s);
}

namespace detail {

/// Smallest n ≥ lo with pred(n), pred monotone false→true.
template <class Pred>
int first_true(int lo, Pred&& pred, int limit = 1 << 28) {
    if (pred(lo)) return lo;
    int bad = lo;
    int step = 1;
    int good = -1;
    while (true) {
        const long long cand = static_cast<long long>(bad) + step;
        if (cand > limit) throw DivergenceError("level search did not terminate");
        if (pred(static_cast<int>(cand))) {
            good = static_cast<int>(cand);
            break;
        }
        bad = static_cast<int>(cand);
        step *= 2;
    }
    while (good - bad > 1) {
        const int mid = bad + (good - bad) / 2;
        (pred(mid) ? good : bad) = mid;
    }
    return good;
}

}  // namespace detail

struct NIResult {
    int from_bound = 0;
    int from_exact = 0;
    int used = 0;
};

/// n_I: smallest n ≥ k̃_s such that every node beyond level n has V_k ≤ π/3.
inline NIResult n_I(const LrfdFamily& f, int L) {
    f.profile.validate();
    const int ks = f.leading_levels;
    const double lim = std::numbers::pi / 3.0;
    NIResult r;
    r.from_bound = detail::first_true(ks, [&](int n) { return V_bound(f.profile, L, n + 1 - ks) <= lim; });
    r.from_exact = detail::first_true(ks, [&](int n) { return V_exact(f.profile, L, n + 1 - ks) <= lim; });
    r.used = std::min(r.from_bound, r.from_exact);
    return r;
}

/// n_Θ: smallest n > n_I with 4β₂ L Q(L) s² P(n) ≤ π/4.
inline int n_theta(const LrfdFamily& f, int L) {
    const int nI = n_I(f, L).used;
    const double b2 = beta2();
    return detail::first_true(nI + 1, [&](int n) { return 4.0 * b2 * composite_x(f, L, n) <= std::numbers::pi / 4.0; });
}

inline int n_theta(const DecayProfile& p, int L) { return n_theta(LrfdFamily{p, 0}, L); }

/// Smallest Nh accepted by truncation_error_bounds.
inline int min_admissible_nh(const LrfdFamily& f, int L) { return (n_theta(f, L) + 1) * L; }

struct RatioBounds {
    double R1 = 1.0;
    double R2 = 1.0;
    double Theta = 0.0;
};

/// Bounds on max |ψ^∞/ψ^{Nh}|², min |ψ^∞/ψ^{Nh}|² and max |arg ψ^∞/ψ^{Nh}|.
inline RatioBounds ratio_bounds(const LrfdFamily& f, int L, int Nh) {
    detail::require(Nh >= 0 && Nh % L == 0, "ratio_bounds: Nh must be a multiple of L");
    const int n = Nh / L;
    const int nI = n_I(f, L).used;
    if (n < nI) throw DomainError("ratio_bounds: Nh/L below n_I = " + std::to_string(nI));
    const double x = composite_x(f, L, n);
    const double b1sq = beta1() * beta1();
    return {std::exp(4.0 * x), std::exp(-4.0 * b1sq * x), 4.0 * beta2() * x};
}

struct TruncationReport {
    int L = 0;
    int Nh = 0;
    double x = 0.0;
    double P_tail = 0.0;
    double Q = 0.0;
    double scale = 1.0;
    double bound1 = 0.0;
    double bound2 = 0.0;
    double exact1 = std::numeric_limits<double>::quiet_NaN();
    double exact2_zz = std::numeric_limits<double>::quiet_NaN();
    double exact2_xx = std::numeric_limits<double>::quiet_NaN();
    double R1 = 1.0;
    double R2 = 1.0;
    double Theta = 0.0;
    int n_theta = 0;
    int n_I = 0;
    int n_I_bound = 0;
    int n_I_exact = 0;
    std::int64_t switchover = 0;

    [[nodiscard]] double exact2() const { return std::max(exact2_zz, exact2_xx); }
};

/// Bounds F1(x), F2(x) at x = L Q(L) s² P(Nh/L), with the intermediate quantities.
inline TruncationReport truncation_error_bounds(const LrfdFamily& f, int L, int Nh) {
    detail::require(L >= 1 && Nh >= 0 && Nh % L == 0, "truncation_error_bounds: Nh must be a multiple of L");
    TruncationReport r;
    r.L = L;
    r.Nh = Nh;
    const auto ni = n_I(f, L);
    r.n_I = ni.used;
    r.n_I_bound = ni.from_bound;
    r.n_I_exact = ni.from_exact;
    r.n_theta = n_theta(f, L);
    if (Nh / L <= r.n_theta)
        throw DomainError("truncation_error_bounds: Nh must exceed n_theta*L; minimal admissible Nh = " +
                          std::to_string((r.n_theta + 1) * L));
    const auto pt = P_tail_detail(f.profile.lambda, Nh / L - f.leading_levels);
    r.P_tail = pt.value;
    r.switchover = pt.switchover;
    r.Q = Q_val(f.profile, L);
    r.scale = f.profile.bound_scale();
    r.x = L * r.Q * r.scale * r.scale * r.P_tail;
    r.bound1 = F1(r.x);
    r.bound2 = F2(r.x);
    const auto rb = ratio_bounds(f, L, Nh);
    r.R1 = rb.R1;
    r.R2 = rb.R2;
    r.Theta = rb.Theta;
    return r;
}

inline TruncationReport truncation_error_bounds(const DecayProfile& p, int L, int Nh) {
    return truncation_error_bounds(LrfdFamily{p, 0}, L, Nh);
}

enum class ErrorType { state_l2, expectation };
enum class BoundForm { exact_F, leading };

/// Smallest Nh (multiple of L, above n_Θ L) whose bound is ≤ eps0.
inline int nh_star_bound(const LrfdFamily& f, int L, double eps0, ErrorType type,
                         BoundForm form = BoundForm::exact_F) {
    detail::require(eps0 > 0.0, "nh_star_bound: eps0 must be positive");
    const int nt = n_theta(f, L);
    auto bound = [&](int n) {
        const double x = composite_x(f, L, n);
        if (form == BoundForm::leading) return (type == ErrorType::state_l2 ? c1() : c2()) * x;
        return type == ErrorType::state_l2 ? F1(x) : F2(x);
    };
    return L * detail::first_true(nt + 1, [&](int n) { return bound(n) <= eps0; });
}

inline int nh_star_bound(const DecayProfile& p, int L, double eps0, ErrorType type,
                         BoundForm form = BoundForm::exact_F) {
    return nh_star_bound(LrfdFamily{p, 0}, L, eps0, type, form);
}

/// Exponent of M₀ = A₀ exp(2 L Q(L) s² P₀), P₀ = P(k̃_s).
inline double m0_exponent(const LrfdFamily& f, int L) { return 2.0 * composite_x(f, L, f.leading_levels); }

struct ManifoldClass {
    int index = 0;  // 1..7, 0 for unknown
    std::string tag = "unknown";
    std::string complexity;
    bool bound_not_tight = false;
};

/// Row of the complexity table matching the (μ, λ) decay kinds.
inline ManifoldClass classify_manifold(const DecayProfile& p) {
    enum class QKind { converge, inv_r, saturate, unknown } q = QKind::unknown;
    switch (p.mu.kind) {
        case OrbitalDecay::Kind::power:
            if (p.mu.delta_Q == 0.0 || p.mu.alpha_Q > 1.0) q = QKind::converge;
            else if (p.mu.alpha_Q == 1.0) q = QKind::inv_r;
            else if (p.mu.alpha_Q == 0.0) q = QKind::saturate;
            break;
        case OrbitalDecay::Kind::constant: q = p.mu.mu0 > 0.0 ? QKind::saturate : QKind::converge; break;
        case OrbitalDecay::Kind::table: q = QKind::converge; break;
    }
    enum class PKind { exponential, power, log, unknown } pk = PKind::unknown;
    switch (p.lambda.kind) {
        case LevelDecay::Kind::exponential: pk = PKind::exponential; break;
        case LevelDecay::Kind::power: pk = PKind::power; break;
        case LevelDecay::Kind::inverse_log: pk = PKind::log; break;
        case LevelDecay::Kind::table: break;
    }
    ManifoldClass c;
    auto set = [&](int i, const char* formula) {
        c.index = i;
        c.tag = "S2_" + std::to_string(i);
        c.complexity = formula;
        c.bound_not_tight = (i == 7);
    };
    if (q == QKind::converge && pk == PKind::exponential) set(1, "O(L ln(L/eps))");
    else if (q == QKind::converge && pk == PKind::power) set(2, "O((L^(2 alpha_P)/eps)^(1/(2 alpha_P-1)))");
    else if (q == QKind::inv_r && pk == PKind::exponential) set(3, "O(L ln(L/eps))");
    else if (q == QKind::inv_r && pk == PKind::power) set(4, "O((L^(2 alpha_P) (ln L)^2/eps)^(1/(2 alpha_P-1)))");
    else if (q == QKind::saturate && pk == PKind::exponential) set(5, "O(L ln(L/eps))");
    else if (q == QKind::saturate && pk == PKind::power) set(6, "O((L^(2 alpha_P+2)/eps)^(1/(2 alpha_P-1)))");
    else if (q == QKind::converge && pk == PKind::log) set(7, "O(L exp(L/eps))");
    return c;
}

/// Evaluates the complexity formula of a class at (L, eps); NaN when unknown.
inline double complexity_estimate(const ManifoldClass& c, const DecayProfile& p, double L, double eps) {
    const double a = p.lambda.alpha_P;
    switch (c.index) {
        case 1: case 3: case 5: return L * std::log(L / eps);
        case 2: return std::pow(std::pow(L, 2 * a) / eps, 1.0 / (2 * a - 1));
        case 4: return std::pow(std::pow(L, 2 * a) * std::pow(std::log(L), 2) / eps, 1.0 / (2 * a - 1));
        case 6: return std::pow(std::pow(L, 2 * a + 2) / eps, 1.0 / (2 * a - 1));
        case 7: return L * std::exp(L / eps);
        default: return std::numeric_limits<double>::quiet_NaN();
    }
}

}  // namespace nqs
