#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "nqs/error.hpp"
#include "nqs/parallel.hpp"
#include "nqs/profile.hpp"
#include "nqs/rbm.hpp"
#include "nqs/spinspace.hpp"

namespace nqs {

inline constexpr int kMaxExactSites = 20;

/// Amplitudes over the full basis, indexed by SpinConfig bitmask.
struct StateVector {
    int L = 0;
    std::vector<cplx> amp;

    [[nodiscard]] std::size_t dim() const noexcept { return amp.size(); }

    [[nodiscard]] double norm2() const {
        long double s = 0.0L;
        for (const cplx& z : amp) s += std::norm(z);
        return static_cast<double>(s);
    }

    [[nodiscard]] StateVector normalized() const {
        const double n2 = norm2();
        if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericalError("normalize: zero or non-finite state");
        StateVector out = *this;
        const double inv = 1.0 / std::sqrt(n2);
        for (cplx& z : out.amp) z *= inv;
        return out;
    }
};

namespace detail {

inline void check_exact_size(int L) {
    if (L > kMaxExactSites) throw CapacityError("exact workflows are limited to L <= 20");
    require(L >= 1, "exact: L must be >= 1");
}

inline void check_same(const StateVector& a, const StateVector& b) {
    require(a.L == b.L && a.dim() == b.dim(), "state vectors must have the same length");
}

/// Exponentiates log amplitudes after subtracting their maximum modulus.
inline StateVector from_logs(int L, const std::vector<LogAmplitude>& logs) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& l : logs) top = std::max(top, l.log_mod);
    if (!std::isfinite(top)) throw NumericalError("build_state: every amplitude is zero");
    StateVector s;
    s.L = L;
    s.amp.resize(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) s.amp[i] = logs[i].value(top);
    return s;
}

}  // namespace detail

/// Log amplitudes for every basis state.
template <class Params>
std::vector<LogAmplitude> all_log_psi(const Params& p) {
    detail::check_exact_size(p.L);
    const std::size_t dim = std::size_t{1} << p.L;
    std::vector<LogAmplitude> logs(dim);
    parallel_for(dim, 256, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) logs[i] = log_psi(p, SpinConfig(static_cast<std::uint32_t>(i), p.L));
    });
    return logs;
}

/// ψ(σ) for all σ, scaled so the largest modulus is 1.
inline StateVector build_state(const RbmParams& p) { return detail::from_logs(p.L, all_log_psi(p)); }
inline StateVector build_state(const TranslationInvariantRbm& t) { return detail::from_logs(t.L, all_log_psi(t)); }

/// ‖ã - b̃‖² with both vectors normalized.
inline double error_l2(const StateVector& full, const StateVector& truncated) {
    detail::check_same(full, truncated);
    const double na = std::sqrt(full.norm2());
    const double nb = std::sqrt(truncated.norm2());
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericalError("error_l2: zero state");
    long double s = 0.0L;
    for (std::size_t i = 0; i < full.dim(); ++i) s += std::norm(full.amp[i] / na - truncated.amp[i] / nb);
    return static_cast<double>(s);
}

/// ⟨B⟩ for the normalized state.
inline double expectation(const StateVector& st, const PauliString& B) {
    detail::require(B.length() == st.L, "expectation: length mismatch");
    const double n2 = st.norm2();
    if (!(n2 > 0.0)) throw NumericalError("expectation: zero state");
    const std::size_t dim = st.dim();
    const cplx num = parallel_reduce<cplx>(
        dim, 1024, cplx{},
        [&](std::size_t lo, std::size_t hi) {
            cplx acc{};
            for (std::size_t i = lo; i < hi; ++i) {
                const auto [t, phase] = apply_pauli(B, SpinConfig(static_cast<std::uint32_t>(i), st.L));
                acc += std::conj(st.amp[t.bits()]) * phase * st.amp[i];
            }
            return acc;
        },
        [](cplx x, cplx y) { return x + y; });
    return num.real() / n2;
}

inline double error_expectation(const StateVector& full, const StateVector& truncated, const PauliString& B) {
    detail::check_same(full, truncated);
    return std::abs(expectation(full, B) - expectation(truncated, B));
}

/// |⟨ã|b̃⟩|².
inline double fidelity(const StateVector& a, const StateVector& b) {
    detail::check_same(a, b);
    const double na = a.norm2();
    const double nb = b.norm2();
    if (!(na > 0.0) || !(nb > 0.0)) throw NumericalError("fidelity: zero state");
    cplx ov{};
    for (std::size_t i = 0; i < a.dim(); ++i) ov += std::conj(a.amp[i]) * b.amp[i];
    return std::min(1.0, std::norm(ov) / (na * nb));
}

/// Σ_i |⟨v_i|ψ̃⟩|² over an orthonormal set {v_i}.
inline double subspace_fidelity(const StateVector& psi, const std::vector<StateVector>& space) {
    double s = 0.0;
    for (const auto& v : space) s += fidelity(psi, v);
    return std::min(1.0, s);
}

/// ⟨σ^z_1 σ^z_{1+r}⟩, summed directly over |ψ|².
inline double corr_z(const StateVector& st, int r) {
    detail::require(r >= 0 && r <= st.L / 2, "corr_z: r out of range");
    const double n2 = st.norm2();
    if (!(n2 > 0.0)) throw NumericalError("corr_z: zero state");
    long double s = 0.0L;
    for (std::size_t i = 0; i < st.dim(); ++i) {
        const int p = (((i >> 0) ^ (i >> r)) & 1u) ? -1 : 1;
        s += p * std::norm(st.amp[i]);
    }
    return static_cast<double>(s) / n2;
}

/// Leading small-parameter part of the unnormalized correlation:
/// 2 Re(W Wᵀ)_{1,1+r} + 4 Re(a₁) Re(a_{1+r}).
inline double corr_z_leading(const RbmParams& p, int r) {
    detail::require(r >= 0 && r <= p.L / 2, "corr_z_leading: r out of range");
    double s = 0.0;
    for (int k = 0; k < p.Nh(); ++k) s += (p.W(0, k) * p.W(r, k)).real();
    return 2.0 * s + 4.0 * p.a[0].real() * p.a[r].real();
}

/// Coefficient of σ₁σ_{1+r} in |ψ(σ)|²: 2^{-L} Σ_σ σ₁σ_{1+r} |ψ(σ)|² (raw amplitudes).
inline double corr_z_unnormalized(const RbmParams& p, int r) {
    detail::require(r >= 0 && r <= p.L / 2, "corr_z_unnormalized: r out of range");
    const auto logs = all_log_psi(p);
    long double s = 0.0L;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const int sg = (((i >> 0) ^ (i >> r)) & 1u) ? -1 : 1;
        if (!logs[i].is_zero()) s += sg * std::exp(2.0L * logs[i].log_mod);
    }
    return static_cast<double>(s / static_cast<long double>(logs.size()));
}

/// G^z(r) = Σ_{j_c=1}^{L} μ(|1-j_c|) μ(|1+r-j_c|), circular distances.
inline double gz_structure_sum(const std::vector<double>& mu, int L, int r) {
    detail::require(r >= 0 && r <= L / 2, "gz_structure_sum: r out of range");
    detail::require(static_cast<int>(mu.size()) > L / 2, "gz_structure_sum: mu table too short");
    double s = 0.0;
    for (int jc = 1; jc <= L; ++jc) s += mu[circ_distance(1, jc, L)] * mu[circ_distance(1 + r, jc, L)];
    return s;
}

inline double gz_structure_sum(const OrbitalDecay& mu, int L, int r) {
    std::vector<double> t(static_cast<std::size_t>(L / 2 + 1));
    for (int i = 0; i <= L / 2; ++i) t[i] = mu(i);
    return gz_structure_sum(t, L, r);
}

namespace detail {

inline std::uint32_t rotate_bits(std::uint32_t b, int n, int L, std::uint32_t mask) {
    return n == 0 ? b : (((b >> n) | (b << (L - n))) & mask);
}

}  // namespace detail

/// ⟨σ^z_1 σ^z_{1+r}⟩ for r = 0..⌊L/2⌋ of a translation-invariant RBM, summing
/// one representative per cyclic orbit (weight |ψ|² × orbit size). Needs no
/// state vector, so L up to 30 is accepted.
inline std::vector<double> corr_z_profile(const TranslationInvariantRbm& t) {
    t.validate();
    const int L = t.L;
    const int R = L / 2;
    const std::uint32_t mask = (L >= 32) ? ~0u : ((1u << L) - 1u);
    struct Rep {
        std::uint32_t bits;
        int period;
    };
    std::vector<Rep> reps;
    for (std::uint64_t b64 = 0; b64 <= mask; ++b64) {
        const auto b = static_cast<std::uint32_t>(b64);
        bool canonical = true;
        int period = L;
        for (int n = 1; n < L; ++n) {
            const std::uint32_t c = detail::rotate_bits(b, n, L, mask);
            if (c < b) {
                canonical = false;
                break;
            }
            if (c == b) {
                period = n;
                break;
            }
        }
        if (canonical) reps.push_back({b, period});
    }
    std::vector<double> logw(reps.size());
    parallel_for(reps.size(), 256, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto l = log_psi(t, SpinConfig(reps[i].bits, L));
            logw[i] = 2.0 * l.log_mod;
        }
    });
    const double top = *std::max_element(logw.begin(), logw.end());
    std::vector<long double> acc(static_cast<std::size_t>(R + 1), 0.0L);
    long double Z = 0.0L;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const long double w = std::exp(static_cast<long double>(logw[i] - top)) * reps[i].period;
        Z += w;
        const std::uint32_t b = reps[i].bits;
        for (int r = 0; r <= R; ++r) {
            const std::uint32_t x = b ^ detail::rotate_bits(b, r, L, mask);
            const int same = L - 2 * __builtin_popcount(x);
            acc[r] += w * same / L;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(R + 1));
    for (int r = 0; r <= R; ++r) out[r] = static_cast<double>(acc[r] / Z);
    return out;
}

/// Cumulative log amplitudes at every level boundary of one RBM, so that all
/// truncations ψ^{(L, nL)} come from a single pass.
class TruncationLadder {
public:
    explicit TruncationLadder(const RbmParams& p) : L_(p.L), levels_(p.levels()) {
        p.validate();
        detail::check_exact_size(L_);
        const std::size_t dim = std::size_t{1} << L_;
        const std::size_t stride = static_cast<std::size_t>(levels_) + 1;
        log_mod_.assign(dim * stride, 0.0);
        arg_.assign(dim * stride, 0.0);
        parallel_for(dim, 64, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const SpinConfig s(static_cast<std::uint32_t>(i), L_);
                LogAmplitude acc = detail::visible_part(p, s);
                log_mod_[i * stride] = acc.log_mod;
                arg_[i * stride] = acc.arg;
                for (int n = 1; n <= levels_; ++n) {
                    if (!acc.is_zero()) acc += detail::hidden_part(p, s, (n - 1) * L_, n * L_);
                    log_mod_[i * stride + n] = acc.log_mod;
                    arg_[i * stride + n] = acc.is_zero() ? 0.0 : acc.arg;
                }
            }
        });
    }

    [[nodiscard]] int L() const noexcept { return L_; }
    [[nodiscard]] int levels() const noexcept { return levels_; }
    [[nodiscard]] std::size_t dim() const noexcept { return std::size_t{1} << L_; }

    [[nodiscard]] LogAmplitude log_amp(std::size_t i, int n) const {
        const std::size_t k = i * (static_cast<std::size_t>(levels_) + 1) + static_cast<std::size_t>(n);
        return {log_mod_[k], arg_[k]};
    }

    /// ψ^{(L, nL)} scaled so its largest modulus is 1.
    [[nodiscard]] StateVector state(int n) const {
        check_level(n);
        std::vector<LogAmplitude> logs(dim());
        for (std::size_t i = 0; i < dim(); ++i) logs[i] = log_amp(i, n);
        return detail::from_logs(L_, logs);
    }

    /// ‖ψ̃^{(n_full)} - ψ̃^{(n_trunc)}‖², from the per-state log ratio so that
    /// tiny errors keep full relative precision.
    [[nodiscard]] double error_l2(int n_full, int n_trunc) const {
        check_level(n_full);
        check_level(n_trunc);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < dim(); ++i) top = std::max(top, log_amp(i, n_trunc).log_mod);
        long double wsum = 0.0L;
        long double wrho = 0.0L;  // Σ w (|ρ|² - 1)
        std::vector<double> w(dim());
        std::vector<cplx> delta(dim());
        for (std::size_t i = 0; i < dim(); ++i) {
            const auto lt = log_amp(i, n_trunc);
            const auto lf = log_amp(i, n_full);
            if (lt.is_zero()) {
                if (!lf.is_zero()) throw NumericalError("error_l2: truncated amplitude vanishes where full does not");
                w[i] = 0.0;
                continue;
            }
            w[i] = std::exp(2.0 * (lt.log_mod - top));
            delta[i] = {lf.log_mod - lt.log_mod, lf.arg - lt.arg};
            wsum += w[i];
            wrho += w[i] * (lf.is_zero() ? -1.0 : std::expm1(2.0 * delta[i].real()));
        }
        // ψ̃_full/ψ̃_trunc = ρ c with ln c = -½ ln(Σ w|ρ|² / Σ w).
        const double log_c = -0.5 * std::log1p(static_cast<double>(wrho / wsum));
        long double err = 0.0L;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (w[i] == 0.0) continue;
            const double x = delta[i].real() + log_c;
            const double y = delta[i].imag();
            const double sy = std::sin(0.5 * y);
            const cplx em1{std::expm1(x) * std::cos(y) - 2.0 * sy * sy, std::exp(x) * std::sin(y)};
            err += w[i] * std::norm(em1);
        }
        return static_cast<double>(err / wsum);
    }

    /// |⟨B⟩^{(n_full)} - ⟨B⟩^{(n_trunc)}|.
    [[nodiscard]] double error_expectation(int n_full, int n_trunc, const PauliString& B) const {
        return std::abs(nqs::expectation(state(n_full), B) - nqs::expectation(state(n_trunc), B));
    }

    /// max_σ |ψ^{(m)}(σ) - ψ^{(n)}(σ)| on the raw (unscaled) amplitudes.
    [[nodiscard]] double max_abs_diff(int m, int n) const {
        check_level(m);
        check_level(n);
        double best = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            const auto a = log_amp(i, m);
            const auto b = log_amp(i, n);
            double d;
            if (b.is_zero()) d = a.is_zero() ? 0.0 : std::exp(a.log_mod);
            else if (a.is_zero()) d = std::exp(b.log_mod);
            else {
                const double x = a.log_mod - b.log_mod;
                const double y = a.arg - b.arg;
                const double sy = std::sin(0.5 * y);
                const cplx em1{std::expm1(x) * std::cos(y) - 2.0 * sy * sy, std::exp(x) * std::sin(y)};
                d = std::exp(b.log_mod) * std::abs(em1);
            }
            best = std::max(best, d);
        }
        return best;
    }

    /// Extremes over σ of |ψ^{(m)}/ψ^{(n)}|² and |arg ψ^{(m)}/ψ^{(n)}|.
    struct RatioStats {
        double max_mod2 = 0.0;
        double min_mod2 = std::numeric_limits<double>::infinity();
        double max_abs_arg = 0.0;
    };

    [[nodiscard]] RatioStats ratio_stats(int m, int n) const {
        RatioStats r;
        for (std::size_t i = 0; i < dim(); ++i) {
            const auto a = log_amp(i, m);
            const auto b = log_amp(i, n);
            if (a.is_zero() || b.is_zero()) continue;
            const double m2 = std::exp(2.0 * (a.log_mod - b.log_mod));
            r.max_mod2 = std::max(r.max_mod2, m2);
            r.min_mod2 = std::min(r.min_mod2, m2);
            r.max_abs_arg = std::max(r.max_abs_arg, std::abs(a.arg - b.arg));
        }
        return r;
    }

private:
    void check_level(int n) const { detail::require(n >= 0 && n <= levels_, "TruncationLadder: level out of range"); }

    int L_;
    int levels_;
    std::vector<double> log_mod_;
    std::vector<double> arg_;
};

}  // namespace nqs
