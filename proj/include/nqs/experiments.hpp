#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nqs/bounds.hpp"
#include "nqs/error.hpp"
#include "nqs/exact.hpp"
#include "nqs/io.hpp"
#include "nqs/lanczos.hpp"
#include "nqs/lrfd.hpp"
#include "nqs/presets.hpp"
#include "nqs/rbm.hpp"

namespace nqs {

/// Full RBM of an lrfd or perturbed_cluster preset with `levels` levels in total.
inline RbmParams preset_rbm(const Preset& p, int L, int levels) {
    if (p.kind == "perturbed_cluster") return build_perturbed_cluster(L, p.profile, levels - 1);
    if (p.kind == "lrfd") return expand(build_lrfd(p.profile, L, levels));
    throw ArgumentError("preset '" + p.name + "' does not describe an LRFD RBM");
}

/// σ^m_1 σ^m_2 on a chain of L sites.
inline PauliString nn_pair(int L, int m) { return PauliString::on_sites(L, {{1, m}, {2, m}}); }

struct TruncSweep {
    CsvTable table{{"Nh", "exact_l2", "bound_l2", "exact_CZ", "exact_CX", "bound_exp", "proxy_l2", "proxy_exp"}};
    int n_theta = 0;
    int min_nh = 0;
    std::string status = "ok";
};

/// Exact and bound truncation errors for Nh = (n_Θ+1)L .. nh_max. ψ^{(L,∞)} is
/// replaced by the `proxy_levels`-level RBM; proxy_l2/proxy_exp are the bounds
/// on that replacement.
inline TruncSweep run_trunc_sweep(const Preset& p, int L, int nh_max, int proxy_levels = 60) {
    detail::check_exact_size(L);
    const auto f = p.family();
    TruncSweep out;
    out.n_theta = n_theta(f, L);
    out.min_nh = (out.n_theta + 1) * L;
    const int n_max = std::min(nh_max / L, proxy_levels - 1);
    if (n_max < out.n_theta + 1) {
        out.status = "Nh_max below minimal admissible Nh " + std::to_string(out.min_nh);
        return out;
    }
    const TruncationLadder ladder(preset_rbm(p, L, proxy_levels));
    const auto cz = nn_pair(L, 3);
    const auto cx = nn_pair(L, 1);
    const StateVector full = ladder.state(proxy_levels);
    const double ez = expectation(full, cz);
    const double ex = expectation(full, cx);
    const double xp = composite_x(f, L, proxy_levels);
    for (int n = out.n_theta + 1; n <= n_max; ++n) {
        const auto r = truncation_error_bounds(f, L, n * L);
        const StateVector st = ladder.state(n);
        out.table.add({static_cast<std::int64_t>(n * L), ladder.error_l2(proxy_levels, n), r.bound1,
                       std::abs(ez - expectation(st, cz)), std::abs(ex - expectation(st, cx)), r.bound2, F1(xp),
                       F2(xp)});
    }
    return out;
}

/// Smallest Nh whose proxy l2 error is ≤ eps0 (−1 if none below the proxy).
inline int nh_star_exact(const TruncationLadder& ladder, double eps0) {
    const int P = ladder.levels();
    for (int n = 0; n < P; ++n)
        if (ladder.error_l2(P, n) <= eps0) return n * ladder.L();
    return -1;
}

/// Rows (L, eps, Nh* by exact search, Nh^U from F1, Nh^U from c1 x).
inline CsvTable run_nh_scaling(const Preset& p, const std::vector<double>& eps, int L_lo, int L_hi,
                               int proxy_levels = 60) {
    detail::require(L_lo >= 3 && L_lo <= L_hi, "nh-scaling: bad L range");
    detail::check_exact_size(L_hi);
    const auto f = p.family();
    CsvTable t({"L", "eps", "nh_star_exact", "nh_bound_exact_F", "nh_bound_leading"});
    for (int L = L_lo; L <= L_hi; ++L) {
        const TruncationLadder ladder(preset_rbm(p, L, proxy_levels));
        for (double e : eps) {
            t.add({static_cast<std::int64_t>(L), e, static_cast<std::int64_t>(nh_star_exact(ladder, e)),
                   static_cast<std::int64_t>(nh_star_bound(f, L, e, ErrorType::state_l2, BoundForm::exact_F)),
                   static_cast<std::int64_t>(nh_star_bound(f, L, e, ErrorType::state_l2, BoundForm::leading))});
        }
    }
    return t;
}

/// ⟨σ^z_1 σ^z_{1+r}⟩ for r = 0..L/2 (orbit sum) next to the leading-order formula.
inline CsvTable run_correlations(const Preset& p, const std::vector<double>& alpha_Q, const std::vector<int>& Ls) {
    CsvTable t({"alpha_Q", "L", "r", "corr_exact", "corr_leading"});
    for (double aq : alpha_Q) {
        DecayProfile prof = p.profile;
        prof.mu = OrbitalDecay::power(p.profile.mu.delta_Q, aq);
        for (int L : Ls) {
            const auto ti = build_lrfd(prof, L, p.alpha);
            const auto c = corr_z_profile(ti);
            const auto full = expand(ti);
            for (int r = 0; r <= L / 2; ++r)
                t.add({aq, static_cast<std::int64_t>(L), static_cast<std::int64_t>(r), c[r], corr_z_leading(full, r)});
        }
    }
    return t;
}

/// Log-log slope of C(r) over 1 ≤ r ≤ L/2.
inline double correlation_decay_rate(const std::vector<double>& c) {
    std::vector<double> x, y;
    for (std::size_t r = 1; r < c.size(); ++r) {
        x.push_back(static_cast<double>(r));
        y.push_back(std::abs(c[r]));
    }
    return fit_loglog(x, y).slope;
}

struct EtaResult {
    CsvTable grid{{"j", "k", "eta"}};
    CsvTable ridge{{"k", "max_eta"}};
    PowerFit fit;
    PowerFit fit_skip1;
};

inline EtaResult run_eta(const TranslationInvariantRbm& t) {
    const auto e = eta_surface(canonicalize(t));
    EtaResult out;
    for (int k = 1; k <= e.alpha; ++k)
        for (int j = 1; j <= e.L; ++j)
            out.grid.add({static_cast<std::int64_t>(j), static_cast<std::int64_t>(k), e(j, k)});
    const auto r = e.ridge();
    for (int k = 1; k <= e.alpha; ++k) out.ridge.add({static_cast<std::int64_t>(k), r[k - 1]});
    out.fit = ridge_fit(e, 1);
    if (e.alpha >= 3) out.fit_skip1 = ridge_fit(e, 2);
    return out;
}

struct KronPoint {
    double delta_P = 0.0;
    int levels = 0;
    double ratio2_exact = 0.0;
    double ratio2_closed = 0.0;
    double ratio2_bound = 0.0;
    int k0 = 0;
};

struct KronResult {
    CsvTable spectra{{"delta_P", "index", "prob"}};
    CsvTable ratios{{"delta_P", "inv_delta_P", "levels", "ratio2_exact", "ratio2_closed_form", "ratio2_lower_bound",
                     "k0", "beta3"}};
    std::vector<KronPoint> points;
    Beta3Certificate beta3;
};

/// Sorted |ψ̃|² spectra and |ψ(σ₀)/ψ(σ₁)|² against the certified lower bound.
/// σ₀ is all up, σ₁ has spin 1 flipped.
inline KronResult run_kron(const Preset& p, const std::vector<double>& deltas, bool spectra = true) {
    const int L = p.L;
    detail::check_exact_size(L);
    KronResult out;
    out.beta3 = certify_beta3(0.5, 400);
    for (double d : deltas) {
        const int levels = kron_levels(d);
        const auto lam = LevelDecay::exponential(d, 1.0, 1.0);
        std::vector<double> table(static_cast<std::size_t>(levels));
        for (int k = 1; k <= levels; ++k) table[k - 1] = lam(k);
        const auto t = build_kron_delta(L, p.mu0, table, levels);
        const auto st = build_state(t).normalized();
        const auto s0 = SpinConfig::all_up(L);
        const auto s1 = s0.flipped(1);
        KronPoint kp;
        kp.delta_P = d;
        kp.levels = levels;
        kp.ratio2_exact = std::norm(st.amp[s0.bits()]) / std::norm(st.amp[s1.bits()]);
        kp.ratio2_closed = std::exp(2.0 * kron_log_ratio(L, p.mu0, table));
        kp.k0 = kron_k0(L, p.mu0, lam, out.beta3.x0);
        const double lb = kron_ratio_lower_bound(L, p.mu0, lam, kp.k0, out.beta3.beta3);
        kp.ratio2_bound = lb * lb;
        out.points.push_back(kp);
        out.ratios.add({d, 1.0 / d, static_cast<std::int64_t>(levels), kp.ratio2_exact, kp.ratio2_closed,
                        kp.ratio2_bound, static_cast<std::int64_t>(kp.k0), out.beta3.beta3});
        if (spectra) {
            std::vector<double> prob(st.dim());
            for (std::size_t i = 0; i < st.dim(); ++i) prob[i] = std::norm(st.amp[i]);
            std::sort(prob.begin(), prob.end(), std::greater<>());
            for (std::size_t i = 0; i < prob.size(); ++i)
                out.spectra.add({d, static_cast<std::int64_t>(i + 1), prob[i]});
        }
    }
    return out;
}

/// Correlation errors of the level-n truncations of a trained RBM against
/// the exact ground state, n = 1..alpha, r = 1..L/2.
inline CsvTable truncation_corr_errors(const TranslationInvariantRbm& t, const StateVector& ground) {
    const int L = t.L;
    detail::require(ground.L == L, "truncation_corr_errors: length mismatch");
    const TruncationLadder ladder(expand(canonicalize(t)));
    CsvTable out({"levels", "r", "err_z", "err_x"});
    for (int n = 1; n <= ladder.levels(); ++n) {
        const StateVector st = ladder.state(n);
        for (int r = 1; r <= L / 2; ++r) {
            const auto bz = PauliString::on_sites(L, {{1, 3}, {1 + r, 3}});
            const auto bx = PauliString::on_sites(L, {{1, 1}, {1 + r, 1}});
            out.add({static_cast<std::int64_t>(n), static_cast<std::int64_t>(r),
                     std::abs(expectation(st, bz) - expectation(ground, bz)),
                     std::abs(expectation(st, bx) - expectation(ground, bx))});
        }
    }
    return out;
}

}  // namespace nqs
