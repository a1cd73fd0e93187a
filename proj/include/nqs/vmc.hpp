#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nqs/error.hpp"
#include "nqs/exact.hpp"
#include "nqs/hamiltonian.hpp"
#include "nqs/lanczos.hpp"
#include "nqs/lrfd.hpp"
#include "nqs/parallel.hpp"
#include "nqs/rbm.hpp"

namespace nqs {

/// Training hyperparameters. Every field must be set (typically from a
/// config file); validate() rejects the zero-initialized defaults.
struct VmcConfig {
    int n_chains = 0;
    int sweeps_per_sample = 0;
    int n_samples = 0;  // per iteration, summed over chains
    int burn_in = 0;    // sweeps at the start of every iteration
    double learning_rate = 0.0;
    int lr_decay_start = 0;  // γ_t = γ √(t0/t) for t > t0
    double sr_shift = 0.0;
    double sr_shift_min = 0.0;
    double sr_shift_decay = 1.0;  // λ_t = max(λ_min, λ₀ · decay^t)
    int n_iterations = 0;
    double init_scale = 0.0;  // std-dev of the random initial filters
    std::uint64_t seed = 0;
    int checkpoint_every = 0;

    void validate() const {
        detail::require(n_chains >= 1 && sweeps_per_sample >= 1 && n_samples >= 1 && burn_in >= 0,
                        "VmcConfig: chain counts must be >= 1");
        detail::require(n_samples >= 2 * n_chains, "VmcConfig: need at least two samples per chain");
        detail::require(learning_rate > 0.0 && sr_shift > 0.0, "VmcConfig: learning rate and SR shift must be > 0");
        detail::require(sr_shift_min > 0.0 && sr_shift_min <= sr_shift, "VmcConfig: sr_shift_min must be in (0, sr_shift]");
        detail::require(sr_shift_decay > 0.0 && sr_shift_decay <= 1.0, "VmcConfig: sr_shift_decay must be in (0, 1]");
        detail::require(n_iterations >= 0 && lr_decay_start >= 0 && checkpoint_every >= 0,
                        "VmcConfig: iteration counts must be >= 0");
        detail::require(init_scale >= 0.0, "VmcConfig: init_scale must be >= 0");
    }

    [[nodiscard]] double gamma_at(int iter) const {
        if (iter <= lr_decay_start || lr_decay_start == 0) return learning_rate;
        return learning_rate * std::sqrt(static_cast<double>(lr_decay_start) / iter);
    }

    [[nodiscard]] double shift_at(int iter) const {
        return std::max(sr_shift_min, sr_shift * std::pow(sr_shift_decay, iter));
    }
};

/// Stateless 64-bit mixer used to derive independent per-chain seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t chain_seed(std::uint64_t master, std::uint64_t chain) {
    return splitmix64(splitmix64(master) ^ splitmix64(chain + 0x632be59bd9b4e019ULL));
}

/// E_loc(σ) = Σ_σ' H_{σσ'} ψ(σ')/ψ(σ), through the log-domain ratio.
inline cplx local_energy(const RbmParams& p, const SpinConfig& s, const HamiltonianSpec& h) {
    detail::require(h.L == p.L && s.length() == p.L, "local_energy: length mismatch");
    const LogAmplitude l0 = log_psi(p, s);
    if (l0.is_zero()) throw NumericalError("local_energy: zero amplitude");
    cplx e{};
    for_each_element(h, s.bits(), [&](std::uint32_t t, double v) {
        if (t == s.bits()) {
            e += v;
            return;
        }
        const LogAmplitude l1 = log_psi(p, SpinConfig(t, p.L));
        if (!l1.is_zero()) e += v * std::polar(std::exp(l1.log_mod - l0.log_mod), l1.arg - l0.arg);
    });
    return e;
}

/// O_k = ∂ ln ψ / ∂ θ_k for the flat parameter layout [a0, b_level, filters].
inline Eigen::VectorXcd log_derivatives(const TranslationInvariantRbm& t, const SpinConfig& s) {
    detail::require(s.length() == t.L, "log_derivatives: length mismatch");
    const int L = t.L;
    const int alpha = t.alpha();
    std::vector<cplx> theta;
    ti_angles(t, s, theta);
    Eigen::VectorXcd O = Eigen::VectorXcd::Zero(t.num_params());
    O[0] = static_cast<double>(s.magnetization());
    int sig[2 * kMaxSites];
    for (int j = 0; j < L; ++j) sig[j] = sig[j + L] = s.spin0(j);
    for (int lv = 0; lv < alpha; ++lv) {
        for (int jc = 0; jc < L; ++jc) {
            const cplx th = std::tanh(theta[static_cast<std::size_t>(lv * L + jc)]);
            O[1 + lv] += th;
            for (int r = 0; r < L; ++r) O[1 + alpha + lv * L + r] += static_cast<double>(sig[jc + r]) * th;
        }
    }
    return O;
}

/// Parameter change δθ = -γ (S + λ diag S)⁻¹ F from samples of O and E_loc.
/// Parameters whose O has zero sample variance are left unchanged.
inline Eigen::VectorXcd sr_update(const Eigen::MatrixXcd& O, const Eigen::VectorXcd& E, double gamma,
                                  double lambda_reg) {
    const Eigen::Index n = O.rows();
    const Eigen::Index P = O.cols();
    detail::require(n >= 2, "sr_update: need at least two samples");
    detail::require(E.size() == n, "sr_update: sample count mismatch");
    detail::require(gamma > 0.0 && lambda_reg > 0.0, "sr_update: gamma and lambda_reg must be > 0");
    const Eigen::RowVectorXcd Om = O.colwise().mean();
    const cplx Em = E.mean();
    const Eigen::MatrixXcd Oc = O.rowwise() - Om;
    const Eigen::MatrixXcd S = (Oc.adjoint() * Oc) / static_cast<double>(n);
    const Eigen::VectorXcd F = (Oc.adjoint() * (E.array() - Em).matrix()) / static_cast<double>(n);
    const double smax = S.diagonal().real().maxCoeff();
    std::vector<Eigen::Index> active;
    for (Eigen::Index k = 0; k < P; ++k)
        if (S(k, k).real() > 1e-14 * std::max(1.0, smax)) active.push_back(k);
    Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(P);
    if (active.empty()) return delta;
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXcd A(m, m);
    Eigen::VectorXcd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        rhs[i] = F[active[i]];
        for (Eigen::Index j = 0; j < m; ++j) A(i, j) = S(active[i], active[j]);
        A(i, i) *= 1.0 + lambda_reg;
    }
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(A);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
        throw NumericalError("sr_update: regularized S is not positive definite; smallest eigenvalue " +
                             std::to_string(es.eigenvalues()[0]));
    }
    const Eigen::VectorXcd x = ldlt.solve(rhs);
    if (!x.allFinite()) throw NumericalError("sr_update: non-finite solution");
    for (Eigen::Index i = 0; i < m; ++i) delta[active[i]] = -gamma * x[i];
    return delta;
}

/// Single-flip Metropolis walker on |ψ|² of a translation-invariant RBM with
/// cached effective angles.
class MetropolisChain {
public:
    MetropolisChain(const TranslationInvariantRbm& t, std::uint64_t seed) : t_(&t), rng_(seed) {
        const int L = t.L;
        std::uniform_int_distribution<std::uint32_t> bitd(0, (L >= 32) ? ~0u : ((1u << L) - 1u));
        for (int attempt = 0; attempt < 1000; ++attempt) {
            s_ = SpinConfig(bitd(rng_), L);
            if (!log_psi(t, s_).is_zero()) {
                refresh();
                return;
            }
        }
        throw NumericalError("MetropolisChain: could not find a nonzero-amplitude start");
    }

    /// Rebinds to new parameters (same shape) and recomputes the caches.
    void rebind(const TranslationInvariantRbm& t) {
        t_ = &t;
        refresh();
    }

    [[nodiscard]] const SpinConfig& config() const noexcept { return s_; }

    /// ψ(σ with site j flipped)/ψ(σ), j 0-based.
    [[nodiscard]] cplx flip_ratio(int j) const {
        const int L = t_->L;
        const double sj = s_.spin0(j);
        cplx r = std::exp(-2.0 * sj * t_->a0);
        for (int lv = 0; lv < alpha_; ++lv) {
            for (int jc = 0; jc < L; ++jc) {
                const int o = (j - jc + L) % L;
                const std::size_t k = static_cast<std::size_t>(lv * L + jc);
                r *= ch_[lv * L + o] - sj * tanh_[k] * sh_[lv * L + o];
            }
        }
        return r;
    }

    /// ψ(σ with sites j, j+1 flipped)/ψ(σ) for an antiparallel pair.
    [[nodiscard]] cplx pair_ratio(int j) const {
        const int L = t_->L;
        const double sj = s_.spin0(j);
        cplx r{1.0, 0.0};
        for (int lv = 0; lv < alpha_; ++lv) {
            for (int jc = 0; jc < L; ++jc) {
                const int o = (j - jc + L) % L;
                const std::size_t k = static_cast<std::size_t>(lv * L + jc);
                r *= chp_[lv * L + o] - sj * tanh_[k] * shp_[lv * L + o];
            }
        }
        return r;
    }

    /// One Metropolis step; returns whether the proposal was accepted.
    bool step() {
        const int L = t_->L;
        std::uniform_int_distribution<int> site(0, L - 1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const int j = site(rng_);
        const cplx r = flip_ratio(j);
        const double a = std::norm(r);
        if (a >= 1.0 || u(rng_) < a) {
            accept_flip(j);
            return true;
        }
        return false;
    }

    /// L steps; returns the number accepted.
    int sweep() {
        int acc = 0;
        for (int i = 0; i < t_->L; ++i) acc += step() ? 1 : 0;
        return acc;
    }

    [[nodiscard]] cplx local_energy(const HamiltonianSpec& h) const {
        cplx e{};
        const int L = t_->L;
        switch (h.kind) {
            case HamiltonianSpec::Kind::cluster:
                for (int j = 0; j < L; ++j)
                    e -= static_cast<double>(s_.spin0((j + L - 1) % L) * s_.spin0((j + 1) % L)) * flip_ratio(j);
                break;
            case HamiltonianSpec::Kind::tfim: {
                int zz = 0;
                for (int j = 0; j < L; ++j) zz += s_.spin0(j) * s_.spin0((j + 1) % L);
                e = -static_cast<double>(zz);
                if (h.field != 0.0)
                    for (int j = 0; j < L; ++j) e -= h.field * flip_ratio(j);
                break;
            }
            case HamiltonianSpec::Kind::xxz: {
                int zz = 0;
                for (int j = 0; j < L; ++j) zz += s_.spin0(j) * s_.spin0((j + 1) % L);
                e = h.field * zz;
                for (int j = 0; j < L; ++j)
                    if (s_.spin0(j) != s_.spin0((j + 1) % L)) e -= 2.0 * pair_ratio(j);
                break;
            }
        }
        return e;
    }

    /// Log-derivatives from the cached tanh θ.
    void log_derivatives(Eigen::Ref<Eigen::VectorXcd> O) const {
        const int L = t_->L;
        O.setZero();
        O[0] = static_cast<double>(s_.magnetization());
        int sig[2 * kMaxSites];
        for (int j = 0; j < L; ++j) sig[j] = sig[j + L] = s_.spin0(j);
        for (int lv = 0; lv < alpha_; ++lv) {
            for (int jc = 0; jc < L; ++jc) {
                const cplx th = tanh_[static_cast<std::size_t>(lv * L + jc)];
                O[1 + lv] += th;
                for (int r = 0; r < L; ++r) O[1 + alpha_ + lv * L + r] += static_cast<double>(sig[jc + r]) * th;
            }
        }
    }

private:
    void refresh() {
        const int L = t_->L;
        alpha_ = t_->alpha();
        ti_angles(*t_, s_, theta_);
        tanh_.resize(theta_.size());
        for (std::size_t k = 0; k < theta_.size(); ++k) tanh_[k] = std::tanh(theta_[k]);
        const std::size_t n = static_cast<std::size_t>(alpha_ * L);
        ch_.resize(n);
        sh_.resize(n);
        chp_.resize(n);
        shp_.resize(n);
        for (int lv = 0; lv < alpha_; ++lv) {
            for (int o = 0; o < L; ++o) {
                const cplx d = 2.0 * t_->filters(lv, o);
                const cplx dp = 2.0 * (t_->filters(lv, o) - t_->filters(lv, (o + 1) % L));
                ch_[lv * L + o] = std::cosh(d);
                sh_[lv * L + o] = std::sinh(d);
                chp_[lv * L + o] = std::cosh(dp);
                shp_[lv * L + o] = std::sinh(dp);
            }
        }
    }

    void accept_flip(int j) {
        const int L = t_->L;
        const double sj = s_.spin0(j);
        for (int lv = 0; lv < alpha_; ++lv) {
            for (int jc = 0; jc < L; ++jc) {
                const std::size_t k = static_cast<std::size_t>(lv * L + jc);
                theta_[k] -= 2.0 * sj * t_->filters(lv, (j - jc + L) % L);
                tanh_[k] = std::tanh(theta_[k]);
            }
        }
        s_ = s_.flipped(j + 1);
    }

    const TranslationInvariantRbm* t_;
    std::mt19937_64 rng_;
    SpinConfig s_;
    int alpha_ = 0;
    std::vector<cplx> theta_, tanh_, ch_, sh_, chp_, shp_;
};

struct SampleBatch {
    Eigen::MatrixXcd O;   // samples × params
    Eigen::VectorXcd E;   // local energies
    std::vector<std::uint32_t> configs;
    double acceptance = 0.0;
};

/// Draws config.n_samples samples split evenly over the chains. Chain c
/// writes rows [c·m, (c+1)·m), so the batch is independent of thread count.
inline SampleBatch sample_batch(std::vector<MetropolisChain>& chains, const TranslationInvariantRbm& t,
                                const HamiltonianSpec& h, const VmcConfig& cfg, bool keep_configs = false) {
    const int nc = static_cast<int>(chains.size());
    const int per = cfg.n_samples / nc;
    const int total = per * nc;
    SampleBatch b;
    b.O.resize(total, t.num_params());
    b.E.resize(total);
    if (keep_configs) b.configs.resize(static_cast<std::size_t>(total));
    std::vector<long long> accepted(static_cast<std::size_t>(nc), 0);
    parallel_for(static_cast<std::size_t>(nc), 1, [&](std::size_t lo, std::size_t hi) {
        Eigen::VectorXcd O(t.num_params());
        for (std::size_t c = lo; c < hi; ++c) {
            auto& ch = chains[c];
            ch.rebind(t);
            long long acc = 0;
            for (int s = 0; s < cfg.burn_in; ++s) acc += ch.sweep();
            for (int i = 0; i < per; ++i) {
                for (int s = 0; s < cfg.sweeps_per_sample; ++s) acc += ch.sweep();
                const Eigen::Index row = static_cast<Eigen::Index>(c) * per + i;
                ch.log_derivatives(O);
                b.O.row(row) = O.transpose();
                b.E[row] = ch.local_energy(h);
                if (keep_configs) b.configs[static_cast<std::size_t>(row)] = ch.config().bits();
            }
            accepted[c] = acc;
        }
    });
    long long acc = 0;
    for (auto a : accepted) acc += a;
    const double proposals = static_cast<double>(nc) * (cfg.burn_in + static_cast<double>(per) * cfg.sweeps_per_sample) * t.L;
    b.acceptance = acc / proposals;
    return b;
}

inline std::vector<MetropolisChain> make_chains(const TranslationInvariantRbm& t, const VmcConfig& cfg) {
    std::vector<MetropolisChain> chains;
    chains.reserve(static_cast<std::size_t>(cfg.n_chains));
    for (int c = 0; c < cfg.n_chains; ++c) chains.emplace_back(t, chain_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    return chains;
}

struct EnergyPoint {
    double mean = 0.0;
    double stderr_ = 0.0;
    double acceptance = 0.0;
};

struct TrainResult {
    TranslationInvariantRbm final_params;
    std::vector<EnergyPoint> energy_trace;
    EtaSurface eta;
    double ridge_slope = 0.0;
    double fitted_alpha_P = 0.0;        // -slope/2 over all levels
    double fitted_alpha_P_skip1 = 0.0;  // same, levels k̃ ≥ 2
    double exact_energy = std::numeric_limits<double>::quiet_NaN();  // ⟨H⟩ of final params, L ≤ 16
};

/// Random initial parameters: a0 = 0, b = 0, filters with N(0, scale²) real
/// and imaginary parts.
inline TranslationInvariantRbm initial_params(int L, int alpha, double scale, std::uint64_t seed) {
    auto t = TranslationInvariantRbm::zeros(L, alpha);
    std::mt19937_64 rng(splitmix64(seed ^ 0x5eedULL));
    std::normal_distribution<double> n(0.0, scale);
    for (int lv = 0; lv < alpha; ++lv)
        for (int r = 0; r < L; ++r) {
            const double re = n(rng);
            const double im = n(rng);
            t.filters(lv, r) = {re, im};
        }
    return t;
}

using CheckpointFn = std::function<void(int iter, const TranslationInvariantRbm&)>;

/// Variational Monte Carlo with stochastic reconfiguration.
inline TrainResult train(const HamiltonianSpec& h, int alpha, const VmcConfig& cfg,
                         const CheckpointFn& checkpoint = {}) {
    h.validate();
    cfg.validate();
    detail::require(alpha >= 0, "train: alpha must be >= 0");
    TrainResult res;
    TranslationInvariantRbm t = initial_params(h.L, alpha, cfg.init_scale, cfg.seed);
    auto chains = make_chains(t, cfg);
    for (int it = 1; it <= cfg.n_iterations; ++it) {
        const SampleBatch b = sample_batch(chains, t, h, cfg);
        const double mean = b.E.real().mean();
        const double var = (b.E.real().array() - mean).square().mean();
        if (!std::isfinite(mean)) throw DivergenceError("train: energy became non-finite at iteration " + std::to_string(it));
        res.energy_trace.push_back({mean, std::sqrt(var / static_cast<double>(b.E.size())), b.acceptance});
        const Eigen::VectorXcd d = sr_update(b.O, b.E, cfg.gamma_at(it), cfg.shift_at(it));
        Eigen::VectorXcd v = t.flatten() + d;
        t.unflatten(v);
        if (!v.allFinite()) throw DivergenceError("train: parameters became non-finite at iteration " + std::to_string(it));
        if (checkpoint && cfg.checkpoint_every > 0 && it % cfg.checkpoint_every == 0) checkpoint(it, t);
    }
    res.final_params = t;
    if (h.L <= 16) res.exact_energy = energy(h, build_state(t));
    if (alpha >= 1 && h.L % 2 == 1) {
        res.eta = eta_surface(canonicalize(t));
        const auto f = ridge_fit(res.eta, 1);
        res.ridge_slope = f.slope;
        res.fitted_alpha_P = -f.slope / 2.0;
        if (alpha >= 3) res.fitted_alpha_P_skip1 = -ridge_fit(res.eta, 2).slope / 2.0;
    }
    return res;
}

}  // namespace nqs
