#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "nqs/lanczos.hpp"
#include "nqs/lrfd.hpp"
#include "nqs/vmc.hpp"
#include "test_util.hpp"

using namespace nqs;
using nqs::testing::random_ti;
using nqs::testing::rel_diff;

namespace {

VmcConfig small_config(int chains, int samples, std::uint64_t seed) {
    VmcConfig c;
    c.n_chains = chains;
    c.sweeps_per_sample = 2;
    c.n_samples = samples;
    c.burn_in = 50;
    c.learning_rate = 0.05;
    c.lr_decay_start = 100;
    c.sr_shift = 0.01;
    c.sr_shift_min = 1e-4;
    c.sr_shift_decay = 0.99;
    c.n_iterations = 10;
    c.init_scale = 0.01;
    c.seed = seed;
    return c;
}

cplx complex_log(const TranslationInvariantRbm& t, const SpinConfig& s) {
    const auto l = log_psi(t, s);
    return {l.log_mod, l.arg};
}

}  // namespace

TEST(VmcConfig, ValidationAndSchedules) {
    EXPECT_THROW(VmcConfig{}.validate(), ArgumentError);
    auto c = small_config(4, 100, 1);
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.gamma_at(1), 0.05);
    EXPECT_EQ(c.gamma_at(100), 0.05);
    EXPECT_NEAR(c.gamma_at(400), 0.025, 1e-15);
    EXPECT_NEAR(c.shift_at(1), 0.0099, 1e-15);
    EXPECT_EQ(c.shift_at(100000), 1e-4);
    c.n_samples = 7;
    EXPECT_THROW(c.validate(), ArgumentError);
}

TEST(Seeds, DistinctPerChain) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t c = 0; c < 64; ++c) seen.insert(chain_seed(42, c));
    EXPECT_EQ(seen.size(), 64u);
    EXPECT_NE(chain_seed(1, 0), chain_seed(2, 0));
    EXPECT_EQ(chain_seed(7, 3), chain_seed(7, 3));
}

TEST(LocalEnergy, DiagonalExamples) {
    const auto p = RbmParams::zeros(6, 6);
    EXPECT_EQ(local_energy(p, SpinConfig::all_up(6), HamiltonianSpec::tfim(6, 0.0)), cplx(-6, 0));
    EXPECT_EQ(local_energy(p, SpinConfig::all_up(6), HamiltonianSpec::xxz(6, -0.2)), cplx(-0.2 * 6, 0));
}

TEST(LocalEnergy, ClusterZeroVariance) {
    const int L = 7;
    const auto p = build_cluster_rbm(L);
    const auto h = HamiltonianSpec::cluster(L);
    for (auto s : enumerate_basis(L)) {
        const cplx e = local_energy(p, s, h);
        EXPECT_NEAR(e.real(), -L, 1e-12);
        EXPECT_NEAR(e.imag(), 0.0, 1e-12);
    }
}

TEST(LocalEnergy, MeanMatchesExactEnergy) {
    const int L = 6;
    const auto t = random_ti(L, 2, 0.3, 5);
    const auto p = expand(t);
    for (const auto& h : {HamiltonianSpec::tfim(L, 1.0), HamiltonianSpec::xxz(L, -0.2), HamiltonianSpec::cluster(L)}) {
        const auto st = build_state(p);
        const double n2 = st.norm2();
        cplx acc{};
        for (auto s : enumerate_basis(L)) acc += std::norm(st.amp[s.bits()]) * local_energy(p, s, h);
        EXPECT_NEAR(acc.real() / n2, energy(h, st), 1e-12) << h.name();
        EXPECT_NEAR(acc.imag() / n2, 0.0, 1e-12);
    }
}

TEST(LogDerivatives, ZeroParams) {
    const auto t = TranslationInvariantRbm::zeros(5, 2);
    const auto s = SpinConfig::from_spins({1, 1, -1, 1, -1});
    const auto O = log_derivatives(t, s);
    EXPECT_EQ(O[0], cplx(1, 0));
    EXPECT_EQ(O[1], cplx(0, 0));
    EXPECT_EQ(O[2], cplx(0, 0));
}

TEST(LogDerivatives, FiniteDifferences) {
    const int L = 6;
    const auto t = random_ti(L, 2, 0.4, 17);
    const double h = 1e-6;
    for (std::uint32_t bits : {0u, 13u, 42u, 63u}) {
        const SpinConfig s(bits, L);
        const auto O = log_derivatives(t, s);
        const auto v = t.flatten();
        for (Eigen::Index k = 0; k < v.size(); ++k) {
            auto tp = t, tm = t;
            auto vp = v, vm = v;
            vp[k] += h;
            vm[k] -= h;
            tp.unflatten(vp);
            tm.unflatten(vm);
            const cplx fd = (complex_log(tp, s) - complex_log(tm, s)) / (2 * h);
            EXPECT_LT(std::abs(fd - O[k]), 1e-6 * std::max(1.0, std::abs(O[k]))) << "k=" << k << " bits=" << bits;
        }
    }
}

TEST(LogDerivatives, ShiftInvariant) {
    const auto t = random_ti(7, 3, 0.3, 4);
    for (std::uint32_t bits : {5u, 77u, 100u}) {
        const SpinConfig s(bits, 7);
        const auto O = log_derivatives(t, s);
        for (int n = 1; n < 7; ++n) EXPECT_LT((log_derivatives(t, s.rotated(n)) - O).norm(), 1e-12 * O.norm());
    }
}

TEST(SrUpdate, ConstantDerivativesGiveZeroStep) {
    Eigen::MatrixXcd O = Eigen::MatrixXcd::Constant(10, 3, cplx(0.5, -0.2));
    Eigen::VectorXcd E = Eigen::VectorXcd::LinSpaced(10, -1.0, 1.0);
    EXPECT_EQ(sr_update(O, E, 0.1, 0.01), Eigen::VectorXcd::Zero(3));
}

TEST(SrUpdate, OneParameterClosedForm) {
    Eigen::MatrixXcd O(4, 1);
    O << 1.0, 2.0, 3.0, 4.0;
    Eigen::VectorXcd E(4);
    E << 2.0, 1.0, 0.0, 1.0;
    // S = var(O) = 1.25, F = cov(O, E) = (−1.5·1 + −0.5·0 + 0.5·−1 + 1.5·0)/4 = −0.5
    const auto d = sr_update(O, E, 0.1, 0.2);
    EXPECT_NEAR(d[0].real(), -0.1 * -0.5 / (1.25 * 1.2), 1e-15);
    EXPECT_NEAR(d[0].imag(), 0.0, 1e-15);
    EXPECT_THROW(sr_update(O.topRows(1), E.head(1), 0.1, 0.2), ArgumentError);
}

TEST(SrUpdate, LargeShiftIsScaledGradient) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd O(200, 5);
    Eigen::VectorXcd E(200);
    for (int i = 0; i < 200; ++i) {
        for (int k = 0; k < 5; ++k) O(i, k) = {g(rng), g(rng)};
        E[i] = g(rng) + 0.3 * O(i, 1).real();
    }
    const double lam = 1e8;
    const auto d = sr_update(O, E, 0.5, lam);
    const Eigen::RowVectorXcd Om = O.colwise().mean();
    const Eigen::MatrixXcd Oc = O.rowwise() - Om;
    const Eigen::VectorXcd F = Oc.adjoint() * (E.array() - E.mean()).matrix() / 200.0;
    for (int k = 0; k < 5; ++k) {
        const double Skk = Oc.col(k).squaredNorm() / 200.0;
        const cplx want = -0.5 * F[k] / ((1.0 + lam) * Skk);
        EXPECT_LT(std::abs(d[k] - want), 1e-6 * std::abs(want));
    }
}

TEST(Metropolis, FastRatiosMatchGeneric) {
    const int L = 7;
    const auto t = random_ti(L, 3, 0.3, 8);
    const auto p = expand(t);
    MetropolisChain ch(t, 99);
    for (int step = 0; step < 200; ++step) {
        const auto s = ch.config();
        for (int j = 0; j < L; ++j) {
            EXPECT_LT(rel_diff(ch.flip_ratio(j), psi_ratio(p, s.flipped(j + 1), s)), 1e-10);
            if (s.spin0(j) != s.spin0((j + 1) % L)) {
                const auto s2 = s.flipped(j + 1).flipped((j + 1) % L + 1);
                EXPECT_LT(rel_diff(ch.pair_ratio(j), psi_ratio(p, s2, s)), 1e-10);
            }
        }
        for (const auto& h : {HamiltonianSpec::tfim(L, 1.0), HamiltonianSpec::xxz(L, -0.2), HamiltonianSpec::cluster(L)})
            EXPECT_LT(std::abs(ch.local_energy(h) - local_energy(p, s, h)), 1e-10) << h.name();
        Eigen::VectorXcd O(t.num_params());
        ch.log_derivatives(O);
        EXPECT_LT((O - log_derivatives(t, s)).norm(), 1e-10);
        ch.step();
    }
}

TEST(Metropolis, UniformStateAlwaysAccepts) {
    const auto t = TranslationInvariantRbm::zeros(6, 1);
    auto cfg = small_config(2, 100, 5);
    auto chains = make_chains(t, cfg);
    const auto b = sample_batch(chains, t, HamiltonianSpec::tfim(6, 1.0), cfg);
    EXPECT_EQ(b.acceptance, 1.0);
}

TEST(Metropolis, StationaryDistributionChiSquare) {
    const int L = 4;
    const auto t = random_ti(L, 2, 0.35, 21);
    auto cfg = small_config(16, 1000000, 11);
    cfg.sweeps_per_sample = 5;
    cfg.burn_in = 100;
    auto chains = make_chains(t, cfg);
    const auto b = sample_batch(chains, t, HamiltonianSpec::tfim(L, 1.0), cfg, true);
    std::vector<double> counts(16, 0.0);
    for (auto c : b.configs) counts[c] += 1.0;
    const auto st = build_state(t).normalized();
    double chi2 = 0.0;
    for (std::size_t i = 0; i < 16; ++i) {
        const double expect = std::norm(st.amp[i]) * static_cast<double>(b.configs.size());
        chi2 += (counts[i] - expect) * (counts[i] - expect) / expect;
    }
    // 99th percentile of χ² with 15 degrees of freedom
    EXPECT_LT(chi2, 30.578);
}

TEST(Metropolis, EnergyEstimatorUnbiased) {
    const int L = 6;
    const auto t = random_ti(L, 2, 0.3, 33);
    const auto h = HamiltonianSpec::tfim(L, 1.0);
    auto cfg = small_config(32, 64000, 13);
    cfg.sweeps_per_sample = 3;
    auto chains = make_chains(t, cfg);
    const auto b = sample_batch(chains, t, h, cfg);
    const int per = 2000;
    std::vector<double> means;
    for (int c = 0; c < 32; ++c) means.push_back(b.E.segment(c * per, per).real().mean());
    double m = 0.0, v = 0.0;
    for (double x : means) m += x / 32.0;
    for (double x : means) v += (x - m) * (x - m) / 31.0;
    const double se = std::sqrt(v / 32.0);
    EXPECT_LT(std::abs(m - energy(h, build_state(t))), 3.0 * se + 1e-12);
}

TEST(Metropolis, Deterministic) {
    const auto t = random_ti(5, 2, 0.3, 2);
    auto cfg = small_config(4, 400, 77);
    auto c1 = make_chains(t, cfg);
    auto c2 = make_chains(t, cfg);
    const auto h = HamiltonianSpec::xxz(5, -0.2);
    const auto a = sample_batch(c1, t, h, cfg, true);
    const auto b = sample_batch(c2, t, h, cfg, true);
    EXPECT_EQ(a.configs, b.configs);
    EXPECT_EQ(a.E, b.E);
    EXPECT_EQ(a.O, b.O);
}

TEST(Train, DeterministicForSeed) {
    auto cfg = small_config(4, 400, 5);
    cfg.n_iterations = 5;
    const auto a = train(HamiltonianSpec::tfim(5, 1.0), 1, cfg);
    const auto b = train(HamiltonianSpec::tfim(5, 1.0), 1, cfg);
    ASSERT_EQ(a.energy_trace.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(a.energy_trace[i].mean, b.energy_trace[i].mean);
    EXPECT_EQ(a.final_params.filters, b.final_params.filters);
}

TEST(Train, CheckpointsCalled) {
    auto cfg = small_config(2, 100, 6);
    cfg.n_iterations = 6;
    cfg.checkpoint_every = 2;
    std::vector<int> iters;
    (void)train(HamiltonianSpec::tfim(5, 1.0), 1, cfg, [&](int it, const TranslationInvariantRbm&) { iters.push_back(it); });
    EXPECT_EQ(iters, (std::vector<int>{2, 4, 6}));
}

TEST(Train, MeanFieldTfim) {
    // a product state with ⟨σ^z⟩ = m gives E/L = -m² - B √(1-m²), minimal at √(1-m²) = 1/2 for B = 1
    const int L = 6;
    auto cfg = small_config(8, 2000, 3);
    cfg.n_iterations = 150;
    cfg.learning_rate = 0.1;
    cfg.init_scale = 0.0;
    const auto r = train(HamiltonianSpec::tfim(L, 1.0), 0, cfg);
    const double exact = ground_state(HamiltonianSpec::tfim(L, 1.0)).energy;
    EXPECT_GT(r.exact_energy, exact);
    EXPECT_GE(r.exact_energy, -7.5 - 1e-9);
    EXPECT_NEAR(r.exact_energy, -7.5, 0.02);
}

TEST(Train, ImprovesTfimEnergy) {
    const int L = 7;
    auto cfg = small_config(8, 2000, 9);
    cfg.n_iterations = 100;
    const auto h = HamiltonianSpec::tfim(L, 1.0);
    const auto r = train(h, 2, cfg);
    const double exact = ground_state(h).energy;
    EXPECT_LT(r.exact_energy, r.energy_trace.front().mean);
    EXPECT_LT(std::abs(r.exact_energy - exact) / std::abs(exact), 0.02);
    for (const auto& e : r.energy_trace) {
        EXPECT_TRUE(std::isfinite(e.mean));
        EXPECT_GT(e.acceptance, 0.0);
        EXPECT_LT(e.acceptance, 1.0);
    }
    EXPECT_TRUE(std::isfinite(r.fitted_alpha_P));
    EXPECT_EQ(r.eta.alpha, 2);
}
