#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "nqs/lanczos.hpp"
#include "nqs/lrfd.hpp"

using namespace nqs;

namespace {

/// Even-parity free-fermion ground energy of the periodic TFIM.
double tfim_free_fermion(int L, double B) {
    double e = 0.0;
    for (int n = 0; n < L; ++n) {
        const double k = std::numbers::pi * (2 * n + 1) / L;
        e -= std::sqrt(1.0 + B * B - 2.0 * B * std::cos(k));
    }
    return e;
}

}  // namespace

TEST(Hamiltonian, DenseIsSymmetric) {
    for (const auto& h : {HamiltonianSpec::cluster(5), HamiltonianSpec::tfim(6, 0.7), HamiltonianSpec::xxz(6, 1.3)}) {
        const auto H = dense_hamiltonian(h);
        EXPECT_LT((H - H.transpose()).norm(), 1e-14) << h.name();
    }
    EXPECT_THROW(HamiltonianSpec::tfim(2, 1.0).validate(), ArgumentError);
}

TEST(Hamiltonian, XxzFlipElement) {
    const auto H = dense_hamiltonian(HamiltonianSpec::xxz(4, 0.0));
    // |↑↓↑↑⟩ → |↓↑↑↑⟩ through the (1,2) bond
    const auto s = SpinConfig::from_spins({1, -1, 1, 1});
    const auto t = SpinConfig::from_spins({-1, 1, 1, 1});
    EXPECT_EQ(H(t.bits(), s.bits()), -2.0);
}

TEST(Lanczos, MatchesDenseSpectrum) {
    for (const auto& h : {HamiltonianSpec::tfim(8, 1.0), HamiltonianSpec::tfim(7, 0.4), HamiltonianSpec::xxz(8, 0.5),
                          HamiltonianSpec::xxz(7, -0.3), HamiltonianSpec::cluster(8)}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_hamiltonian(h));
        const auto g = ground_state(h);
        EXPECT_NEAR(g.energy, es.eigenvalues()[0], 1e-10) << h.name();
        EXPECT_NEAR(g.state.normalized().norm2(), 1.0, 1e-12);
        EXPECT_NEAR(energy(h, g.state), g.energy, 1e-9);
    }
}

TEST(Lanczos, TfimZeroFieldIsDegenerateFerromagnet) {
    for (int L : {5, 8, 11}) {
        const auto g = ground_state(HamiltonianSpec::tfim(L, 0.0));
        EXPECT_NEAR(g.energy, -L, 1e-10);
        EXPECT_TRUE(g.degenerate);
        EXPECT_EQ(g.ground_space.size(), 2u);
        StateVector up;
        up.L = L;
        up.amp.assign(std::size_t{1} << L, 0.0);
        up.amp.back() = 1.0;
        EXPECT_NEAR(subspace_fidelity(up, g.ground_space), 1.0, 1e-10);
    }
}

TEST(Lanczos, ClusterGroundStateIsTheRbm) {
    for (int L : {5, 7, 9, 11}) {
        const auto g = ground_state(HamiltonianSpec::cluster(L));
        EXPECT_NEAR(g.energy, -L, 1e-10);
        EXPECT_FALSE(g.degenerate);
        EXPECT_NEAR(fidelity(build_state(build_cluster_rbm(L)), g.state), 1.0, 1e-10);
    }
}

TEST(Lanczos, TfimFreeFermion) {
    for (int L : {8, 12}) {
        for (double B : {0.5, 1.0, 1.7}) {
            const auto g = ground_state(HamiltonianSpec::tfim(L, B));
            EXPECT_NEAR(g.energy, tfim_free_fermion(L, B), 1e-8) << L << " " << B;
        }
    }
}

TEST(Lanczos, PhaseConvention) {
    const auto g = ground_state(HamiltonianSpec::tfim(6, 1.0));
    std::size_t big = 0;
    for (std::size_t i = 0; i < g.state.dim(); ++i)
        if (std::abs(g.state.amp[i]) > std::abs(g.state.amp[big])) big = i;
    EXPECT_GT(g.state.amp[big].real(), 0.0);
    EXPECT_EQ(g.state.amp[big].imag(), 0.0);
}

TEST(Lanczos, DeterministicForSeed) {
    LanczosOptions opt;
    opt.seed = 99;
    const auto a = ground_state(HamiltonianSpec::xxz(9, 1.0), opt);
    const auto b = ground_state(HamiltonianSpec::xxz(9, 1.0), opt);
    EXPECT_EQ(a.energy, b.energy);
    EXPECT_EQ(a.state.amp, b.state.amp);
}

TEST(Lanczos, CapacityLimit) {
    EXPECT_THROW(ground_state(HamiltonianSpec::tfim(21, 1.0)), CapacityError);
    EXPECT_THROW(dense_hamiltonian(HamiltonianSpec::tfim(13, 1.0)), CapacityError);
}
