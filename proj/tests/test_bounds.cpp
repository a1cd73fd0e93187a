#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "nqs/bounds.hpp"
#include "nqs/exact.hpp"
#include "nqs/experiments.hpp"
#include "nqs/presets.hpp"

using namespace nqs;

TEST(Constants, ClosedForms) {
    const double b1 = 3.0 * std::sqrt(2.0 * std::log(2.0)) / std::numbers::pi;
    const double b2 = 3.0 * std::sqrt(3.0) / std::numbers::pi;
    EXPECT_NEAR(beta1(), b1, 1e-14);
    EXPECT_NEAR(beta2(), b2, 1e-14);
    EXPECT_NEAR(c1(), 4.0 * (1.0 + b1 * b1), 1e-14);
    EXPECT_NEAR(c2(), 4.0 * b1 * b1 + 4.0 * std::sqrt(std::pow(b1, 4) + 4.0 * b2 * b2), 1e-14);
    const auto bc = bound_constants();
    EXPECT_EQ(bc.beta1, beta1());
    EXPECT_EQ(bc.c2, c2());
}

TEST(Constants, Beta1CosineInequality) {
    const double b1sq = beta1() * beta1();
    for (int i = 0; i <= 1000; ++i) {
        const double x = std::numbers::pi / 3.0 * i / 1000.0;
        EXPECT_GE(std::cos(x), std::exp(-0.5 * b1sq * x * x) - 1e-15);
    }
}

TEST(F, ZeroAndLeadingOrder) {
    EXPECT_EQ(F1(0.0), 0.0);
    EXPECT_EQ(F2(0.0), 0.0);
    EXPECT_NEAR(F1(1e-8) / 1e-8, c1(), 1e-6);
    EXPECT_NEAR(F2(1e-8) / 1e-8, c2(), 1e-3);
    EXPECT_THROW(F1(-1.0), ArgumentError);
}

TEST(F, MatchesDirectFormula) {
    const double b1sq = beta1() * beta1();
    const double b2 = beta2();
    for (double x : {1e-3, 1e-2, 0.05, 0.1}) {
        EXPECT_NEAR(F1(x), 2.0 - 2.0 * std::exp(-2.0 * (1.0 + b1sq) * x) * std::cos(4.0 * b2 * x), 1e-13);
        const double R1 = std::exp(4.0 * x), R2 = std::exp(-4.0 * b1sq * x), th = 8.0 * b2 * x;
        const double direct = std::max(std::abs(R1 - 1.0), std::abs(1.0 - R2)) +
                              std::max(std::sqrt(R1 * R1 - 2.0 * R1 * std::cos(th) + 1.0),
                                       std::sqrt(R2 * R2 - 2.0 * R2 * std::cos(th) + 1.0));
        EXPECT_NEAR(F2(x), direct, 1e-13);
    }
}

TEST(F, IncreasingOnWorkingRange) {
    double p1 = 0.0, p2 = 0.0;
    for (int i = 1; i <= 2000; ++i) {
        const double x = 0.1 * i / 2000.0;
        EXPECT_GT(F1(x), p1);
        EXPECT_GT(F2(x), p2);
        p1 = F1(x);
        p2 = F2(x);
    }
}

TEST(TailSum, Examples) {
    EXPECT_NEAR(tail_sum_power(0, 2.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-14);
    EXPECT_NEAR(tail_sum_power(1, 3.0), 1.2020569031595942 - 1.0, 1e-14);
    EXPECT_THROW(tail_sum_power(3, 1.0), DivergenceError);
    for (std::int64_t a : {1000, 100000, 10000000}) {
        const double v = tail_sum_power(a, 2.5);
        EXPECT_NEAR(v / (std::pow(static_cast<double>(a), -1.5) / 1.5), 1.0, 5.0 / a);
    }
}

TEST(TailSum, BruteForce) {
    for (double s : {1.5, 2.0, 6.0, 7.0}) {
        for (std::int64_t a : {0, 5, 37}) {
            long double direct = 0.0L;
            const long double N = 1000000.0L;
            for (std::int64_t n = 1000000; n > a; --n) direct += std::pow(static_cast<long double>(n), -s);
            // Σ_{n>N} n^{-s} ≈ N^{1-s}/(s-1) - ½N^{-s} + s N^{-s-1}/12
            const long double tail =
                std::pow(N, 1.0L - s) / (s - 1.0L) - 0.5L * std::pow(N, -s) + s * std::pow(N, -s - 1.0L) / 12.0L;
            const double want = static_cast<double>(direct + tail);
            EXPECT_NEAR(tail_sum_power(a, s) / want, 1.0, 1e-12) << s << " " << a;
        }
    }
}

TEST(PTail, Exponential) {
    EXPECT_NEAR(P_tail(LevelDecay::exponential(1.5), 0), 0.8, 1e-15);
    const auto lam = LevelDecay::exponential(1.5, 0.2, 1.0);
    long double direct = 0.0L;
    for (int k = 4; k < 400; ++k) direct += std::pow(static_cast<long double>(lam(k)), 2);
    EXPECT_NEAR(P_tail(lam, 3) / static_cast<double>(direct), 1.0, 1e-13);
    EXPECT_THROW(P_tail(LevelDecay::exponential(1.0), 0), DivergenceError);
}

TEST(PTail, PowerMatchesBruteForce) {
    const auto lam = LevelDecay::power(3.0);
    long double direct = 0.0L;
    for (std::int64_t k = 10000000; k >= 11; --k) direct += std::pow(static_cast<long double>(k), -6.0L);
    EXPECT_NEAR(P_tail(lam, 10) / static_cast<double>(direct), 1.0, 1e-10);
}

TEST(PTail, MonotoneToZero) {
    for (const auto& lam : {LevelDecay::power(0.75), LevelDecay::exponential(1.1), LevelDecay::inverse_log()}) {
        double prev = P_tail(lam, 0);
        for (int m = 1; m < 2000; m += 37) {
            const double v = P_tail(lam, m);
            EXPECT_LT(v, prev);
            EXPECT_GT(v, 0.0);
            prev = v;
        }
    }
    EXPECT_LT(P_tail(LevelDecay::power(3.0), 1000000), 1e-29);
}

TEST(PTail, TableIsFinite) {
    const auto lam = LevelDecay::from_table({1.0, 0.5, 0.25});
    EXPECT_DOUBLE_EQ(P_tail(lam, 0), 1.3125);
    EXPECT_DOUBLE_EQ(P_tail(lam, 2), 0.0625);
    EXPECT_EQ(P_tail(lam, 3), 0.0);
}

TEST(QVal, Examples) {
    EXPECT_NEAR(Q_val(OrbitalDecay::constant(0.1), 11), 0.36, 1e-15);
    EXPECT_DOUBLE_EQ(Q_val(OrbitalDecay::from_table({0.3, 0, 0, 0, 0, 0}), 11), 0.09);
}

TEST(QVal, InverseDistanceGrowsLikeLogSquared) {
    const auto mu = OrbitalDecay::power(1.0, 1.0);
    double prev = 0.0;
    for (int L = 1001; L <= 1024001; L = 2 * L - 1) {
        const double ratio = Q_val(mu, 2 * L - 1) / Q_val(mu, L);
        const double want = std::pow(std::log(2.0 * L) / std::log(static_cast<double>(L)), 2);
        // Q ~ (c + ½ ln L)², so the ratio approaches the log ratio from below as L grows.
        if (prev > 0.0) {
            EXPECT_LT(std::abs(ratio - want), prev);
        }
        prev = std::abs(ratio - want);
    }
}

TEST(RatioBounds, NoTailGivesIdentity) {
    DecayProfile p;
    p.lambda = LevelDecay::from_table({0.1, 0.05});
    p.mu = OrbitalDecay::power(0.1, 3.0);
    const auto r = ratio_bounds(LrfdFamily{p, 0}, 9, 18);
    EXPECT_EQ(r.R1, 1.0);
    EXPECT_EQ(r.R2, 1.0);
    EXPECT_EQ(r.Theta, 0.0);
}

TEST(RatioBounds, SandwichAndMonotone) {
    const auto f = preset("fig2b").family();
    double prev = std::numeric_limits<double>::infinity();
    for (int n = n_I(f, 9).used; n < 30; ++n) {
        const auto r = ratio_bounds(f, 9, n * 9);
        EXPECT_LE(r.R2, 1.0);
        EXPECT_GE(r.R1, 1.0);
        EXPECT_LT(r.Theta, prev);
        prev = r.Theta;
    }
}

TEST(RatioBounds, DominateBruteForceRatios) {
    const auto& pr = preset("fig2b");
    const int L = 9;
    const TruncationLadder ladder(preset_rbm(pr, L, 60));
    for (int n : {2, 3, 5}) {
        const auto r = ratio_bounds(pr.family(), L, n * L);
        const auto st = ladder.ratio_stats(60, n);
        EXPECT_LE(st.max_mod2, r.R1);
        EXPECT_GE(st.min_mod2, r.R2);
        EXPECT_LE(st.max_abs_arg, r.Theta);
    }
}

TEST(NTheta, FastDecayNeedsOneLevel) {
    DecayProfile p;
    p.lambda = LevelDecay::exponential(1e6);
    p.mu = OrbitalDecay::power(0.1, 3.0);
    const LrfdFamily f{p, 0};
    EXPECT_EQ(n_theta(f, 11), std::max(1, n_I(f, 11).used + 1));
}

TEST(NTheta, Fig2bDefinitionHolds) {
    const auto f = preset("fig2b").family();
    const int L = 11;
    const int nt = n_theta(f, L);
    const int nI = n_I(f, L).used;
    EXPECT_GT(nt, nI);
    EXPECT_LE(4.0 * beta2() * composite_x(f, L, nt), std::numbers::pi / 4.0);
    if (nt - 1 > nI) {
        EXPECT_GT(4.0 * beta2() * composite_x(f, L, nt - 1), std::numbers::pi / 4.0);
    }
    for (int lv = nI + 1 - f.leading_levels; lv < nI + 20; ++lv)
        if (lv >= 1) {
            EXPECT_LE(V_exact(f.profile, L, lv), std::numbers::pi / 3.0);
        }
}

TEST(NTheta, NondecreasingInL) {
    for (const char* name : {"fig2a", "fig2b", "fig1b"}) {
        const auto f = preset(name).family();
        int prev = 0;
        for (int L = 5; L <= 19; ++L) {
            const int nt = n_theta(f, L);
            EXPECT_GE(nt, prev) << name << " L=" << L;
            prev = nt;
        }
    }
}

TEST(NI, ExactNeverLooserThanBound) {
    const auto f = preset("fig1b").family();
    for (int L = 5; L <= 15; L += 2) {
        const auto r = n_I(f, L);
        EXPECT_LE(r.from_exact, r.from_bound);
        EXPECT_EQ(r.used, r.from_exact);
    }
}

TEST(TruncationBounds, DomainErrorNamesMinimalNh) {
    const auto f = preset("fig2b").family();
    const int L = 11;
    const int nt = n_theta(f, L);
    try {
        (void)truncation_error_bounds(f, L, nt * L);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find(std::to_string((nt + 1) * L)), std::string::npos);
    }
    EXPECT_NO_THROW((void)truncation_error_bounds(f, L, (nt + 1) * L));
    EXPECT_EQ(min_admissible_nh(f, L), (nt + 1) * L);
}

TEST(TruncationBounds, ReportFields) {
    const auto f = preset("fig2a").family();
    const auto r = truncation_error_bounds(f, 11, 55);
    EXPECT_EQ(r.x, 11 * r.Q * r.scale * r.scale * r.P_tail);
    EXPECT_EQ(r.bound1, F1(r.x));
    EXPECT_EQ(r.bound2, F2(r.x));
    EXPECT_EQ(r.P_tail, P_tail(f, 5));
    EXPECT_NEAR(r.Q, std::pow(0.1 + 0.05 * (1 + 1 / 8.0 + 1 / 27.0 + 1 / 64.0 + 1 / 125.0), 2), 1e-15);
}

TEST(TruncationBounds, VanishWithNh) {
    const auto f = preset("fig2b").family();
    double p1 = 1e300, p2 = 1e300;
    for (int n = min_admissible_nh(f, 11) / 11; n < 3000; n = n * 3 / 2 + 1) {
        const auto r = truncation_error_bounds(f, 11, n * 11);
        EXPECT_LT(r.bound1, p1);
        EXPECT_LT(r.bound2, p2);
        p1 = r.bound1;
        p2 = r.bound2;
    }
    EXPECT_LT(p1, 1e-15);
}

TEST(TruncationBounds, PowerLawSlope) {
    const auto f = preset("fig2b").family();
    const double a = f.profile.lambda.alpha_P;
    const int n1 = 20000, n2 = 40000;
    const double b1 = truncation_error_bounds(f, 11, n1 * 11).bound2;
    const double b2 = truncation_error_bounds(f, 11, n2 * 11).bound2;
    EXPECT_NEAR(std::log(b2 / b1) / std::log(2.0), 1.0 - 2.0 * a, 1e-3);
}

TEST(TruncationBounds, DominateExactErrors) {
    for (const char* name : {"fig2a", "fig2b"}) {
        const auto& pr = preset(name);
        const auto f = pr.family();
        for (int L : {7, 9}) {
            const TruncationLadder ladder(preset_rbm(pr, L, 60));
            const StateVector full = ladder.state(60);
            const double slack = composite_x(f, L, 60);
            const double tol1 = F1(slack), tol2 = F2(slack);
            for (int n = n_theta(f, L) + 1; n <= 20; ++n) {
                const auto r = truncation_error_bounds(f, L, n * L);
                EXPECT_LE(ladder.error_l2(60, n), r.bound1 + tol1);
                const StateVector st = ladder.state(n);
                for (int m : {1, 3})
                    EXPECT_LE(std::abs(expectation(full, nn_pair(L, m)) - expectation(st, nn_pair(L, m))),
                              r.bound2 + tol2);
            }
        }
    }
}

TEST(NhStar, MinimalAdmissibleWhenBoundAlreadyMet) {
    const auto f = preset("fig2b").family();
    EXPECT_EQ(nh_star_bound(f, 11, 10.0, ErrorType::state_l2), min_admissible_nh(f, 11));
    EXPECT_THROW(nh_star_bound(f, 11, 0.0, ErrorType::state_l2), ArgumentError);
}

TEST(NhStar, SmallestQualifyingMultiple) {
    const auto f = preset("fig2b").family();
    for (double eps : {1e-3, 1e-6}) {
        const int nh = nh_star_bound(f, 11, eps, ErrorType::expectation);
        EXPECT_EQ(nh % 11, 0);
        EXPECT_LE(F2(composite_x(f, 11, nh / 11)), eps);
        if (nh / 11 - 1 > n_theta(f, 11)) {
            EXPECT_GT(F2(composite_x(f, 11, nh / 11 - 1)), eps);
        }
    }
}

TEST(NhStar, PowerLawGrowthInL) {
    const auto f = preset("fig2d").family();
    std::vector<double> x, y;
    for (int L = 5; L <= 15; ++L) {
        x.push_back(L);
        y.push_back(nh_star_bound(f, L, 1e-3, ErrorType::state_l2));
    }
    for (std::size_t i = 1; i < y.size(); ++i) EXPECT_GE(y[i], y[i - 1]);
    const auto fit = fit_loglog(x, y);
    EXPECT_GT(fit.slope, 0.5);
}

TEST(NhStar, ExponentialProfileScaling) {
    DecayProfile p;
    p.lambda = LevelDecay::exponential(1.5);
    p.mu = OrbitalDecay::power(0.1, 3.0);
    const LrfdFamily f{p, 0};
    const auto cls = classify_manifold(p);
    EXPECT_EQ(cls.index, 1);
    for (int L = 5; L <= 19; ++L) {
        const double ratio = nh_star_bound(f, L, 1e-6, ErrorType::state_l2) / complexity_estimate(cls, p, L, 1e-6);
        EXPECT_GT(ratio, 0.01);
        EXPECT_LT(ratio, 10.0);
    }
    // Halving eps adds about L ln 2 / (2 ln δ_P) hidden nodes.
    const int L = 11;
    const int a = nh_star_bound(f, L, 1e-8, ErrorType::state_l2);
    const int b = nh_star_bound(f, L, 5e-9, ErrorType::state_l2);
    EXPECT_LE(b - a, L * static_cast<int>(std::ceil(std::log(2.0) / (2 * std::log(1.5)))) + L);
}

TEST(Classify, TableRows) {
    DecayProfile p;
    p.mu = OrbitalDecay::power(0.1, 3.0);
    p.lambda = LevelDecay::exponential(2.0);
    EXPECT_EQ(classify_manifold(p).tag, "S2_1");
    EXPECT_EQ(classify_manifold(p).complexity, "O(L ln(L/eps))");
    p.lambda = LevelDecay::power(3.0);
    EXPECT_EQ(classify_manifold(p).tag, "S2_2");
    p.mu = OrbitalDecay::power(0.1, 1.0);
    EXPECT_EQ(classify_manifold(p).tag, "S2_4");
    EXPECT_EQ(classify_manifold(p).complexity, "O((L^(2 alpha_P) (ln L)^2/eps)^(1/(2 alpha_P-1)))");
    p.lambda = LevelDecay::exponential(2.0);
    EXPECT_EQ(classify_manifold(p).tag, "S2_3");
    p.mu = OrbitalDecay::constant(0.1);
    EXPECT_EQ(classify_manifold(p).tag, "S2_5");
    p.lambda = LevelDecay::power(3.0);
    EXPECT_EQ(classify_manifold(p).tag, "S2_6");
    EXPECT_EQ(classify_manifold(p).complexity, "O((L^(2 alpha_P+2)/eps)^(1/(2 alpha_P-1)))");
    p.mu = OrbitalDecay::power(0.1, 3.0);
    p.lambda = LevelDecay::inverse_log();
    EXPECT_EQ(classify_manifold(p).tag, "S2_7");
    EXPECT_TRUE(classify_manifold(p).bound_not_tight);
    p.lambda = LevelDecay::from_table({1.0});
    EXPECT_EQ(classify_manifold(p).index, 0);
    EXPECT_TRUE(std::isnan(complexity_estimate(classify_manifold(p), p, 10, 1e-3)));
}
