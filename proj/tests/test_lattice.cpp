#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "amspec/lattice.hpp"

using namespace amspec;

TEST(Geometry, ScaleAndCentreFrozenValues) {
    const auto g = AlphaGeometry::make(0.5, 1, 1.0);
    EXPECT_DOUBLE_EQ(g.a, 2.125);
    EXPECT_DOUBLE_EQ(r_of({3}, g), 3.1622776601683795);
    EXPECT_DOUBLE_EQ(xi_of({3}, g)[0], 3.0 * 3.1622776601683795);
    EXPECT_DOUBLE_EQ(r_of({3}, AlphaGeometry::make(1.0 / 3.0, 1, 1.0)), 1.7782794100389228);
    EXPECT_DOUBLE_EQ(AlphaGeometry::make(0.0, 2, 0.5).a, 2.360281560896632);
}

TEST(Geometry, UniformCaseHasUnitScale) {
    const auto g = AlphaGeometry::make(0.0, 2, 1.0);
    for (const auto& k : freq_indices(2, 5)) {
        EXPECT_EQ(r_of(k, g), 1.0);
        EXPECT_EQ(xi_of(k, g), (RVec{double(k[0]), double(k[1])}));
    }
}

TEST(Geometry, RejectsInvalidParameters) {
    EXPECT_THROW(AlphaGeometry::make(1.0, 1, 1.0), PreconditionFailed);
    EXPECT_THROW(AlphaGeometry::make(-0.1, 1, 1.0), PreconditionFailed);
    EXPECT_THROW(AlphaGeometry::make(0.5, 1, 0.0), PreconditionFailed);
    EXPECT_THROW((Truncation{-1, 1.0, 1}.validate()), PreconditionFailed);
}

TEST(Geometry, QBallCentreAndRadius) {
    const auto g = AlphaGeometry::make(0.5, 2, 1.0);
    const Ball b = qball({1, 2}, {3, -1}, g);
    const double r = std::pow(6.0, 0.5);
    EXPECT_NEAR(b.radius, 1.0 / r, 1e-15);
    EXPECT_NEAR(b.center[0], -(kPi / g.a) * 3.0 / r, 1e-14);
    EXPECT_NEAR(b.center[1], (kPi / g.a) * 1.0 / r, 1e-14);
}

TEST(FreqIndices, LexicographicAndPositionInverse) {
    const auto ks = freq_indices(2, 3);
    ASSERT_EQ(ks.size(), 49u);
    EXPECT_EQ(ks.front(), (IVec{-3, -3}));
    EXPECT_EQ(ks[1], (IVec{-3, -2}));
    EXPECT_EQ(ks.back(), (IVec{3, 3}));
    for (std::size_t i = 0; i < ks.size(); ++i) EXPECT_EQ(freq_position(ks[i], 3), i);
}

TEST(Covering, CertifiedAtSelectedRadius) {
    const double c1 = select_c1(0.5, 1, 16, 0.05);
    EXPECT_EQ(c1, 1.0);
    const auto rep = certify_covering(AlphaGeometry::make(0.5, 1, c1), Truncation{16, 32.0, 1}, 0.05);
    EXPECT_TRUE(rep.coverage_ok);
    EXPECT_GE(rep.n0, 1);
    EXPECT_GT(rep.probes, 0u);
}

TEST(Covering, UnderRadiusThrowsCoverageGap) {
    EXPECT_THROW(certify_covering(AlphaGeometry::make(0.5, 1, 0.3), Truncation{16, 32.0, 1}, 0.05), CoverageGap);
    EXPECT_THROW(certify_covering(AlphaGeometry::make(0.5, 2, 0.3), Truncation{4, 8.0, 1}, 0.05), CoverageGap);
}

// brute force: every interior point lies in some ball, and no point lies in more than n0 balls
TEST(Covering, RandomInteriorPointsAreCovered) {
    for (int n : {1, 2}) {
        const int kmax = n == 1 ? 12 : 4;
        const auto g = AlphaGeometry::make(0.5, n, select_c1(0.5, n, kmax, 0.05));
        const Truncation t{kmax, 8.0, 1};
        const auto balls = ball_cover(g, t);
        const auto rep = certify_covering(g, t, 0.05);
        const double H = interior_half_width(g, kmax);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> U(-H, H);
        for (int s = 0; s < 2000; ++s) {
            RVec x(n);
            for (auto& v : x) v = U(rng);
            int hits = 0;
            for (const Ball& b : balls) {
                double d2 = 0.0;
                for (int i = 0; i < n; ++i) d2 += (x[i] - b.center[i]) * (x[i] - b.center[i]);
                if (d2 <= b.radius * b.radius) ++hits;
            }
            ASSERT_GE(hits, 1);
            ASSERT_LE(hits, rep.n0);
        }
    }
}

TEST(Covering, BallVolume) {
    EXPECT_DOUBLE_EQ(ball_volume(1, 2.5), 5.0);
    EXPECT_NEAR(ball_volume(2, 2.0), 4.0 * kPi, 1e-14);
    EXPECT_NEAR(ball_volume(3, 1.0), 4.0 * kPi / 3.0, 1e-14);
}

TEST(Layout, PeriodicBlockSizesFrozen) {
    const auto g = AlphaGeometry::make(0.5, 1, 1.0);
    const auto L = TFLayout::periodic(g, 3, 8.0);
    const int expect[4] = {11, 15, 24, 34};
    for (int k = 0; k <= 3; ++k) {
        const KBlock& B = L->block(std::size_t(L->block_of({k})));
        EXPECT_EQ(B.P, expect[k]);
        EXPECT_DOUBLE_EQ(B.step, 16.0 / B.P);
        EXPECT_EQ(B.lo, -(B.P / 2));
        EXPECT_EQ(B.count, std::size_t(B.P));
    }
    EXPECT_EQ(L->size(), std::size_t(11 + 2 * (15 + 24 + 34)));
}

TEST(Layout, FlatIndexRoundTrip) {
    const auto g = AlphaGeometry::make(0.5, 2, 1.0);
    const auto L = TFLayout::periodic(g, 2, 4.0);
    for (std::size_t i = 0; i < L->size(); i += 7) {
        const std::size_t b = L->block_of_flat(i);
        const IVec ell = L->ell_of(i);
        EXPECT_EQ(L->flat(L->block(b).k, ell), i);
        const RVec c = L->center(i);
        for (int a = 0; a < 2; ++a) EXPECT_DOUBLE_EQ(c[std::size_t(a)], L->block(b).step * ell[std::size_t(a)]);
    }
}

TEST(Layout, OffTruncationIndicesThrow) {
    const auto L = TFLayout::periodic(AlphaGeometry::make(0.5, 1, 1.0), 2, 8.0);
    EXPECT_EQ(L->block_of({3}), -1);
    EXPECT_THROW(L->flat({3}, {0}), IndexOutOfTruncation);
    EXPECT_THROW(L->flat({0}, {100}), IndexOutOfTruncation);
}

TEST(Layout, NominalUsesTruncationRange) {
    const auto g = AlphaGeometry::make(0.5, 1, 1.0);
    const Truncation t{4, 16.0, 1};
    const auto L = TFLayout::nominal(g, t);
    for (const KBlock& B : L->blocks()) {
        EXPECT_EQ(B.lo, -t.ellmax(B.k, g));
        EXPECT_EQ(B.P, 2 * t.ellmax(B.k, g) + 1);
        EXPECT_NEAR(B.step, kPi / g.a / B.r, 1e-15);
    }
    EXPECT_FALSE(L->is_periodic());
}

TEST(Layout, MinimumImageDistanceOnTorus) {
    const auto L = TFLayout::periodic(AlphaGeometry::make(0.0, 1, 1.0), 1, 8.0);
    EXPECT_DOUBLE_EQ(L->distance({7.5}, {-7.5}), 1.0);
    EXPECT_DOUBLE_EQ(L->distance({1.0}, {3.0}), 2.0);
}

TEST(Layout, SameAsComparesStructure) {
    const auto g = AlphaGeometry::make(0.5, 1, 1.0);
    EXPECT_TRUE(TFLayout::periodic(g, 2, 8.0)->same_as(*TFLayout::periodic(g, 2, 8.0)));
    EXPECT_FALSE(TFLayout::periodic(g, 2, 8.0)->same_as(*TFLayout::periodic(g, 3, 8.0)));
}
