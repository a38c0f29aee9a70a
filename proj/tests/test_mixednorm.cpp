#include <gtest/gtest.h>

#include <cmath>

#include "amspec/fft.hpp"
#include "amspec/mixednorm.hpp"
#include "oracles.hpp"

using namespace amspec;

TEST(Grid, SpacingAndCoordinates) {
    const Grid g{1, 8.0, 64};
    EXPECT_DOUBLE_EQ(g.h(), 0.25);
    EXPECT_DOUBLE_EQ(g.dxi(), kPi / 8.0);
    EXPECT_DOUBLE_EQ(g.nyquist(), 4.0 * kPi);
    EXPECT_DOUBLE_EQ(g.x(0), -8.0);
    EXPECT_DOUBLE_EQ(g.x(63), 7.75);
    EXPECT_EQ((Grid{3, 1.0, 4}.size()), 64u);
    EXPECT_THROW((Grid{1, 1.0, 0}.validate()), PreconditionFailed);
}

TEST(Signal, InnerAndNormAgreeWithQuadrature) {
    const Grid g{2, 3.0, 16};
    const auto f = oracle::random_signal(g, 1), h = oracle::random_signal(g, 2);
    EXPECT_NEAR(std::abs(inner(f, h) - oracle::quad_inner(f, h)), 0.0, 1e-12);
    EXPECT_NEAR(f.l2(), std::sqrt(oracle::quad_inner(f, f).real()), 1e-12);
    EXPECT_THROW(f + SampledSignal(Grid{2, 3.0, 8}), DimensionMismatch);
}

TEST(Fft, SpectrumMatchesDirectSum) {
    for (const Grid g : {Grid{1, 4.0, 48}, Grid{2, 2.0, 12}}) {
        const auto f = oracle::random_signal(g, 5);
        const auto fast = to_spectrum(f);
        const auto slow = oracle::dft_spectrum(f);
        double err = 0.0, mag = 0.0;
        for (std::size_t i = 0; i < fast.size(); ++i) {
            err = std::max(err, std::abs(fast[i] - slow[i]));
            mag = std::max(mag, std::abs(slow[i]));
        }
        EXPECT_LT(err, 1e-12 * mag);
    }
}

TEST(Fft, RoundTripAndPlancherel) {
    const Grid g{2, 5.0, 32};
    const auto f = oracle::random_signal(g, 9);
    const auto spec = to_spectrum(f);
    double e2 = 0.0;
    for (const cd& v : spec) e2 += std::norm(v);
    e2 *= std::pow(g.dxi(), 2);
    EXPECT_NEAR(e2, f.l2() * f.l2(), 1e-10 * e2);
    const auto back = from_spectrum(g, spec);
    EXPECT_LT((back - f).l2(), 1e-13 * f.l2());
}

TEST(Fft, IndexHelpers) {
    EXPECT_EQ(wrap_index(-1, 8), 7);
    EXPECT_EQ(wrap_index(17, 8), 1);
    EXPECT_EQ(signed_index(3, 8), 3);
    EXPECT_EQ(signed_index(4, 8), -4);
    EXPECT_FALSE(fft::library_version().empty());
}

TEST(MixedNorm, MatchesIteratedDefinition) {
    const Grid g{2, 2.0, 20};
    const auto f = oracle::random_signal(g, 11);
    for (const RVec& p : {RVec{1.5, 2.5}, RVec{2.5, 1.5}, RVec{1.0, 3.0}, RVec{2.0, 2.0}})
        EXPECT_NEAR(mixed_norm(f, p), oracle::mixed_norm(f, p), 1e-12 * oracle::mixed_norm(f, p));
    const Grid g1{1, 2.0, 64};
    const auto f1 = oracle::random_signal(g1, 4);
    EXPECT_NEAR(mixed_norm(f1, RVec{0.7}), oracle::mixed_norm(f1, {0.7}), 1e-12 * oracle::mixed_norm(f1, {0.7}));
}

TEST(MixedNorm, AxisOrderMatters) {
    // f = 1 on a strip: || ||1_A(x1)||_{p1} ||_{p2} = |A|^{1/p1} |[-T,T)|^{1/p2} when the strip spans x2
    const Grid g{2, 1.0, 16};
    SampledSignal f(g);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 16; ++j) f.values[std::size_t(i) * 16 + j] = 1.0;
    const double A = 4 * g.h();
    EXPECT_NEAR(mixed_norm(f, RVec{1.5, 3.0}), std::pow(A, 1 / 1.5) * std::pow(2.0, 1 / 3.0), 1e-13);
}

TEST(MixedNorm, SubadditivityForSmallExponent) {
    const Grid g{2, 2.0, 16};
    const auto f = oracle::random_signal(g, 1), h = oracle::random_signal(g, 2);
    EXPECT_TRUE(subadditivity_check(f, h, {0.8, 0.6}, 0.6));
    EXPECT_TRUE(subadditivity_check(f, h, {1.5, 2.5}, 1.0));
    EXPECT_THROW(subadditivity_check(f, h, {0.8, 0.6}, 0.9), PreconditionFailed);
}

TEST(Maximal, DirectionalMaxMatchesBruteForce) {
    const Grid g{2, 1.0, 12};
    const auto f = oracle::random_signal(g, 6);
    for (int axis : {1, 2}) {
        const auto M = directional_max(f, axis);
        for (int fixed = 0; fixed < 12; ++fixed) {
            std::vector<double> line(12);
            for (int t = 0; t < 12; ++t) {
                const std::size_t idx = axis == 1 ? std::size_t(t) * 12 + fixed : std::size_t(fixed) * 12 + t;
                line[std::size_t(t)] = std::abs(f.values[idx]);
            }
            const auto ref = oracle::interval_max(line);
            for (int t = 0; t < 12; ++t) {
                const std::size_t idx = axis == 1 ? std::size_t(t) * 12 + fixed : std::size_t(fixed) * 12 + t;
                EXPECT_NEAR(M.values[idx].real(), ref[std::size_t(t)], 1e-13);
            }
        }
    }
}

TEST(Maximal, DominatesSignalAndIsMonotone) {
    const Grid g{1, 4.0, 128};
    const auto f = oracle::random_signal(g, 8);
    const auto M = iterated_max(f, 1.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) EXPECT_GE(M.values[i].real(), std::abs(f.values[i]) - 1e-14);
    SampledSignal twice = f;
    twice *= 2.0;
    const auto M2 = iterated_max(twice, 1.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) EXPECT_NEAR(M2.values[i].real(), 2.0 * M.values[i].real(), 1e-12);
}

TEST(Maximal, RectangleBoundExhaustive) {
    for (const Grid g : {Grid{1, 4.0, 64}, Grid{2, 4.0, 8}}) {
        const auto f = random_packet_signal(g, 3, 3, 2.0, 0.6, 2.0);
        const auto rb = rectangle_bound_check(f, std::size_t(1) << 24, 1);
        EXPECT_TRUE(rb.ok);
        EXPECT_EQ(rb.rectangles, g.dim == 1 ? 2080u : 1296u);
        EXPECT_LE(rb.max_excess, 1e-12);
    }
}

TEST(Maximal, InequalityConstantStableUnderRefinement) {
    const PVec p({1.5, 2.5}, 2.0);
    const double a = maximal_inequality_check(p, 1.0, 4, Grid{2, 16.0, 64}, 9);
    const double b = maximal_inequality_check(p, 1.0, 4, Grid{2, 16.0, 128}, 9);
    EXPECT_GT(a, 1.0);
    EXPECT_LT(std::abs(b / a - 1.0), 0.1);
    EXPECT_THROW(maximal_inequality_check(p, 1.6, 1, Grid{2, 16.0, 64}, 9), PreconditionFailed);
}

TEST(Maximal, PeetreConstantIndependentOfFrequencyCentre) {
    const Grid g{1, 8.0, 256};
    const double R = 2.0;
    const double base = peetre_check(peetre_probe_signal(g, {0.0}, R), 1.0, R);
    EXPECT_GE(base, 1.0);
    for (double c : {7.0, -19.0, 30.0})
        EXPECT_NEAR(peetre_check(peetre_probe_signal(g, {c}, R), 1.0, R), base, 1e-9 * base);
}

TEST(PVec, FloorAndJ) {
    const PVec p({1.5, 0.8}, 2.0);
    EXPECT_DOUBLE_EQ(p.rfloor(), 0.8);
    EXPECT_DOUBLE_EQ(p.J(), 2.0 / 0.8);
    EXPECT_DOUBLE_EQ(PVec({3.0}, 2.0).rfloor(), 1.0);
    EXPECT_THROW(PVec({0.0}, 1.0), PreconditionFailed);
}
