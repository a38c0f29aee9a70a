#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "amspec/bapu.hpp"

using namespace amspec;

namespace {

// sum over every block, no support lookup
double brute_denominator(const BapuSystem& sys, const RVec& xi) {
    double d = 0.0;
    for (std::size_t b = 0; b < sys.size(); ++b) d += sys.phi(xi, b) * sys.phi(xi, b);
    return d;
}

BapuSystem make_system(double alpha, int n, int kmax, ProfileKind kind = ProfileKind::Standard) {
    return BapuSystem(AlphaGeometry::make(alpha, n, select_c1(alpha, n, kmax, 0.05)), Truncation{kmax, 8.0, 1},
                      BumpProfile{kind});
}

}  // namespace

TEST(Bump, PlateauTransitionAndSupport) {
    for (ProfileKind kind : {ProfileKind::Standard, ProfileKind::Alternate}) {
        const BumpProfile p{kind};
        EXPECT_EQ(p.rho(0.0), 1.0);
        EXPECT_EQ(p.rho(1.0), 1.0);
        EXPECT_EQ(p.rho(1.5), 0.0);
        EXPECT_EQ(p.rho(2.0), 0.0);
        EXPECT_NEAR(p.rho(1.25), 0.5, 1e-15);
        double prev = 1.0;
        for (double t = 1.0; t <= 1.5; t += 0.01) {
            const double v = p.rho(t);
            EXPECT_LE(v, prev + 1e-15);
            prev = v;
        }
    }
    EXPECT_NE(BumpProfile{ProfileKind::Standard}.rho(1.1), BumpProfile{ProfileKind::Alternate}.rho(1.1));
}

TEST(Bapu, PhiVanishesOutsideSupport) {
    const auto sys = make_system(0.5, 1, 8);
    for (std::size_t b = 0; b < sys.size(); ++b) {
        const double R = sys.support_radius(b);
        EXPECT_EQ(sys.phi({sys.xi(b)[0] + R * 1.0001}, b), 0.0);
        EXPECT_EQ(sys.phi({sys.xi(b)[0] - R * 1.0001}, b), 0.0);
        EXPECT_EQ(sys.phi(sys.xi(b), b), 1.0);
        EXPECT_EQ(sys.phi_k(sys.xi(b), sys.k(b)), 1.0);
    }
}

TEST(Bapu, ActiveSetAgreesWithBruteForce) {
    const auto sys = make_system(0.5, 2, 4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-sys.outer_radius(), sys.outer_radius());
    for (int s = 0; s < 500; ++s) {
        const RVec x{U(rng), U(rng)};
        auto act = sys.active(x);
        std::sort(act.begin(), act.end());
        std::vector<std::size_t> ref;
        for (std::size_t b = 0; b < sys.size(); ++b)
            if (sys.phi(x, b) > 0.0) ref.push_back(b);
        EXPECT_EQ(act, ref);
        EXPECT_NEAR(sys.denominator(x), brute_denominator(sys, x), 1e-14);
    }
}

// sum_k theta_k^2 = 1 at interior points for both profiles and both dimensions
TEST(Bapu, PartitionOfSquaresInInterior) {
    for (ProfileKind kind : {ProfileKind::Standard, ProfileKind::Alternate})
        for (auto [n, kmax] : {std::pair{1, 16}, std::pair{2, 5}}) {
            const auto sys = make_system(0.5, n, kmax, kind);
            for (const RVec& x : interior_probes(sys, 3000, 7)) {
                const double d = brute_denominator(sys, x);
                double s = 0.0;
                for (std::size_t b : sys.active(x)) {
                    const double t = sys.theta(x, b);
                    EXPECT_NEAR(t, sys.phi(x, b) / std::sqrt(d), 1e-14);
                    s += t * t;
                }
                ASSERT_NEAR(s, 1.0, 1e-12);
            }
        }
}

TEST(Bapu, ThetaKMatchesTheta) {
    const auto sys = make_system(0.25, 1, 6);
    for (const RVec& x : interior_probes(sys, 200, 4))
        for (std::size_t b : sys.active(x)) EXPECT_NEAR(sys.theta_k(x, sys.k(b)), sys.theta(x, b), 1e-14);
}

TEST(Bapu, OutsideCoverThrowsDenominatorUnderflow) {
    const auto sys = make_system(0.5, 1, 4);
    EXPECT_THROW(sys.theta({sys.outer_radius() + 10.0}, 0), DenominatorUnderflow);
    EXPECT_EQ(sys.theta_raw({sys.outer_radius() + 10.0}, 0), 0.0);
}

TEST(Bapu, NeighboursSymmetricAndReflexive) {
    const auto sys = make_system(0.5, 2, 4);
    for (std::size_t b = 0; b < sys.size(); ++b) {
        const auto& nb = sys.neighbours(b);
        EXPECT_NE(std::find(nb.begin(), nb.end(), b), nb.end());
        for (std::size_t j : nb) {
            const auto& back = sys.neighbours(j);
            EXPECT_NE(std::find(back.begin(), back.end(), b), back.end());
        }
    }
}

TEST(Bapu, CertificateOnDeskGrid) {
    const auto sys = make_system(0.5, 1, 8);
    const auto rep = certify_bapu(sys, PVec({1.5}, 1.5), Grid{1, 16.0, 2048}, 20000, 3);
    EXPECT_LT(rep.pu_max_err, 1e-12);
    EXPECT_TRUE(rep.support_ok);
    EXPECT_GT(rep.bapu3_sup, 0.0);
    EXPECT_TRUE(std::isfinite(rep.bapu3_sup));
    EXPECT_EQ(rep.bapu3_per_k.size(), sys.size());
}

// ||1_B||_p / |B| closed forms at p = 2: 1D |B|^{-1/2}, 2D (pi R^2)^{-1/2}
TEST(Bapu, BallMixedNormClosedForms) {
    EXPECT_NEAR(ball_mixed_norm(1, 0.75, {2.0}), std::pow(1.5, -0.5), 1e-14);
    EXPECT_NEAR(ball_mixed_norm(2, 1.3, {2.0, 2.0}), std::pow(kPi * 1.69, -0.5), 1e-13);
    EXPECT_NEAR(ball_mixed_norm(1, 2.0, {1.0}), 1.0, 1e-14);
}
