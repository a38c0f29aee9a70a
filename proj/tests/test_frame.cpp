#include <gtest/gtest.h>

#include <cmath>

#include "amspec/fft.hpp"
#include "amspec/frame.hpp"
#include "oracles.hpp"

using namespace amspec;

namespace {

FrameSystem small_frame(double alpha, int n, int kmax, const Grid& g) {
    return FrameSystem(AlphaGeometry::make(alpha, n, select_c1(alpha, n, kmax, 0.05)), kmax, g);
}

// phi_{k,l}(x_j) = (2 pi)^{-1/2} dxi sum_m theta_k(xi_m) (P dxi)^{-1/2} e^{-i x_{k,l}(xi_m - xi_k)} e^{i x_j xi_m},
// theta from a cover padded well beyond kmax, summed over every frequency index directly (n = 1)
SampledSignal direct_atom(const FrameSystem& fs, std::size_t idx) {
    const Grid& g = fs.grid();
    const TFLayout& L = *fs.layout();
    const KBlock& B = L.block(L.block_of_flat(idx));
    const int pad = 3;
    const BapuSystem ext(fs.geometry(), Truncation{L.kmax() + pad, g.T, 0});
    const std::size_t bext = freq_position(B.k, L.kmax() + pad);
    const double xkl = L.center(idx)[0];
    const double dxi = g.dxi();
    const double scale = std::pow(B.P * dxi, -0.5);
    SampledSignal out(g);
    for (int j = 0; j < g.N; ++j) {
        cd acc = 0.0;
        for (int m = -g.N / 2; m < g.N / 2; ++m) {
            const double xi = m * dxi;
            const double th = ext.theta_raw({xi}, bext);
            if (th == 0.0) continue;
            acc += th * scale * std::polar(1.0, -xkl * (xi - B.xi[0]) + g.x(j) * xi);
        }
        out.values[std::size_t(j)] = acc * dxi / std::sqrt(2.0 * kPi);
    }
    return out;
}

}  // namespace

TEST(Frame, AtomsMatchDirectDefinition) {
    const auto fs = small_frame(0.5, 1, 3, Grid{1, 8.0, 256});
    const TFLayout& L = *fs.layout();
    for (std::size_t b = 0; b < L.num_blocks(); ++b) {
        const KBlock& B = L.block(b);
        for (std::size_t t : {std::size_t(0), std::size_t(B.P / 3), std::size_t(B.P - 1)}) {
            const std::size_t idx = B.offset + t;
            const auto ref = direct_atom(fs, idx);
            EXPECT_LT((fs.atom(idx) - ref).l2(), 1e-12 * ref.l2()) << "block " << b;
        }
    }
}

TEST(Frame, AtomFreqMatchesSpectrumOfAtom) {
    const auto fs = small_frame(0.5, 1, 3, Grid{1, 8.0, 256});
    const std::size_t idx = fs.layout()->flat({2}, {3});
    const auto blk = fs.atom_freq(idx);
    const auto spec = to_spectrum(fs.atom(idx));
    for (int t = 0; t < blk.P; ++t) {
        const int slot = wrap_index(blk.origin[0] + t, 256);
        EXPECT_NEAR(std::abs(spec[std::size_t(slot)] - blk.values[std::size_t(t)]), 0.0, 1e-13);
    }
}

TEST(Frame, AnalyzeIsQuadratureInnerProduct) {
    const Grid g{2, 4.0, 64};
    const auto fs = small_frame(0.5, 2, 2, g);
    const auto f = band_limited_panel(fs, 1, 3)[0];
    const auto c = fs.analyze(f);
    for (std::size_t idx = 0; idx < fs.layout()->size(); idx += 97)
        EXPECT_NEAR(std::abs(c.values[idx] - oracle::quad_inner(f, fs.atom(idx))), 0.0, 1e-12 * f.l2());
}

TEST(Frame, SynthesisIsAdjointOfAnalysis) {
    const Grid g{1, 8.0, 512};
    const auto fs = small_frame(0.5, 1, 6, g);
    const auto f = oracle::random_signal(g, 4);
    CoeffField c(fs.layout());
    std::mt19937_64 rng(8);
    std::normal_distribution<double> U;
    for (auto& v : c.values) v = cd(U(rng), U(rng));
    cd lhs = inner(fs.synthesize(c), f);
    cd rhs = 0.0;
    const auto a = fs.analyze(f);
    for (std::size_t i = 0; i < a.values.size(); ++i) rhs += c.values[i] * std::conj(a.values[i]);
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-11 * std::abs(rhs));
}

TEST(Frame, SpectrumEntryPointsAgree) {
    const Grid g{1, 8.0, 512};
    const auto fs = small_frame(0.25, 1, 8, g);
    const auto f = oracle::random_signal(g, 2);
    const auto a = fs.analyze(f), b = fs.analyze_spectrum(to_spectrum(f));
    EXPECT_LT((a - b).l2(), 1e-14 * a.l2());
    const auto s = from_spectrum(g, fs.synthesize_spectrum(a));
    EXPECT_LT((s - fs.synthesize(a)).l2(), 1e-13 * s.l2());
}

// translating by x_{k,l} multiplies the spectrum by e^{-i x_{k,l}(xi - xi_k)}
TEST(Frame, TranslationCovariance) {
    const auto fs = small_frame(0.5, 1, 4, Grid{1, 8.0, 512});
    const TFLayout& L = *fs.layout();
    const auto base = fs.atom_freq({3}, {0});
    const double dxi = fs.grid().dxi();
    const KBlock& B = L.block(std::size_t(L.block_of({3})));
    for (int ell : {1, -4, 7}) {
        const auto sh = fs.atom_freq({3}, {ell});
        ASSERT_EQ(sh.origin, base.origin);
        for (int t = 0; t < B.P; ++t) {
            const double xi = (base.origin[0] + t) * dxi;
            const cd expect = base.values[std::size_t(t)] * std::polar(1.0, -B.step * ell * (xi - B.xi[0]));
            EXPECT_NEAR(std::abs(sh.values[std::size_t(t)] - expect), 0.0, 1e-14);
        }
    }
}

TEST(Frame, TightOnBandLimitedPanel) {
    for (double alpha : {0.0, 0.5}) {
        const auto fs1 = small_frame(alpha, 1, 12, Grid{1, 8.0, 2048});
        const auto r1 = tight_frame_check(fs1, band_limited_panel(fs1, 6, 1));
        EXPECT_LT(r1.parseval_err, 1e-12);
        EXPECT_LT(r1.recon_err, 1e-12);
        const auto fs2 = small_frame(alpha, 2, 3, Grid{2, 8.0, 128});
        const auto r2 = tight_frame_check(fs2, band_limited_panel(fs2, 3, 1));
        EXPECT_LT(r2.parseval_err, 1e-12);
        EXPECT_LT(r2.recon_err, 1e-12);
    }
}

TEST(Frame, PanelIsBandLimited) {
    const auto fs = small_frame(0.5, 1, 8, Grid{1, 16.0, 1024});
    for (const auto& f : band_limited_panel(fs, 4, 9)) {
        EXPECT_GT(f.l2(), 0.0);
        const auto spec = to_spectrum(f);
        double peak = 0.0, outside = 0.0;
        for (int s = 0; s < 1024; ++s) {
            const double v = std::abs(spec[std::size_t(s)]);
            peak = std::max(peak, v);
            if (std::abs(signed_index(s, 1024) * fs.grid().dxi()) >= fs.band_radius()) outside = std::max(outside, v);
        }
        EXPECT_LT(outside, 1e-14 * peak);
    }
}

TEST(Frame, NyquistViolationDetected) {
    EXPECT_THROW(small_frame(0.5, 1, 16, Grid{1, 32.0, 1024}), NyquistViolation);
    EXPECT_THROW(FrameSystem(AlphaGeometry::make(0.5, 1, 1.0), 2, Grid{2, 8.0, 64}), PreconditionFailed);
}

TEST(Frame, CoeffFieldArithmetic) {
    const auto L = TFLayout::periodic(AlphaGeometry::make(0.0, 1, 1.0), 2, 4.0);
    CoeffField a(L), b(L);
    a.at({1}, {2}) = cd(3.0, 4.0);
    b.at({1}, {2}) = 1.0;
    b.at({-2}, {0}) = 2.0;
    EXPECT_DOUBLE_EQ(a.l2(), 5.0);
    const auto s = a + b;
    EXPECT_EQ(s.at({1}, {2}), cd(4.0, 4.0));
    EXPECT_EQ((s - b).at({-2}, {0}), 0.0);
    a *= cd(0.0, 1.0);
    EXPECT_EQ(a.at({1}, {2}), cd(-4.0, 3.0));
    const auto L2 = TFLayout::periodic(AlphaGeometry::make(0.0, 1, 1.0), 3, 4.0);
    CoeffField c(L2);
    EXPECT_THROW(c += a, DimensionMismatch);
}

// atoms are molecules: the fitted envelope constants do not depend on the truncation
TEST(Frame, MoleculeEnvelopeStableUnderTruncation) {
    const auto g = AlphaGeometry::make(0.5, 1, 1.0);
    double CM[2], KN[2];
    int i = 0;
    for (int kmax : {4, 8}) {
        const FrameSystem fs(g, kmax, Grid{1, 8.0, 1024});
        std::vector<std::size_t> idx;
        for (int k = -2; k <= 2; ++k) idx.push_back(fs.layout()->flat({k}, {1}));
        const auto cert = envelope_fit(molecule_atoms(fs, idx), g.a, 2.0, 2.0);
        EXPECT_EQ(cert.atoms, idx.size());
        CM[i] = cert.C_M;
        KN[i++] = cert.K_N;
    }
    EXPECT_GT(CM[0], 0.0);
    EXPECT_NEAR(CM[1], CM[0], 1e-9 * CM[0]);
    EXPECT_NEAR(KN[1], KN[0], 1e-9 * KN[0]);
}
