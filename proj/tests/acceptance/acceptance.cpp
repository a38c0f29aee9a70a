// Acceptance run: one PASS/FAIL line per criterion, measured values appended. Exit status is the number of
// failing criteria, so ctest reports any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "amspec/admat.hpp"
#include "amspec/bapu.hpp"
#include "amspec/csupp.hpp"
#include "amspec/frame.hpp"
#include "amspec/lattice.hpp"
#include "amspec/mixednorm.hpp"
#include "amspec/multiplier.hpp"
#include "amspec/transform.hpp"

using namespace amspec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Detail {
public:
    template <class T>
    Detail& operator()(const char* key, T v) {
        if (!first_) os_ << ", ";
        first_ = false;
        os_ << key << '=' << v;
        return *this;
    }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
    bool first_ = true;
};

double rel_change(double a, double b) { return std::abs(b - a) / std::abs(a); }

// max |sum_k theta_k^2 - 1| over uniform probes of the interior box
double partition_error(const BapuSystem& sys, std::size_t probes, std::uint64_t seed) {
    double worst = 0.0;
    for (const RVec& x : interior_probes(sys, probes, seed)) {
        double s = 0.0;
        for (std::size_t b : sys.active(x)) {
            const double t = sys.theta(x, b);
            s += t * t;
        }
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

Outcome criterion1() {
    Detail d;
    bool ok = true;
    for (auto [n, kmax] : {std::pair{1, 16}, std::pair{2, 6}}) {
        const auto g = AlphaGeometry::make(0.5, n, select_c1(0.5, n, kmax, 0.05));
        const BapuSystem sys(g, Truncation{kmax, 16.0, 1});
        const double e = partition_error(sys, 100000, 17);
        ok = ok && e <= 1e-10;
        d(n == 1 ? "n1_err" : "n2_err", e);
    }
    return {ok, d.str()};
}

Outcome criterion2() {
    Detail d;
    bool ok = true;
    // alpha = 0 at the nominal n=1 scale; alpha = 1/2 needs T = 8 so xi_16 = 256 stays below Nyquist
    struct Case {
        double alpha;
        int kmax;
        Grid grid;
        const char* tag;
    };
    for (const Case& c : {Case{0.0, 16, Grid{1, 32.0, 1024}, "a0"}, Case{0.5, 16, Grid{1, 8.0, 2048}, "a05"}}) {
        const auto g = AlphaGeometry::make(c.alpha, 1, select_c1(c.alpha, 1, c.kmax, 0.05));
        const FrameSystem fs(g, c.kmax, c.grid);
        const auto rep = tight_frame_check(fs, band_limited_panel(fs, 20, 7));
        ok = ok && rep.parseval_err <= 1e-8 && rep.recon_err <= 1e-8;
        d((std::string(c.tag) + "_parseval").c_str(), rep.parseval_err)((std::string(c.tag) + "_recon").c_str(),
                                                                         rep.recon_err);
    }
    return {ok, d.str()};
}

Outcome criterion3() {
    Detail d;
    bool ok = true;
    struct Case {
        double alpha, s, p1, p2, q;
        Grid grid;
        const char* tag;
    };
    for (const Case& c : {Case{0.0, 0.0, 2.0, 2.0, 2.0, Grid{2, 16.0, 256}, "a0"},
                          Case{0.5, 1.0, 1.5, 2.5, 1.5, Grid{2, 8.0, 512}, "a05"}}) {
        const int k1 = 3;
        const auto g = AlphaGeometry::make(c.alpha, 2, select_c1(c.alpha, 2, 2 * k1, 0.05));
        const FrameSystem small(g, k1, c.grid), large(g, 2 * k1, c.grid);
        const auto panel = band_limited_panel(small, 8, 11);
        const SpaceParams sp(c.s, c.alpha, PVec({c.p1, c.p2}, c.q));
        const auto A = norm_equivalence_check(small, small.bapu(), panel, sp);
        const auto B = norm_equivalence_check(large, large.bapu(), panel, sp);
        const double spread = std::max(A.ratio_max / A.ratio_min, B.ratio_max / B.ratio_min);
        const double moved = std::max(rel_change(A.ratio_min, B.ratio_min), rel_change(A.ratio_max, B.ratio_max));
        ok = ok && spread <= 20.0 && moved < 0.2;
        const std::string t(c.tag);
        d((t + "_c").c_str(), A.ratio_min)((t + "_C").c_str(), A.ratio_max)((t + "_C/c").c_str(), spread)(
            (t + "_moved").c_str(), moved);
    }
    return {ok, d.str()};
}

std::vector<CoeffField> sparse_panel(const LayoutPtr& L, int kcap, int lcap, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<CoeffField> out;
    for (int t = 0; t < count; ++t) {
        CoeffField c(L);
        for (int k = -kcap; k <= kcap; ++k)
            for (int l = -lcap; l <= lcap; ++l) c.at({k}, {l}) = cd(U(rng), U(rng));
        out.push_back(std::move(c));
    }
    return out;
}

Outcome criterion4() {
    Detail d;
    const double alpha = 0.5;
    const AdParams par = AdParams::make(0.0, alpha, PVec({1.5}, 1.5), 1.0);
    const auto g = AlphaGeometry::make(alpha, 1, select_c1(alpha, 1, 16, 0.05));

    const auto Lid = TFLayout::nominal(g, Truncation{8, 16.0, 1});
    const double Cid = is_almost_diagonal(OpMatrix::identity(Lid), par).C;

    const auto L4 = TFLayout::nominal(g, Truncation{4, 16.0, 1});
    const auto L8 = TFLayout::nominal(g, Truncation{8, 16.0, 1});
    const auto probes = stratified_pairs(*L4, 2, 4.0, 20, 7);
    const auto cl = stability(composition_closure_check(par, *L4, probes),
                              composition_closure_check(par, *L8, probes), 0.25);

    const SpaceParams sp(0.0, alpha, PVec({1.5}, 1.5));
    double act[2];
    int i = 0;
    for (auto [kmax, N] : {std::pair{8, 1024}, std::pair{16, 2048}}) {
        const Grid grid{1, 8.0, N};
        const FrameSystem fs(g, kmax, grid);
        const auto G = gram(fs).G;
        act[i++] = bounded_action_check(G, sp, sparse_panel(fs.layout(), 4, 3, 5, 5), grid);
    }
    const auto ba = stability(act[0], act[1], 0.25);
    d("identity_C", Cid)("closure_4", cl.fitted_small)("closure_8", cl.fitted_large)("closure_change", cl.rel_change)(
        "action_8", ba.fitted_small)("action_16", ba.fitted_large)("action_change", ba.rel_change);
    return {Cid == 1.0 && cl.stable && ba.stable, d.str()};
}

Outcome criterion5() {
    Detail d;
    const double alpha = 0.5;
    const auto g = AlphaGeometry::make(alpha, 1, select_c1(alpha, 1, 16, 0.05));
    const double T = 8.0;
    // (kmax, N): base, grid refined, truncation doubled
    GramDecay dec[3];
    int i = 0;
    for (auto [kmax, N] : {std::pair{8, 1024}, std::pair{8, 2048}, std::pair{16, 2048}}) {
        const FrameSystem fs(g, kmax, Grid{1, T, N});
        dec[i++] = gram_decay_check(gram(fs).G, 2.0, 2.0, 1.0);
    }
    const double ref = rel_change(dec[0].C, dec[1].C), trn = rel_change(dec[1].C, dec[2].C);
    const double refA = rel_change(dec[0].C_A1, dec[1].C_A1), trnA = rel_change(dec[1].C_A1, dec[2].C_A1);
    d("C", dec[0].C)("C_refined_change", ref)("C_doubled_change", trn)("A1", dec[0].C_A1)("A1_refined_change", refA)(
        "A1_doubled_change", trnA);
    return {std::max({ref, trn, refA, trnA}) < 0.3, d.str()};
}

Outcome criterion6() {
    const AdParams par = AdParams::make(0.0, 0.5, PVec({1.5}, 1.5), 1.0);
    const auto a = summability_check(par, 16), b = summability_check(par, 32);
    const double ca = rel_change(a.Ca, b.Ca), cb = rel_change(a.Cb, b.Cb);
    Detail d;
    d("Ca_16", a.Ca)("Ca_32", b.Ca)("Cb_16", a.Cb)("Cb_32", b.Cb)("max_change", std::max(ca, cb));
    return {ca < 0.05 && cb < 0.05, d.str()};
}

// m = 1 stored pattern and values coincide with the Gram matrix bit for bit
bool same_matrix(const OpMatrix& A, const OpMatrix& B) {
    return A.row_ptr() == B.row_ptr() && A.col_index() == B.col_index() && A.values() == B.values();
}

// entries between blocks whose theta windows do not meet are not stored, and those windows are disjoint on the grid
bool disjoint_entries_zero(const FrameSystem& fs, const OpMatrix& M) {
    const TFLayout& L = *fs.layout();
    for (std::size_t r = 0; r < M.num_rows(); ++r) {
        const std::size_t br = L.block_of_flat(r);
        const auto& nb = fs.neighbours(br);
        for (std::size_t i = M.row_ptr()[r]; i < M.row_ptr()[r + 1]; ++i) {
            const std::size_t bc = L.block_of_flat(M.col_index()[i]);
            if (std::find(nb.begin(), nb.end(), bc) == nb.end()) return false;
        }
    }
    for (std::size_t b = 0; b < L.num_blocks(); ++b)
        for (std::size_t c = 0; c < L.num_blocks(); ++c) {
            const auto& nb = fs.neighbours(b);
            if (std::find(nb.begin(), nb.end(), c) != nb.end()) continue;
            const auto& W1 = fs.theta_block(b);
            const auto& W2 = fs.theta_block(c);
            const int lo = std::max(W1.origin[0], W2.origin[0]);
            const int hi = std::min(W1.origin[0] + W1.P, W2.origin[0] + W2.P);
            for (int t = lo; t < hi; ++t)
                if (W1.values[std::size_t(t - W1.origin[0])] != 0.0 && W2.values[std::size_t(t - W2.origin[0])] != 0.0)
                    return false;
        }
    return true;
}

Outcome criterion7() {
    Detail d;
    const double alpha = 0.5;
    const AdParams par = AdParams::make(0.0, alpha, PVec({1.5}, 1.5), 1.0);
    const auto g = AlphaGeometry::make(alpha, 1, select_c1(alpha, 1, 16, 0.05));
    const Symbol mb = symbol_bracket_power(1.0);
    bool eq = true, zero = true;
    double Cad[2], route = 0.0;
    int i = 0;
    for (auto [kmax, N] : {std::pair{8, 1024}, std::pair{16, 2048}}) {
        const FrameSystem fs(g, kmax, Grid{1, 8.0, N});
        const auto M1 = multiplier_matrix(fs, symbol_one());
        eq = eq && same_matrix(M1, gram(fs).G);
        zero = zero && disjoint_entries_zero(fs, M1);
        const auto Mb = multiplier_matrix(fs, mb);
        Cad[i++] = is_almost_diagonal(rescale_columns(Mb, 1.0), par).C;
        for (const auto& f : band_limited_panel(fs, 5, 3)) {
            const auto a = apply_multiplier(mb, f, Route::Direct);
            const auto b = apply_multiplier(mb, f, Route::Matrix, &fs, &Mb);
            route = std::max(route, (a - b).l2() / a.l2());
        }
    }
    const auto st = stability(Cad[0], Cad[1], 0.25);
    d("one_equals_gram", eq)("disjoint_zero", zero)("C_8", st.fitted_small)("C_16", st.fitted_large)(
        "C_change", st.rel_change)("route_rel", route);
    return {eq && zero && st.stable && route <= 1e-6, d.str()};
}

Outcome criterion8() {
    Detail d;
    // desk scale for the envelope fits: T = 256 lets mu_k decay inside the period
    const double alpha = 0.5;
    const auto g = AlphaGeometry::make(alpha, 1, select_c1(alpha, 1, 2, 0.05));
    const FrameSystem fs(g, 2, Grid{1, 256.0, 2048});
    const GeneratorG gen = bspline_generator(4, 1);
    const int m = 16;
    const double hy = 1.0 / (2.0 * m);

    const FitWeights cor = corollary_exponents(AdParams::make(0.0, alpha, PVec({1.5}, 1.5), 1.0));
    const auto target = build_perturbed_family(fs, gen, 0, m, cor, hy);
    double es = 0.0, ef = 0.0;
    for (const auto& f : target.fits) {
        es = std::max(es, f.eps_space);
        ef = std::max(ef, f.eps_freq);
    }
    const bool fit_ok = target.eps <= 0.05;

    const auto flat = build_perturbed_family(fs, gen, 0, m, FitWeights{}, hy);
    double ratio = 0.0, resynth = 0.0;
    int iters = 0;
    bool conv = true;
    for (const auto& f : band_limited_panel(fs, 3, 5)) {
        try {
            const auto ex = frame_expansion(*flat.family, f, 1e-7, 50);
            ratio = std::max(ratio, ex.max_ratio);
            resynth = std::max(resynth, ex.resynth_err);
            iters = std::max(iters, ex.iterations);
        } catch (const NoConvergence&) {
            conv = false;
        }
    }
    d("N_env", cor.N_env)("M_env", cor.M_env)("eps_target", target.eps)("eps_space", es)("eps_freq", ef)(
        "decay_exponent", gen.fitted_decay_exponent())("flat_eps", flat.eps)("neumann_ratio", ratio)(
        "resynth_err", resynth)("iterations", iters);
    const bool neumann_ok = conv && ratio < 1.0 && resynth <= 1e-6 && iters <= 50;
    std::string note = d.str();
    if (!fit_ok)
        note += "; eps target unattainable: the order-4 spline transform decays like |xi|^-4, below the (1+|xi|)^-" +
                std::to_string(int(cor.M_env) + 1) + " the frequency weight needs";
    return {fit_ok && neumann_ok, note};
}

Outcome criterion9() {
    Detail d;
    bool ok = true;
    for (auto [n, N] : {std::pair{1, 64}, std::pair{2, 8}}) {
        const Grid grid{n, 4.0, N};
        const auto f = random_packet_signal(grid, 3, 3, 2.0, 0.6, 2.0);
        const auto rb = rectangle_bound_check(f, std::size_t(1) << 24, 1);
        ok = ok && rb.ok;
        d(n == 1 ? "rect_n1" : "rect_n2", rb.rectangles)(n == 1 ? "excess_n1" : "excess_n2", rb.max_excess);
    }

    const PVec p({1.5, 2.5}, 2.0);
    const auto mi = stability(maximal_inequality_check(p, 1.0, 6, Grid{2, 16.0, 128}, 9),
                              maximal_inequality_check(p, 1.0, 6, Grid{2, 16.0, 256}, 9), 0.10);
    ok = ok && mi.stable;
    d("maximal_N128", mi.fitted_small)("maximal_N256", mi.fitted_large)("maximal_change", mi.rel_change);

    const Grid pg{2, 8.0, 64};
    const double R = 2.0;
    double lo = INFINITY, hi = 0.0;
    for (const RVec& c : {RVec{0.0, 0.0}, RVec{3.0, -2.0}, RVec{-5.5, 4.5}}) {
        const double v = peetre_check(peetre_probe_signal(pg, c, R), 1.0, R);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ok = ok && hi / lo - 1.0 < 0.10;
    d("peetre_min", lo)("peetre_max", hi);
    return {ok, d.str()};
}

Outcome criterion10() {
    Detail d;
    bool gap = false;
    try {
        certify_covering(AlphaGeometry::make(0.5, 1, 0.3), Truncation{16, 32.0, 1}, 0.05);
    } catch (const CoverageGap&) {
        gap = true;
    }

    const Symbol sq = symbol_sin_square();
    const bool sq_flag = !symbol_class_check(sq, 1, 0.0, 0.0, 4, 8.0).in_class;
    const AdParams p0 = AdParams::make(0.0, 0.0, PVec({1.5}, 1.5), 1.0);
    const auto g0 = AlphaGeometry::make(0.0, 1, 1.0);
    double Csq[2], Cone[2];
    int i = 0;
    for (auto [kmax, N] : {std::pair{8, 512}, std::pair{16, 1024}}) {
        const FrameSystem fs(g0, kmax, Grid{1, 32.0, N});
        Csq[i] = multiplier_is_ad(fs, sq, p0).C;
        Cone[i++] = multiplier_is_ad(fs, symbol_one(), p0).C;
    }
    const double growth = Csq[1] / Csq[0];
    const bool grows = growth > 1.25 && rel_change(Cone[0], Cone[1]) < 0.25;

    bool stalled = false;
    {
        const auto g = AlphaGeometry::make(0.5, 1, 1.0);
        const FrameSystem fs(g, 2, Grid{1, 32.0, 512});
        const auto z = zero_family(fs);
        try {
            frame_expansion(*z.family, band_limited_panel(fs, 1, 5)[0], 1e-7, 50);
        } catch (const NoConvergence&) {
            stalled = true;
        }
    }
    d("coverage_gap", gap)("sin_square_out_of_class", sq_flag)("sin_square_C_8", Csq[0])("sin_square_C_16", Csq[1])(
        "one_C_8", Cone[0])("one_C_16", Cone[1])("tau0_no_convergence", stalled);
    return {gap && sq_flag && grows && stalled, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> all = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
    // optional argument: run a single criterion
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failed = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (only > 0 && int(i) + 1 != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = all[i]();
        } catch (const Error& e) {
            o = {false, std::string("unexpected ") + e.kind() + ": " + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("%s criterion %zu (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, sec, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed;
}
