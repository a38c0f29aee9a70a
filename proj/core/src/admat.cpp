#include "amspec/admat.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

namespace amspec {

// ---------------------------------------------------------------- parameters

ModerateFit fit_moderate(double alpha, double beta, double rho0, double rho1, double extent) {
    require(extent > 0.0 && rho0 > 0.0 && rho1 > 0.0, "moderate fit needs positive extent and radii");
    // h is radial and nondecreasing in |xi|, so the extremes over a ball around xi sit at |xi| +- radius.
    auto h = [alpha](double t) { return std::pow(1.0 + t * t, alpha / 2.0); };
    const double g = 1.0 + beta;
    auto hg = [&](double t) { return std::pow(h(t), g); };
    RVec probes;
    for (int i = 0; i <= 2000; ++i) probes.push_back(extent * i / 2000.0);
    for (int i = -40; i <= 0; ++i) probes.push_back(extent * std::pow(10.0, i / 10.0));
    ModerateFit f;
    f.R0 = 1.0;
    f.R1 = 0.0;
    for (double t : probes) {
        const double rad = rho0 * hg(t);
        f.R0 = std::max({f.R0, hg(t + rad) / hg(t), hg(t) / hg(std::max(0.0, t - rad))});
        for (int i = 0; i <= 64; ++i) {
            const double a = rho1 * std::pow(64.0 / rho1, i / 64.0);
            f.R1 = std::max(f.R1, h(t + a * h(t)) / (a * h(t)));
        }
    }
    return f;
}

AdParams AdParams::make(double s, double alpha, PVec p, double delta, double beta) {
    AdParams par;
    par.s = s;
    par.alpha = alpha;
    par.p = std::move(p);
    par.delta = delta;
    if (beta < 0.0) beta = alpha > 0.0 ? std::min(1.0, (1.0 - alpha) / alpha) : 1.0;
    par.beta = beta;
    // alpha (1+beta) = 1 makes h^{1+beta} comparable to <xi>, and the ball |zeta - xi| <= <xi> reaches 0;
    // the ratio stays bounded only for rho0 < 1.
    par.rho0 = alpha * (1.0 + beta) >= 1.0 - 1e-12 ? 0.5 : 1.0;
    par.rho1 = 1.0;
    par.validate();
    const ModerateFit f = fit_moderate(alpha, beta, par.rho0, par.rho1, 1e6);
    par.R0 = f.R0;
    par.R1 = f.R1;
    return par;
}

void AdParams::validate() const {
    require(std::isfinite(s), "s must be finite");
    require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
    require(delta > 0.0, "delta must be positive");
    require(beta > 0.0, "beta must be positive");
    require(alpha * (1.0 + beta) <= 1.0 + 1e-12, "alpha (1 + beta) must not exceed 1");
    require(!p.p.empty(), "exponent vector must be nonempty");
}

// ---------------------------------------------------------------- OpMatrix

OpMatrix::OpMatrix(LayoutPtr rows, LayoutPtr cols) : rows_(std::move(rows)), cols_(std::move(cols)) {
    ptr_.assign(rows_->size() + 1, 0);
}

OpMatrix OpMatrix::from_triplets(LayoutPtr rows, LayoutPtr cols, std::vector<Triplet> t) {
    OpMatrix A(std::move(rows), std::move(cols));
    const std::size_t R = A.num_rows(), C = A.num_cols();
    for (const auto& e : t) {
        if (e.row >= R || e.col >= C) throw IndexOutOfTruncation("matrix entry outside the layouts");
        if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag()))
            throw PreconditionFailed("non-finite matrix entry");
    }
    std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (std::size_t i = 0; i < t.size();) {
        std::size_t j = i;
        cd v = 0.0;
        while (j < t.size() && t[j].row == t[i].row && t[j].col == t[i].col) v += t[j++].value;
        A.col_.push_back(t[i].col);
        A.val_.push_back(v);
        ++A.ptr_[t[i].row + 1];
        i = j;
    }
    for (std::size_t r = 0; r < R; ++r) A.ptr_[r + 1] += A.ptr_[r];
    return A;
}

OpMatrix OpMatrix::identity(LayoutPtr L) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < L->size(); ++i) t.push_back({i, i, 1.0});
    return from_triplets(L, L, std::move(t));
}

cd OpMatrix::get(std::size_t r, std::size_t c) const {
    auto b = col_.begin() + long(ptr_[r]), e = col_.begin() + long(ptr_[r + 1]);
    auto it = std::lower_bound(b, e, c);
    return it != e && *it == c ? val_[std::size_t(it - col_.begin())] : cd(0.0);
}

OpMatrix& OpMatrix::operator*=(cd s) {
    for (cd& v : val_) v *= s;
    return *this;
}

OpMatrix compose(const OpMatrix& A, const OpMatrix& B) {
    if (!A.col_layout()->same_as(*B.row_layout())) throw DimensionMismatch("inner layouts of the product differ");
    const std::size_t R = A.num_rows();
    std::vector<std::vector<OpMatrix::Triplet>> rows(R);
    const auto& ap = A.row_ptr();
    const auto& ac = A.col_index();
    const auto& av = A.values();
    const auto& bp = B.row_ptr();
    const auto& bc = B.col_index();
    const auto& bv = B.values();
    parallel_for(R, [&](std::size_t r) {
        // accumulation order within a row follows the CSR order of A and B, so results are schedule independent
        std::vector<std::pair<std::size_t, cd>> acc;
        for (std::size_t i = ap[r]; i < ap[r + 1]; ++i)
            for (std::size_t j = bp[ac[i]]; j < bp[ac[i] + 1]; ++j) acc.emplace_back(bc[j], av[i] * bv[j]);
        std::stable_sort(acc.begin(), acc.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (std::size_t i = 0; i < acc.size();) {
            cd v = 0.0;
            std::size_t j = i;
            while (j < acc.size() && acc[j].first == acc[i].first) v += acc[j++].second;
            rows[r].push_back({r, acc[i].first, v});
            i = j;
        }
    });
    std::vector<OpMatrix::Triplet> all;
    for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
    return OpMatrix::from_triplets(A.row_layout(), B.col_layout(), std::move(all));
}

CoeffField apply(const OpMatrix& A, const CoeffField& c) {
    if (!A.col_layout()->same_as(*c.layout)) throw DimensionMismatch("coefficient layout does not match the matrix");
    CoeffField out(A.row_layout());
    const auto& p = A.row_ptr();
    const auto& ci = A.col_index();
    const auto& v = A.values();
    parallel_for(A.num_rows(), [&](std::size_t r) {
        cd s = 0.0;
        for (std::size_t i = p[r]; i < p[r + 1]; ++i) s += v[i] * c.values[ci[i]];
        out.values[r] = s;
    });
    return out;
}

// ---------------------------------------------------------------- weights

namespace {

struct AtomGeo {
    double r;
    const RVec* xi;
    RVec x;
};

AtomGeo geo(const TFLayout& L, std::size_t idx) {
    const KBlock& B = L.block(L.block_of_flat(idx));
    return {B.r, &B.xi, L.center(idx)};
}

double euclid(const RVec& a, const RVec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double xdist(const TFLayout& Lr, const TFLayout& Lc, const RVec& x, const RVec& y) {
    if (Lr.is_periodic() && Lc.is_periodic() && Lr.T() == Lc.T()) return Lr.distance(x, y);
    return euclid(x, y);
}

// row atom j, column atom k
double weight_geo(const AtomGeo& j, const AtomGeo& k, double dx, double s, double n, double J, double delta) {
    const double up = k.r / j.r;  // r_k / r_j
    const double f1 = std::pow(up, s + n / 2.0);
    const double f2 = std::min(std::pow(1.0 / up, J + delta / 2.0), std::pow(up, delta / 2.0));
    const double cjk = std::min(std::pow(1.0 / up, J + delta), std::pow(up, delta)) *
                       std::pow(1.0 + euclid(*k.xi, *j.xi) / std::max(k.r, j.r), -J - delta);
    const double f3 = std::pow(1.0 + std::min(k.r, j.r) * dx, -J - delta);
    return f1 * f2 * cjk * f3;
}

}  // namespace

double weight(const TFLayout& Lr, std::size_t jm, const TFLayout& Lc, std::size_t kn, const AdParams& par,
              double delta) {
    if (Lr.dim() != par.dim() || Lc.dim() != par.dim()) throw DimensionMismatch("weight dimension mismatch");
    const AtomGeo j = geo(Lr, jm), k = geo(Lc, kn);
    return weight_geo(j, k, xdist(Lr, Lc, k.x, j.x), par.s, par.dim(), par.J(), delta);
}

double weight(const TFLayout& Lr, std::size_t jm, const TFLayout& Lc, std::size_t kn, const AdParams& par) {
    return weight(Lr, jm, Lc, kn, par, par.delta);
}

AdMembership is_almost_diagonal(const OpMatrix& A, const AdParams& par) {
    const TFLayout& Lr = *A.row_layout();
    const TFLayout& Lc = *A.col_layout();
    const auto& p = A.row_ptr();
    const auto& ci = A.col_index();
    const auto& v = A.values();
    RVec rowmax(A.num_rows(), 0.0);
    parallel_for(A.num_rows(), [&](std::size_t r) {
        const AtomGeo j = geo(Lr, r);
        double m = 0.0;
        for (std::size_t i = p[r]; i < p[r + 1]; ++i) {
            if (v[i] == 0.0) continue;
            const AtomGeo k = geo(Lc, ci[i]);
            const double w = weight_geo(j, k, xdist(Lr, Lc, k.x, j.x), par.s, par.dim(), par.J(), par.delta);
            m = std::max(m, std::abs(v[i]) / w);
        }
        rowmax[r] = m;
    });
    AdMembership out;
    out.entries = A.nnz();
    for (double m : rowmax) out.C = std::max(out.C, m);
    return out;
}

std::string StabilityReport::to_json() const {
    nlohmann::json j;
    j["fitted_C"] = {fitted_small, fitted_large};
    j["rel_change"] = rel_change;
    j["stable"] = stable;
    return j.dump();
}

StabilityReport stability(double small, double large, double tolerance) {
    StabilityReport s;
    s.fitted_small = small;
    s.fitted_large = large;
    if (small == large) {
        s.rel_change = 0.0;
    } else {
        s.rel_change = small != 0.0 ? std::abs(large - small) / std::abs(small) : INFINITY;
    }
    s.stable = std::isfinite(small) && std::isfinite(large) && s.rel_change <= tolerance;
    return s;
}

// ---------------------------------------------------------------- closure and action

std::vector<ProbePair> stratified_pairs(const TFLayout& L, int kcap, double xcap, std::size_t per_shell,
                                        std::uint64_t seed) {
    require(kcap >= 0 && kcap <= L.kmax(), "probe cap must lie inside the truncation");
    const int n = L.dim();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> kd(-kcap, kcap);
    // admissible translation indices for a block under |x| <= xcap
    auto pick_ell = [&](const IVec& k) {
        const KBlock& B = L.block(std::size_t(L.block_of(k)));
        const int lim = std::min(int(std::floor(xcap / B.step)), std::min(-B.lo, B.lo + B.P - 1));
        std::uniform_int_distribution<int> ld(-lim, lim);
        IVec ell(n);
        for (int& v : ell) v = ld(rng);
        return ell;
    };
    std::vector<ProbePair> out;
    for (int shell = 0; shell <= 2 * kcap; ++shell) {
        std::size_t found = 0;
        for (std::size_t tries = 0; found < per_shell && tries < 10000 * per_shell; ++tries) {
            IVec j(n), k(n);
            int d = 0;
            for (int i = 0; i < n; ++i) {
                j[i] = kd(rng);
                k[i] = kd(rng);
                d = std::max(d, std::abs(k[i] - j[i]));
            }
            if (d != shell) continue;
            out.push_back({j, pick_ell(j), k, pick_ell(k)});
            ++found;
        }
    }
    return out;
}

double composition_closure_check(const AdParams& par, const TFLayout& L, const std::vector<ProbePair>& probes) {
    require(L.dim() == par.dim(), "closure check dimension mismatch");
    const std::size_t S = L.size();
    std::vector<AtomGeo> mid(S);
    for (std::size_t i = 0; i < S; ++i) mid[i] = geo(L, i);
    RVec ratio(probes.size(), 0.0);
    const double n = par.dim(), J = par.J(), d = par.delta;
    parallel_for(probes.size(), [&](std::size_t t) {
        const ProbePair& pp = probes[t];
        const AtomGeo j = geo(L, L.flat(pp.j, pp.m));
        const AtomGeo k = geo(L, L.flat(pp.k, pp.n));
        double sum = 0.0;
        for (const AtomGeo& i : mid)
            sum += weight_geo(j, i, L.distance(i.x, j.x), par.s, n, J, d) *
                   weight_geo(i, k, L.distance(k.x, i.x), par.s, n, J, d);
        ratio[t] = sum / weight_geo(j, k, L.distance(k.x, j.x), par.s, n, J, d / 2.0);
    });
    double m = 0.0;
    for (double r : ratio) m = std::max(m, r);
    return m;
}

double bounded_action_check(const OpMatrix& A, const SpaceParams& sp, const std::vector<CoeffField>& panel,
                            const Grid& grid) {
    double m = 0.0;
    for (const auto& c : panel) {
        const double d = seq_norm(c, sp, grid);
        require(d > 0.0, "bounded action panel contains a zero field");
        m = std::max(m, seq_norm(apply(A, c), sp, grid) / d);
    }
    return m;
}

// ---------------------------------------------------------------- Gram matrices

namespace {

GramResult finish_gram(LayoutPtr rows, LayoutPtr cols, std::vector<OpMatrix::Triplet> t, const GramOptions& opt) {
    GramResult out;
    if (opt.par) {
        std::vector<OpMatrix::Triplet> kept;
        kept.reserve(t.size());
        for (const auto& e : t) {
            const double w = weight(*rows, e.row, *cols, e.col, *opt.par);
            if (w < opt.weight_floor) {
                ++out.dropped;
                out.dropped_max_ratio = std::max(out.dropped_max_ratio, std::abs(e.value) / w);
            } else {
                kept.push_back(e);
            }
        }
        t.swap(kept);
    }
    out.G = OpMatrix::from_triplets(std::move(rows), std::move(cols), std::move(t));
    return out;
}

}  // namespace

GramResult gram(const AtomFamily& cols, const AtomFamily& rows, const GramOptions& opt) {
    if (cols.grid() != rows.grid()) throw DimensionMismatch("families live on different grids");
    std::vector<OpMatrix::Triplet> t;
    const std::size_t C = cols.layout()->size();
    for (std::size_t b = 0; b < C; ++b) {
        const CoeffField c = rows.analyze(cols.atom(b));
        for (std::size_t a = 0; a < c.values.size(); ++a)
            if (c.values[a] != 0.0) t.push_back({a, b, c.values[a]});
    }
    return finish_gram(rows.layout(), cols.layout(), std::move(t), opt);
}

GramResult gram(const FrameSystem& fs, const GramOptions& opt) {
    const TFLayout& L = *fs.layout();
    const std::size_t S = L.size();
    std::vector<std::vector<OpMatrix::Triplet>> percol(S);
    parallel_for(S, [&](std::size_t col) {
        const SpectralBlock u = fs.atom_freq(col);
        for (std::size_t j : fs.neighbours(L.block_of_flat(col))) {
            const std::vector<cd> v = fs.analyze_block(j, u);
            const std::size_t off = L.block(j).offset;
            for (std::size_t m = 0; m < v.size(); ++m)
                if (v[m] != 0.0) percol[col].push_back({off + m, col, v[m]});
        }
    });
    std::vector<OpMatrix::Triplet> t;
    for (auto& c : percol) {
        t.insert(t.end(), c.begin(), c.end());
        c.clear();
        c.shrink_to_fit();
    }
    return finish_gram(fs.layout(), fs.layout(), std::move(t), opt);
}

GramDecay gram_decay_check(const OpMatrix& G, double M, double N, double L, double rel_floor) {
    const TFLayout& Lr = *G.row_layout();
    const TFLayout& Lc = *G.col_layout();
    const double n = Lr.dim();
    const auto& p = G.row_ptr();
    const auto& ci = G.col_index();
    const auto& v = G.values();
    double amax = 0.0;
    for (const cd& a : v) amax = std::max(amax, std::abs(a));
    const double floor = rel_floor * amax;
    RVec c1(G.num_rows(), 0.0), c2(G.num_rows(), 0.0);
    std::vector<std::size_t> skipped(G.num_rows(), 0);
    parallel_for(G.num_rows(), [&](std::size_t r) {
        const AtomGeo j = geo(Lr, r);
        for (std::size_t i = p[r]; i < p[r + 1]; ++i) {
            const double a = std::abs(v[i]);
            if (a == 0.0) continue;
            if (a <= floor) {
                ++skipped[r];
                continue;
            }
            const AtomGeo k = geo(Lc, ci[i]);
            const double ratio = std::min(k.r / j.r, j.r / k.r);
            const double dx = xdist(Lr, Lc, k.x, j.x);
            const double space = 1.0 + std::min(k.r, j.r) * dx;
            const double bound = std::pow(ratio, n / 2.0 + L) *
                                 std::pow(1.0 + euclid(*k.xi, *j.xi) / std::max(k.r, j.r), -M) * std::pow(space, -N);
            c1[r] = std::max(c1[r], a / bound);
            c2[r] = std::max(c2[r], a / (std::pow(ratio, n / 2.0) * std::pow(space, -2.0 * N)));
        }
    });
    GramDecay out;
    for (std::size_t r = 0; r < c1.size(); ++r) {
        out.C = std::max(out.C, c1[r]);
        out.C_A1 = std::max(out.C_A1, c2[r]);
        out.below_floor += skipped[r];
    }
    return out;
}

// ---------------------------------------------------------------- appendix lemmas

Summability summability_check(const AdParams& par, int kmax) {
    require(par.delta > 0.0, "summability needs delta > 0");
    const int n = par.dim();
    const AlphaGeometry g{par.alpha, n, 1.0, 0.0};
    const std::vector<IVec> ks = freq_indices(n, kmax);
    RVec r(ks.size());
    std::vector<RVec> xi(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        r[i] = r_of(ks[i], g);
        xi[i] = xi_of(ks[i], g);
    }
    auto term = [&](std::size_t j, std::size_t k) {
        return std::min(std::pow(r[j] / r[k], n), std::pow(r[k] / r[j], par.delta)) *
               std::pow(1.0 + euclid(xi[j], xi[k]) / std::max(r[j], r[k]), -n - par.delta);
    };
    // the outer index stays in the inner half so each sum sees its full neighbourhood
    std::vector<std::size_t> inner;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        int m = 0;
        for (int v : ks[i]) m = std::max(m, std::abs(v));
        if (2 * m <= kmax) inner.push_back(i);
    }
    RVec a(inner.size()), b(inner.size());
    parallel_for(inner.size(), [&](std::size_t t) {
        const std::size_t k = inner[t];
        double sa = 0.0, sb = 0.0;
        for (std::size_t j = 0; j < ks.size(); ++j) {
            sa += term(j, k);
            sb += term(k, j);
        }
        a[t] = sa;
        b[t] = sb;
    });
    Summability s;
    for (std::size_t t = 0; t < inner.size(); ++t) {
        s.Ca = std::max(s.Ca, a[t]);
        s.Cb = std::max(s.Cb, b[t]);
    }
    return s;
}

double maxsum_check(const TFLayout& L, const Grid& grid, double r, double Nexp, int trials, std::uint64_t seed) {
    require(r > 0.0 && r <= 1.0, "maxsum exponent r must lie in (0,1]");
    const int n = L.dim();
    require(Nexp > n / r, "maxsum needs N > n/r");
    require(grid.dim == n, "grid dimension mismatch");
    grid.validate();
    const double h = grid.h();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> bd(0, L.num_blocks() - 1);
    std::uniform_real_distribution<double> val(0.1, 1.0);
    std::uniform_int_distribution<int> cnt(1, 5);

    // grid points (flat index) inside the closed ball; balls are clipped to the grid window
    auto raster = [&](const Ball& Q) {
        std::vector<std::size_t> pts;
        std::vector<long> lo(n), hi(n), id(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::max(0L, long(std::ceil((Q.center[i] - Q.radius + grid.T) / h)));
            hi[i] = std::min(long(grid.N) - 1, long(std::floor((Q.center[i] + Q.radius + grid.T) / h)));
            if (lo[i] > hi[i]) return pts;
            id[i] = lo[i];
        }
        while (true) {
            double d2 = 0.0;
            std::size_t pos = 0;
            for (int i = 0; i < n; ++i) {
                const double d = grid.x(int(id[i])) - Q.center[i];
                d2 += d * d;
                pos = pos * std::size_t(grid.N) + std::size_t(id[i]);
            }
            if (d2 <= Q.radius * Q.radius * (1.0 + 1e-12)) pts.push_back(pos);
            int ax = n - 1;
            while (ax >= 0 && ++id[ax] > hi[ax]) {
                id[ax] = lo[ax];
                --ax;
            }
            if (ax < 0) break;
        }
        return pts;
    };
    // translation indices whose ball lies well inside the grid window
    auto pick = [&](std::size_t b) {
        const KBlock& B = L.block(b);
        const int lim = std::min(int(std::floor(0.5 * grid.T / B.step)), std::min(-B.lo, B.lo + B.P - 1));
        std::uniform_int_distribution<int> ld(-lim, lim);
        IVec ell(n);
        for (int& v : ell) v = ld(rng);
        return L.flat(B.k, ell);
    };

    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::size_t kb = bd(rng), jb = bd(rng);
        const double rk = L.block(kb).r, rj = L.block(jb).r;
        std::vector<std::pair<std::size_t, double>> s;
        for (int c = cnt(rng); c > 0; --c) s.emplace_back(pick(kb), val(rng));
        const std::size_t jm = pick(jb);

        std::vector<double> g(grid.size(), 0.0);
        double lhs = 0.0;
        const RVec xj = L.center(jm);
        for (const auto& [idx, v] : s) {
            for (std::size_t pos : raster(L.qball(idx))) g[pos] += v;
            lhs += v * std::pow(1.0 + std::min(rk, rj) * euclid(L.center(idx), xj), -Nexp);
        }
        const std::vector<double> Mg = iterated_max_abs(grid, std::move(g), r);
        const double pre = std::pow(std::max(rk / rj, 1.0), n / r);
        const std::vector<std::size_t> probe = raster(L.qball(jm));
        require(!probe.empty(), "grid too coarse to sample Q(j,m)");
        for (std::size_t pos : probe) {
            const double rhs = pre * Mg[pos];
            if (lhs == 0.0) continue;
            worst = std::max(worst, rhs > 0.0 ? lhs / rhs : INFINITY);
        }
    }
    return worst;
}

}  // namespace amspec
