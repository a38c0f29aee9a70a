#include "amspec/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "amspec/fft.hpp"

namespace amspec {

Symbol symbol_one() {
    return {[](const RVec&) { return cd(1.0); }, 0.0, "one"};
}

Symbol symbol_bracket_power(double b) {
    return {[b](const RVec& xi) { return cd(std::pow(bracket(xi), b)); }, b, "bracket-power"};
}

Symbol symbol_sin_square() {
    return {[](const RVec& xi) { return cd(std::sin(xi[0] * xi[0])); }, 0.0, "sin-square"};
}

Symbol symbol_product(const Symbol& a, const Symbol& b) {
    return {[a, b](const RVec& xi) { return a(xi) * b(xi); }, a.order + b.order, a.name + "*" + b.name};
}

Symbol symbol_from_csv(const std::string& path, double order) {
    std::ifstream in(path);
    if (!in) throw PreconditionFailed("cannot open symbol file " + path);
    std::vector<std::pair<double, cd>> tab;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, re, im = 0.0;
        if (!(ss >> x >> re)) {
            if (tab.empty() && lineno == 1) continue;  // header
            throw PreconditionFailed("symbol file " + path + ": bad line " + std::to_string(lineno));
        }
        ss >> im;
        tab.emplace_back(x, cd(re, im));
    }
    require(tab.size() >= 2, "symbol file needs at least two samples");
    std::stable_sort(tab.begin(), tab.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    auto eval = [tab](const RVec& xi) {
        if (xi.size() != 1) throw DimensionMismatch("tabulated symbols are one-dimensional");
        const double x = xi[0];
        if (x <= tab.front().first) return tab.front().second;
        if (x >= tab.back().first) return tab.back().second;
        auto it = std::upper_bound(tab.begin(), tab.end(), x, [](double v, const auto& e) { return v < e.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double w = (x - lo.first) / (hi.first - lo.first);
        return lo.second * (1.0 - w) + hi.second * w;
    };
    return {eval, order, "file"};
}

// ---------------------------------------------------------------- symbol class

namespace {

std::vector<IVec> multi_indices(int n, int max_order) {
    std::vector<IVec> out;
    IVec e(n, 0);
    while (true) {
        int s = 0;
        for (int v : e) s += v;
        if (s <= max_order) out.push_back(e);
        int ax = n - 1;
        while (ax >= 0 && ++e[ax] > max_order) {
            e[ax] = 0;
            --ax;
        }
        if (ax < 0) break;
    }
    return out;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// tensor central difference of order eta with step h
cd central_difference(const Symbol& m, const RVec& xi, const IVec& eta, double h) {
    const int n = int(xi.size());
    IVec j(n, 0);
    cd sum = 0.0;
    RVec p(n);
    while (true) {
        double c = 1.0;
        for (int i = 0; i < n; ++i) {
            c *= ((j[i] % 2) ? -1.0 : 1.0) * binom(eta[i], j[i]);
            p[i] = xi[i] + (0.5 * eta[i] - j[i]) * h;
        }
        sum += c * m(p);
        int ax = n - 1;
        while (ax >= 0 && ++j[ax] > eta[ax]) {
            j[ax] = 0;
            --ax;
        }
        if (ax < 0) break;
    }
    int order = 0;
    for (int v : eta) order += v;
    return sum / std::pow(h, order);
}

// Probe points: nested uniform grids of extents extent, extent/2, ... down to `finest`, so doubling the extent only
// adds points and the region near the origin keeps its resolution.
double seminorm(const Symbol& m, int n, double alpha, double b, const IVec& eta, double extent, double finest,
                double step_div) {
    const int side = n == 1 ? 2001 : 81;
    int order = 0;
    for (int v : eta) order += v;
    std::size_t per = 1;
    for (int i = 0; i < n; ++i) per *= std::size_t(side);
    RVec ext;
    for (double e = extent; e >= finest * (1.0 - 1e-12); e /= 2.0) ext.push_back(e);
    RVec part(per * ext.size(), 0.0);
    parallel_for(part.size(), [&](std::size_t idx) {
        const double e = ext[idx / per];
        RVec xi(n);
        std::size_t r = idx % per;
        for (int i = n - 1; i >= 0; --i) {
            xi[i] = -e + 2.0 * e * double(r % std::size_t(side)) / (side - 1);
            r /= std::size_t(side);
        }
        const double br = bracket(xi);
        const double h = std::pow(br, alpha) / step_div;
        part[idx] = std::pow(br, alpha * order - b) * std::abs(central_difference(m, xi, eta, h));
    });
    return *std::max_element(part.begin(), part.end());
}

}  // namespace

std::string SymbolReport::to_json() const {
    nlohmann::json j;
    j["alpha"] = alpha;
    j["b"] = b;
    j["extent"] = extent;
    j["in_class"] = in_class;
    for (const auto& e : table)
        j["seminorms"].push_back({{"eta", e.eta}, {"value", e.value}, {"halved", e.halved}, {"extended", e.extended}});
    return j.dump();
}

SymbolReport symbol_class_check(const Symbol& m, int dim, double alpha, double b, int max_order, double extent) {
    require(dim >= 1 && dim <= 2, "symbol checks support n = 1, 2");
    require(max_order >= 0 && max_order <= 4, "max_order must lie in [0,4]");
    require(extent > 0.0, "extent must be positive");
    SymbolReport rep;
    rep.alpha = alpha;
    rep.b = b;
    rep.extent = extent;
    for (const auto& eta : multi_indices(dim, max_order)) {
        SeminormEntry e;
        e.eta = eta;
        const double finest = extent / 16.0;
        e.value = seminorm(m, dim, alpha, b, eta, extent, finest, 32.0);
        e.halved = seminorm(m, dim, alpha, b, eta, extent, finest, 64.0);
        e.extended = seminorm(m, dim, alpha, b, eta, 2.0 * extent, finest, 32.0);
        rep.table.push_back(e);
    }
    const double zero = 1e-9 * rep.table.front().value;
    auto close = [zero](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return false;
        if (x <= zero && y <= zero) return true;
        return std::abs(x - y) <= 0.1 * std::max(x, y);
    };
    rep.in_class = true;
    for (const auto& e : rep.table)
        rep.in_class = rep.in_class && close(e.value, e.halved) && close(e.value, e.extended);
    return rep;
}

// ---------------------------------------------------------------- matrices

OpMatrix multiplier_matrix(const FrameSystem& fs, const Symbol& m) {
    const TFLayout& L = *fs.layout();
    const Grid& g = fs.grid();
    const int n = g.dim;
    const double dxi = g.dxi();
    const std::size_t S = L.size();
    std::vector<std::vector<OpMatrix::Triplet>> percol(S);
    parallel_for(S, [&](std::size_t col) {
        SpectralBlock u = fs.atom_freq(col);
        std::vector<int> t(n);
        RVec xi(n);
        for (std::size_t loc = 0; loc < u.values.size(); ++loc) {
            if (u.values[loc] == 0.0) continue;
            std::size_t r = loc;
            for (int i = n - 1; i >= 0; --i) {
                t[i] = int(r % std::size_t(u.P));
                r /= std::size_t(u.P);
            }
            for (int i = 0; i < n; ++i) xi[i] = (u.origin[i] + t[i]) * dxi;
            u.values[loc] *= m(xi);
        }
        for (std::size_t j : fs.neighbours(L.block_of_flat(col))) {
            const std::vector<cd> v = fs.analyze_block(j, u);
            const std::size_t off = L.block(j).offset;
            for (std::size_t q = 0; q < v.size(); ++q)
                if (v[q] != 0.0) percol[col].push_back({off + q, col, v[q]});
        }
    });
    std::vector<OpMatrix::Triplet> all;
    for (auto& c : percol) {
        all.insert(all.end(), c.begin(), c.end());
        c.clear();
        c.shrink_to_fit();
    }
    return OpMatrix::from_triplets(fs.layout(), fs.layout(), std::move(all));
}

OpMatrix rescale_columns(const OpMatrix& A, double b) {
    OpMatrix out = A;
    const TFLayout& Lc = *A.col_layout();
    RVec w(Lc.num_blocks());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::pow(bracket(Lc.block(k).xi), -b);
    const auto& ci = out.col_index();
    auto& v = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[Lc.block_of_flat(ci[i])];
    return out;
}

AdMembership multiplier_is_ad(const FrameSystem& fs, const Symbol& m, const AdParams& par) {
    return is_almost_diagonal(rescale_columns(multiplier_matrix(fs, m), m.order), par);
}

RowDecay row_decay(const OpMatrix& A, double b, double N) {
    const TFLayout& Lr = *A.row_layout();
    const TFLayout& Lc = *A.col_layout();
    std::map<std::pair<std::size_t, std::size_t>, double> C;
    const auto& p = A.row_ptr();
    const auto& ci = A.col_index();
    const auto& v = A.values();
    for (std::size_t r = 0; r < A.num_rows(); ++r) {
        const std::size_t jb = Lr.block_of_flat(r);
        const RVec xr = Lr.center(r);
        for (std::size_t i = p[r]; i < p[r + 1]; ++i) {
            const std::size_t kb = Lc.block_of_flat(ci[i]);
            const KBlock& K = Lc.block(kb);
            const double d = Lr.distance(Lc.center(ci[i]), xr) / std::max(K.step, Lr.block(jb).step);
            double& c = C[{kb, jb}];
            c = std::max(c, std::pow(bracket(K.xi), -b) * std::abs(v[i]) * std::pow(1.0 + d, N));
        }
    }
    RowDecay out;
    out.N = N;
    out.C_min = out.C_diag_min = INFINITY;
    for (const auto& [key, c] : C) {
        out.C_min = std::min(out.C_min, c);
        out.C_max = std::max(out.C_max, c);
        if (key.first == key.second) {
            out.C_diag_min = std::min(out.C_diag_min, c);
            out.C_diag_max = std::max(out.C_diag_max, c);
        }
    }
    return out;
}

// ---------------------------------------------------------------- application

namespace {

// spectral energy beyond |xi|_inf > radius, relative to the total
double energy_beyond(const Grid& g, const std::vector<cd>& spec, double radius) {
    const int n = g.dim;
    double out = 0.0, tot = 0.0;
    for (std::size_t s = 0; s < spec.size(); ++s) {
        std::size_t r = s;
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            m = std::max(m, std::abs(signed_index(int(r % std::size_t(g.N)), g.N) * g.dxi()));
            r /= std::size_t(g.N);
        }
        const double e = std::norm(spec[s]);
        tot += e;
        if (m > radius) out += e;
    }
    return tot > 0.0 ? out / tot : 0.0;
}

}  // namespace

SampledSignal apply_multiplier(const Symbol& m, const SampledSignal& f, Route route, const FrameSystem* fs,
                               const OpMatrix* M) {
    const Grid& g = f.grid;
    std::vector<cd> spec = to_spectrum(f);
    if (route == Route::Direct) {
        if (energy_beyond(g, spec, 0.9 * g.nyquist()) > 1e-10)
            throw NyquistViolation("signal has spectral mass near Nyquist; the pointwise multiplier would alias");
        const int n = g.dim;
        RVec xi(n);
        for (std::size_t s = 0; s < spec.size(); ++s) {
            if (spec[s] == 0.0) continue;
            std::size_t r = s;
            for (int i = n - 1; i >= 0; --i) {
                xi[i] = signed_index(int(r % std::size_t(g.N)), g.N) * g.dxi();
                r /= std::size_t(g.N);
            }
            spec[s] *= m(xi);
        }
        return from_spectrum(g, std::move(spec));
    }
    require(fs != nullptr, "the matrix route needs a frame");
    if (f.grid != fs->grid()) throw DimensionMismatch("signal grid does not match the frame grid");
    if (energy_beyond(g, spec, fs->band_radius()) > 1e-10)
        throw NyquistViolation("signal is not band-limited to the frame's tight band");
    const CoeffField c = fs->analyze_spectrum(spec);
    if (M) return fs->synthesize(apply(*M, c));
    return fs->synthesize(apply(multiplier_matrix(*fs, m), c));
}

NormBracket multiplier_bound_bracket(const Symbol& m, const BapuSystem& bapu, const std::vector<SampledSignal>& panel,
                                     const SpaceParams& sp, double shift) {
    require(!panel.empty(), "bound bracket needs a nonempty panel");
    SpaceParams up = sp;
    up.s = sp.s + shift;
    NormBracket out;
    out.ratio_min = INFINITY;
    for (const auto& f : panel) {
        const double d = mod_norm(f, up, bapu);
        require(d > 0.0, "panel signal with zero modulation norm");
        const double r = mod_norm(apply_multiplier(m, f, Route::Direct), sp, bapu) / d;
        out.ratios.push_back(r);
        out.ratio_min = std::min(out.ratio_min, r);
        out.ratio_max = std::max(out.ratio_max, r);
    }
    return out;
}

double smoothness_shift(double b, double alpha) {
    require(alpha > 0.0 || b == 0.0, "at alpha = 0 the band weights are flat and no shift absorbs b != 0");
    return alpha > 0.0 ? b / alpha : 0.0;
}

}  // namespace amspec
