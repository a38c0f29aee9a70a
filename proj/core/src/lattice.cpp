#include "amspec/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace amspec {

AlphaGeometry AlphaGeometry::make(double alpha, int dim, double c1) {
    AlphaGeometry g;
    g.alpha = alpha;
    g.dim = dim;
    g.c1 = c1;
    g.a = std::max(2.0 * c1, kPi * std::sqrt(double(dim)) / 2.0) * (1.0 + 1.0 / 16.0);
    g.validate();
    return g;
}

void AlphaGeometry::validate() const {
    require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
    require(dim >= 1, "dimension must be positive");
    require(c1 > 0.0, "c1 must be positive");
    require(a >= std::max(2.0 * c1, kPi * std::sqrt(double(dim)) / 2.0) * (1.0 - 1e-12),
            "a must be at least max(2 c1, pi sqrt(n)/2)");
}

double r_of(const IVec& k, const AlphaGeometry& g) {
    if (g.alpha == 0.0) return 1.0;
    return std::pow(bracket(k), g.gamma());
}

RVec xi_of(const IVec& k, const AlphaGeometry& g) {
    const double r = r_of(k, g);
    RVec xi(k.size());
    for (std::size_t i = 0; i < k.size(); ++i) xi[i] = k[i] * r;
    return xi;
}

RVec x_of(const IVec& k, const IVec& ell, const AlphaGeometry& g) {
    const double s = kPi / g.a / r_of(k, g);
    RVec x(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i) x[i] = s * ell[i];
    return x;
}

Ball qball(const IVec& k, const IVec& ell, const AlphaGeometry& g) {
    Ball b;
    b.center = x_of(k, ell, g);
    for (double& c : b.center) c = -c;
    b.radius = 1.0 / r_of(k, g);
    return b;
}

void Truncation::validate() const {
    require(kmax >= 0, "empty truncation: kmax must be >= 0");
    require(T > 0.0, "truncation half width T must be positive");
    require(margin >= 0, "truncation margin must be >= 0");
}

int Truncation::ellmax(const IVec& k, const AlphaGeometry& g) const {
    return int(std::ceil(g.a * r_of(k, g) * T / kPi)) + margin;
}

std::vector<IVec> freq_indices(int dim, int kmax) {
    require(kmax >= 0, "empty truncation: kmax must be >= 0");
    const int side = 2 * kmax + 1;
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i) total *= side;
    std::vector<IVec> out;
    out.reserve(total);
    IVec k(dim, -kmax);
    for (std::size_t c = 0; c < total; ++c) {
        out.push_back(k);
        for (int i = dim - 1; i >= 0; --i) {
            if (++k[i] <= kmax) break;
            k[i] = -kmax;
        }
    }
    return out;
}

std::size_t freq_position(const IVec& k, int kmax) {
    const std::size_t side = 2 * kmax + 1;
    std::size_t pos = 0;
    for (int v : k) pos = pos * side + std::size_t(v + kmax);
    return pos;
}

std::vector<Ball> ball_cover(const AlphaGeometry& g, const Truncation& t) {
    t.validate();
    std::vector<Ball> out;
    for (const auto& k : freq_indices(g.dim, t.kmax)) out.push_back({xi_of(k, g), g.c1 * r_of(k, g)});
    return out;
}

double interior_half_width(const AlphaGeometry& g, int kmax) {
    IVec axis(g.dim, 0);
    axis[0] = kmax;
    const double ra = r_of(axis, g);
    const double rmax = r_of(IVec(g.dim, kmax), g);
    return kmax * ra + g.c1 * ra - 2.0 * g.c1 * rmax;
}

double ball_volume(int dim, double radius) {
    const double n = dim;
    return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(radius, n);
}

std::string CoverReport::to_json() const {
    nlohmann::json j;
    j["n0"] = n0;
    j["coverage_ok"] = coverage_ok;
    j["size_ratio_min"] = size_ratio_min;
    j["size_ratio_max"] = size_ratio_max;
    j["c1"] = c1;
    j["a"] = a;
    j["radius_ratio"] = radius_ratio;
    j["probes"] = probes;
    j["interior_half_width"] = interior;
    return j.dump(2);
}

CoverReport certify_covering(const AlphaGeometry& g, const Truncation& t, double res) {
    g.validate();
    t.validate();
    require(res > 0.0, "probe_resolution must be positive");
    const int n = g.dim;
    const double H = interior_half_width(g, t.kmax);
    require(H > 0.0, "truncation too small: empty interior after the boundary collar");

    const long side = long(std::floor(2.0 * H / res)) + 1;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= std::size_t(side);
    require(total <= std::size_t(1) << 27, "probe grid too large; increase probe_resolution");

    std::vector<int> count(total, 0);
    std::vector<double> rmin(total, std::numeric_limits<double>::infinity());
    std::vector<double> rmax(total, 0.0);

    auto coord = [&](long i) { return -H + double(i) * res; };

    for (const auto& k : freq_indices(n, t.kmax)) {
        const RVec c = xi_of(k, g);
        const double rad = g.c1 * r_of(k, g);
        const double rad2 = rad * rad * (1.0 + 1e-12);
        const double vol = ball_volume(n, rad);
        std::vector<long> lo(n), hi(n);
        bool empty = false;
        for (int i = 0; i < n; ++i) {
            lo[i] = std::max(0L, long(std::ceil((c[i] - rad + H) / res - 1e-9)));
            hi[i] = std::min(side - 1, long(std::floor((c[i] + rad + H) / res + 1e-9)));
            if (lo[i] > hi[i]) empty = true;
        }
        if (empty) continue;
        std::vector<long> id(lo);
        while (true) {
            double d2 = 0.0;
            std::size_t pos = 0;
            RVec p(n);
            for (int i = 0; i < n; ++i) {
                p[i] = coord(id[i]);
                const double d = p[i] - c[i];
                d2 += d * d;
                pos = pos * side + std::size_t(id[i]);
            }
            if (d2 <= rad2) {
                ++count[pos];
                const double ratio = vol / std::pow(bracket(p), g.alpha * n);
                rmin[pos] = std::min(rmin[pos], ratio);
                rmax[pos] = std::max(rmax[pos], ratio);
            }
            int ax = n - 1;
            while (ax >= 0 && ++id[ax] > hi[ax]) {
                id[ax] = lo[ax];
                --ax;
            }
            if (ax < 0) break;
        }
    }

    CoverReport rep;
    rep.c1 = g.c1;
    rep.a = g.a;
    rep.probes = total;
    rep.interior = H;
    rep.size_ratio_min = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < total; ++p) {
        if (count[p] == 0) {
            std::ostringstream os;
            os << "probe (";
            std::size_t rem = p;
            std::vector<long> id(n);
            for (int i = n - 1; i >= 0; --i) {
                id[i] = long(rem % std::size_t(side));
                rem /= std::size_t(side);
            }
            for (int i = 0; i < n; ++i) os << (i ? ", " : "") << coord(id[i]);
            os << ") lies in no ball (c1 = " << g.c1 << ")";
            throw CoverageGap(os.str());
        }
        rep.n0 = std::max(rep.n0, count[p]);
        rep.size_ratio_min = std::min(rep.size_ratio_min, rmin[p]);
        rep.size_ratio_max = std::max(rep.size_ratio_max, rmax[p]);
    }
    rep.coverage_ok = true;
    return rep;
}

double select_c1(double alpha, int dim, int kmax, double res) {
    for (double c1 : {1.0, 1.5, 2.0, 2.5, 3.0}) {
        try {
            certify_covering(AlphaGeometry::make(alpha, dim, c1), Truncation{kmax, 1.0, 1}, res);
            return c1;
        } catch (const CoverageGap&) {
        }
    }
    throw CoverageGap("no c1 in {1, 1.5, 2, 2.5, 3} covers the interior");
}

std::shared_ptr<const TFLayout> TFLayout::nominal(const AlphaGeometry& g, const Truncation& t) {
    g.validate();
    t.validate();
    auto L = std::shared_ptr<TFLayout>(new TFLayout());
    L->geom_ = g;
    L->kmax_ = t.kmax;
    L->T_ = t.T;
    L->periodic_ = false;
    for (const auto& k : freq_indices(g.dim, t.kmax)) {
        KBlock b;
        b.k = k;
        b.r = r_of(k, g);
        b.xi = xi_of(k, g);
        const int em = t.ellmax(k, g);
        b.P = 2 * em + 1;
        b.lo = -em;
        b.step = kPi / g.a / b.r;
        L->blocks_.push_back(std::move(b));
    }
    L->finish();
    return L;
}

std::shared_ptr<const TFLayout> TFLayout::periodic(const AlphaGeometry& g, int kmax, double T) {
    g.validate();
    require(kmax >= 0, "empty truncation: kmax must be >= 0");
    require(T > 0.0, "T must be positive");
    auto L = std::shared_ptr<TFLayout>(new TFLayout());
    L->geom_ = g;
    L->kmax_ = kmax;
    L->T_ = T;
    L->periodic_ = true;
    for (const auto& k : freq_indices(g.dim, kmax)) {
        KBlock b;
        b.k = k;
        b.r = r_of(k, g);
        b.xi = xi_of(k, g);
        b.P = std::max(1, int(std::lround(2.0 * g.a * b.r * T / kPi)));
        b.lo = -(b.P / 2);
        b.step = 2.0 * T / b.P;
        L->blocks_.push_back(std::move(b));
    }
    L->finish();
    return L;
}

void TFLayout::finish() {
    total_ = 0;
    for (auto& b : blocks_) {
        b.count = 1;
        for (int i = 0; i < geom_.dim; ++i) b.count *= std::size_t(b.P);
        b.offset = total_;
        total_ += b.count;
    }
}

long TFLayout::block_of(const IVec& k) const {
    if (int(k.size()) != geom_.dim) return -1;
    for (int v : k)
        if (v < -kmax_ || v > kmax_) return -1;
    return long(freq_position(k, kmax_));
}

std::size_t TFLayout::flat(const IVec& k, const IVec& ell) const {
    const long b = block_of(k);
    if (b < 0 || int(ell.size()) != geom_.dim) throw IndexOutOfTruncation("frequency index outside truncation");
    const KBlock& B = blocks_[std::size_t(b)];
    std::size_t loc = 0;
    for (int v : ell) {
        const int t = v - B.lo;
        if (t < 0 || t >= B.P) throw IndexOutOfTruncation("translation index outside truncation");
        loc = loc * std::size_t(B.P) + std::size_t(t);
    }
    return B.offset + loc;
}

std::size_t TFLayout::block_of_flat(std::size_t idx) const {
    auto it = std::upper_bound(blocks_.begin(), blocks_.end(), idx,
                               [](std::size_t v, const KBlock& b) { return v < b.offset; });
    return std::size_t(it - blocks_.begin()) - 1;
}

IVec TFLayout::ell_of(std::size_t idx) const {
    const KBlock& B = blocks_[block_of_flat(idx)];
    std::size_t loc = idx - B.offset;
    IVec ell(geom_.dim);
    for (int i = geom_.dim - 1; i >= 0; --i) {
        ell[i] = B.lo + int(loc % std::size_t(B.P));
        loc /= std::size_t(B.P);
    }
    return ell;
}

RVec TFLayout::center(std::size_t idx) const {
    const KBlock& B = blocks_[block_of_flat(idx)];
    const IVec ell = ell_of(idx);
    RVec x(ell.size());
    for (std::size_t i = 0; i < ell.size(); ++i) x[i] = B.step * ell[i];
    return x;
}

Ball TFLayout::qball(std::size_t idx) const {
    const KBlock& B = blocks_[block_of_flat(idx)];
    Ball b{center(idx), 1.0 / B.r};
    for (double& c : b.center) c = -c;
    return b;
}

double TFLayout::distance(const RVec& x, const RVec& y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = std::abs(x[i] - y[i]);
        if (periodic_) {
            d = std::fmod(d, 2.0 * T_);
            d = std::min(d, 2.0 * T_ - d);
        }
        s += d * d;
    }
    return std::sqrt(s);
}

bool TFLayout::same_as(const TFLayout& o) const {
    if (this == &o) return true;
    if (periodic_ != o.periodic_ || kmax_ != o.kmax_ || T_ != o.T_ || total_ != o.total_) return false;
    if (geom_.alpha != o.geom_.alpha || geom_.dim != o.geom_.dim || geom_.c1 != o.geom_.c1 || geom_.a != o.geom_.a)
        return false;
    for (std::size_t b = 0; b < blocks_.size(); ++b)
        if (blocks_[b].P != o.blocks_[b].P) return false;
    return true;
}

}  // namespace amspec
