#include "amspec/transform.hpp"

#include <algorithm>
#include <cmath>

#include "amspec/fft.hpp"

namespace amspec {

namespace {
// Blocks (bands) whose largest coefficient (spectral sample) is below this fraction of the global maximum carry
// only transform round-off and are skipped.
constexpr double kNegligible = 1e-14;
}  // namespace

SpaceParams::SpaceParams(double s_, double alpha_, PVec p_) : s(s_), alpha(alpha_), p(std::move(p_)) { validate(); }

void SpaceParams::validate() const {
    require(std::isfinite(s), "smoothness s must be finite");
    require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0,1)");
    require(!p.p.empty(), "exponent vector must be nonempty");
}

double seq_norm(const CoeffField& c, const SpaceParams& sp, const Grid& grid) {
    grid.validate();
    const TFLayout& L = *c.layout;
    const int n = L.dim();
    require(grid.dim == n && sp.p.dim() == n, "dimension mismatch in seq_norm");
    const std::size_t K = L.num_blocks();
    RVec band(K, 0.0);
    const double h = grid.h();
    double cmax = 0.0;
    for (const cd& v : c.values) cmax = std::max(cmax, std::abs(v));
    if (cmax == 0.0) return 0.0;
    parallel_for(K, [&](std::size_t b) {
        const KBlock& B = L.block(b);
        double bmax = 0.0;
        for (std::size_t i = 0; i < B.count; ++i) bmax = std::max(bmax, std::abs(c.values[B.offset + i]));
        if (bmax <= kNegligible * cmax) return;
        std::vector<double> F(grid.size(), 0.0);
        const double w = std::pow(B.r, sp.s + n / 2.0);
        const double rad = 1.0 / B.r;
        const double rad2 = rad * rad * (1.0 + 1e-12);
        const long reach = long(std::floor(rad / h)) + 1;
        std::vector<long> lo(n), id(n);
        for (std::size_t i = 0; i < B.count; ++i) {
            const double v = std::abs(c.values[B.offset + i]);
            if (v == 0.0) continue;
            const Ball Q = L.qball(B.offset + i);
            for (int ax = 0; ax < n; ++ax) {
                lo[ax] = long(std::floor((Q.center[ax] + grid.T) / h)) - reach;
                id[ax] = lo[ax];
            }
            while (true) {
                double d2 = 0.0;
                std::size_t pos = 0;
                for (int ax = 0; ax < n; ++ax) {
                    const double d = grid.x(0) + id[ax] * h - Q.center[ax];
                    d2 += d * d;
                    pos = pos * std::size_t(grid.N) + std::size_t(wrap_index(id[ax], grid.N));
                }
                if (d2 <= rad2) F[pos] += w * v;
                int ax = n - 1;
                while (ax >= 0 && ++id[ax] > lo[ax] + 2 * reach) {
                    id[ax] = lo[ax];
                    --ax;
                }
                if (ax < 0) break;
            }
        }
        band[b] = mixed_norm_abs(grid, std::move(F), sp.p.p);
    });
    double s = 0.0;
    for (double v : band) s += std::pow(v, sp.p.q);
    return std::pow(s, 1.0 / sp.p.q);
}

double mod_norm(const SampledSignal& f, const SpaceParams& sp, const BapuSystem& bapu) {
    const Grid& g = f.grid;
    const int n = g.dim;
    require(sp.p.dim() == n && bapu.geometry().dim == n, "dimension mismatch in mod_norm");
    if (bapu.outer_radius() >= g.nyquist()) throw NyquistViolation("grid too coarse for the partition of unity");
    const std::vector<cd> fhat = to_spectrum(f);
    double fmax = 0.0;
    for (const cd& v : fhat) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) return 0.0;
    const std::size_t K = bapu.size();
    const double dxi = g.dxi();
    RVec band(K, 0.0);
    parallel_for(K, [&](std::size_t b) {
        const double R = bapu.support_radius(b);
        std::vector<long> lo(n), hi(n), id(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = long(std::ceil((bapu.xi(b)[i] - R) / dxi));
            hi[i] = long(std::floor((bapu.xi(b)[i] + R) / dxi));
            id[i] = lo[i];
        }
        std::vector<cd> spec(g.size());
        bool any = false;
        RVec xi(n);
        while (true) {
            std::size_t pos = 0;
            for (int i = 0; i < n; ++i) {
                xi[i] = id[i] * dxi;
                pos = pos * std::size_t(g.N) + std::size_t(wrap_index(id[i], g.N));
            }
            const double p = bapu.phi(xi, b);
            if (p > 0.0 && fhat[pos] != 0.0) {
                double sum = 0.0;
                for (std::size_t j : bapu.active(xi)) sum += bapu.phi(xi, j);
                spec[pos] = fhat[pos] * (p / sum);
                any = any || std::abs(spec[pos]) > kNegligible * fmax;
            }
            int ax = n - 1;
            while (ax >= 0 && ++id[ax] > hi[ax]) {
                id[ax] = lo[ax];
                --ax;
            }
            if (ax < 0) break;
        }
        if (!any) return;
        band[b] = std::pow(bapu.r(b), sp.s) * mixed_norm(from_spectrum(g, std::move(spec)), sp.p);
    });
    double s = 0.0;
    for (double v : band) s += std::pow(v, sp.p.q);
    return std::pow(s, 1.0 / sp.p.q);
}

NormBracket norm_equivalence_check(const AtomFamily& fam, const BapuSystem& bapu,
                                   const std::vector<SampledSignal>& panel, const SpaceParams& sp) {
    require(!panel.empty(), "norm equivalence needs a nonempty panel");
    NormBracket out;
    out.ratio_min = INFINITY;
    for (const auto& f : panel) {
        const double m = mod_norm(f, sp, bapu);
        require(m > 0.0, "panel signal with zero modulation norm");
        const double r = seq_norm(fam.analyze(f), sp, fam.grid()) / m;
        out.ratios.push_back(r);
        out.ratio_min = std::min(out.ratio_min, r);
        out.ratio_max = std::max(out.ratio_max, r);
    }
    return out;
}

double growth_class(const CoeffField& c, double beta) {
    const TFLayout& L = *c.layout;
    double sup = 0.0;
    for (std::size_t b = 0; b < L.num_blocks(); ++b) {
        const KBlock& B = L.block(b);
        const double w = std::pow(bracket(B.k), -beta);
        for (std::size_t i = 0; i < B.count; ++i) sup = std::max(sup, w * std::abs(c.values[B.offset + i]));
    }
    return sup;
}

}  // namespace amspec
