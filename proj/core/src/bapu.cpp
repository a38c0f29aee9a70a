#include "amspec/bapu.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "amspec/fft.hpp"

namespace amspec {

namespace {
double e_std(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double e_alt(double u) { return u > 0.0 ? std::exp(-1.0 / (u * u)) : 0.0; }
}  // namespace

double BumpProfile::rho(double t) const {
    const double u = (1.5 - t) / 0.5;
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    if (kind == ProfileKind::Standard) {
        const double a = e_std(u), b = e_std(1.0 - u);
        return a / (a + b);
    }
    const double a = e_alt(u), b = e_alt(1.0 - u);
    return a / (a + b);
}

BapuSystem::BapuSystem(const AlphaGeometry& g, const Truncation& t, BumpProfile prof)
    : geom_(g), trunc_(t), prof_(prof) {
    g.validate();
    t.validate();
    ks_ = freq_indices(g.dim, t.kmax);
    const std::size_t K = ks_.size();
    r_.resize(K);
    xi_.resize(K);
    double lo = 0.0, hi = 0.0;
    for (std::size_t b = 0; b < K; ++b) {
        r_[b] = r_of(ks_[b], g);
        xi_[b] = xi_of(ks_[b], g);
        const double R = support_radius(b);
        for (double c : xi_[b]) outer_ = std::max(outer_, std::abs(c) + R);
        lo = std::min(lo, xi_[b][0] - R);
        hi = std::max(hi, xi_[b][0] + R);
    }
    slab_lo_ = lo;
    slab_w_ = g.c1;
    const std::size_t ns = std::size_t(std::ceil((hi - lo) / slab_w_)) + 1;
    slabs_.assign(ns, {});
    for (std::size_t b = 0; b < K; ++b) {
        const double R = support_radius(b);
        const long s0 = std::max(0L, long(std::floor((xi_[b][0] - R - slab_lo_) / slab_w_)));
        const long s1 = std::min(long(ns) - 1, long(std::floor((xi_[b][0] + R - slab_lo_) / slab_w_)));
        for (long s = s0; s <= s1; ++s) slabs_[std::size_t(s)].push_back(b);
    }
    nbr_.assign(K, {});
    for (std::size_t b = 0; b < K; ++b) {
        for (std::size_t j = 0; j < K; ++j) {
            const double reach = support_radius(b) + support_radius(j);
            double d2 = 0.0;
            for (int i = 0; i < g.dim; ++i) {
                const double d = xi_[b][i] - xi_[j][i];
                d2 += d * d;
            }
            if (d2 < reach * reach) nbr_[b].push_back(j);
        }
    }
}

double BapuSystem::phi(const RVec& xi, std::size_t b) const {
    double d2 = 0.0;
    for (int i = 0; i < geom_.dim; ++i) {
        const double d = xi[i] - xi_[b][i];
        d2 += d * d;
    }
    return prof_.rho(std::sqrt(d2) / (geom_.c1 * r_[b]));
}

double BapuSystem::phi_k(const RVec& xi, const IVec& k) const {
    const AlphaGeometry& g = geom_;
    const double r = r_of(k, g);
    const RVec c = xi_of(k, g);
    double d2 = 0.0;
    for (int i = 0; i < g.dim; ++i) d2 += (xi[i] - c[i]) * (xi[i] - c[i]);
    return prof_.rho(std::sqrt(d2) / (g.c1 * r));
}

std::vector<std::size_t> BapuSystem::active(const RVec& xi) const {
    std::vector<std::size_t> out;
    const long s = long(std::floor((xi[0] - slab_lo_) / slab_w_));
    if (s < 0 || s >= long(slabs_.size())) return out;
    for (std::size_t b : slabs_[std::size_t(s)])
        if (phi(xi, b) > 0.0) out.push_back(b);
    return out;
}

double BapuSystem::denominator(const RVec& xi) const {
    double d = 0.0;
    for (std::size_t b : active(xi)) {
        const double v = phi(xi, b);
        d += v * v;
    }
    return d;
}

double BapuSystem::theta_raw(const RVec& xi, std::size_t b) const {
    const double p = phi(xi, b);
    if (p == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t j : active(xi)) {
        const double q = phi(xi, j) / p;
        s += q * q;
    }
    return 1.0 / std::sqrt(s);
}

double BapuSystem::theta(const RVec& xi, std::size_t b) const {
    const double d = denominator(xi);
    if (d < 0.25) throw DenominatorUnderflow("sum of phi^2 below 1/4: frequency outside the covered region");
    return theta_raw(xi, b);
}

double BapuSystem::theta_k(const RVec& xi, const IVec& k) const {
    const double d = denominator(xi);
    if (d < 0.25) throw DenominatorUnderflow("sum of phi^2 below 1/4: frequency outside the covered region");
    return phi_k(xi, k) / std::sqrt(d);
}

std::vector<RVec> interior_probes(const BapuSystem& sys, std::size_t count, std::uint64_t seed) {
    const double H = sys.interior();
    require(H > 0.0, "empty interior region");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-H, H);
    std::vector<RVec> pts(count, RVec(sys.geometry().dim));
    for (auto& p : pts)
        for (auto& v : p) v = U(rng);
    return pts;
}

double ball_mixed_norm(int dim, double R, const RVec& p) {
    // F_j(1) = (F_{j-1}(1)^{p_j} B(1/2, c+1))^{1/p_j}, c = p_j e_{j-1}/2, e_j = sum_{i<=j} 1/p_i
    double F = 1.0, e = 0.0;
    for (int j = 0; j < dim; ++j) {
        const double pj = p[j];
        const double c = pj * e / 2.0;
        const double beta = std::sqrt(kPi) * std::exp(std::lgamma(c + 1.0) - std::lgamma(c + 1.5));
        F = std::pow(std::pow(F, pj) * beta, 1.0 / pj);
        e += 1.0 / pj;
    }
    return F * std::pow(R, e) / ball_volume(dim, R);
}

std::string BapuReport::to_json() const {
    nlohmann::json j;
    j["pu_max_err"] = pu_max_err;
    j["support_ok"] = support_ok;
    j["bapu3_sup"] = bapu3_sup;
    j["deriv_decay"] = {{"1", deriv1}, {"2", deriv2}};
    return j.dump(2);
}

BapuReport certify_bapu(const BapuSystem& sys, const PVec& p, const Grid& grid, std::size_t probes,
                        std::uint64_t seed) {
    grid.validate();
    const AlphaGeometry& g = sys.geometry();
    const int n = g.dim;
    require(p.dim() == n && grid.dim == n, "dimension mismatch in certify_bapu");
    const std::size_t K = sys.size();
    BapuReport rep;

    // (i) support: 1 at the centre, 0 just outside 1.5 c1 r_k along every axis direction
    rep.support_ok = true;
    for (std::size_t b = 0; b < K; ++b) {
        if (sys.phi(sys.xi(b), b) != 1.0) rep.support_ok = false;
        for (int i = 0; i < n; ++i)
            for (double s : {-1.0, 1.0}) {
                RVec x = sys.xi(b);
                x[i] += s * sys.support_radius(b) * (1.0 + 1e-12);
                if (sys.phi(x, b) != 0.0) rep.support_ok = false;
                x[i] = sys.xi(b)[i] + s * g.c1 * sys.r(b);
                if (sys.phi(x, b) != 1.0) rep.support_ok = false;
            }
    }

    // (ii) partition of squares on interior probes
    for (const auto& x : interior_probes(sys, probes, seed)) {
        const double d = sys.denominator(x);
        if (d < 0.25) throw DenominatorUnderflow("interior probe outside the covered region");
        double s = 0.0;
        for (std::size_t b : sys.active(x)) {
            const double t = sys.phi(x, b) / std::sqrt(d);
            s += t * t;
        }
        rep.pu_max_err = std::max(rep.pu_max_err, std::abs(s - 1.0));
    }

    // (iii) |Q_k|^{-1} ||1_{Q_k}||_{p~} ||F^{-1} phi_k||_{p~}
    RVec pt(n);
    for (int j = 0; j < n; ++j) {
        pt[j] = 1.0;
        for (int i = 0; i <= j; ++i) pt[j] = std::min(pt[j], p.p[i]);
    }
    rep.bapu3_per_k.assign(K, 0.0);
    const double dxi = grid.dxi();
    parallel_for(K, [&](std::size_t b) {
        if (sys.support_radius(b) * 1.0 >= grid.nyquist())
            throw NyquistViolation("grid too coarse for the bump of block " + std::to_string(b));
        std::vector<cd> spec(grid.size());
        for (std::size_t idx = 0; idx < spec.size(); ++idx) {
            std::size_t rem = idx;
            double d2 = 0.0;
            for (int i = n - 1; i >= 0; --i) {
                const double d = signed_index(int(rem % std::size_t(grid.N)), grid.N) * dxi;
                rem /= std::size_t(grid.N);
                d2 += d * d;
            }
            spec[idx] = sys.profile().rho(std::sqrt(d2) / (g.c1 * sys.r(b)));
        }
        const SampledSignal f = from_spectrum(grid, std::move(spec));
        rep.bapu3_per_k[b] = ball_mixed_norm(n, sys.support_radius(b), pt) * mixed_norm(f, pt);
    });
    rep.bapu3_sup = *std::max_element(rep.bapu3_per_k.begin(), rep.bapu3_per_k.end());

    // (iv) central differences, step r_k/64, weighted by <xi>^{|beta| alpha}
    rep.deriv1_per_k.assign(K, 0.0);
    RVec d2k(K, 0.0);
    parallel_for(K, [&](std::size_t b) {
        const double r = sys.r(b);
        const double hs = r / 64.0;
        const double R = sys.support_radius(b);
        const int side = 31;
        std::size_t pts = 1;
        for (int i = 0; i < n; ++i) pts *= side;
        for (std::size_t c = 0; c < pts; ++c) {
            RVec x = sys.xi(b);
            std::size_t rem = c;
            for (int i = n - 1; i >= 0; --i) {
                x[i] += -R + 2.0 * R * double(rem % side) / (side - 1);
                rem /= side;
            }
            const double w = std::pow(bracket(x), g.alpha);
            auto at = [&](int i, double si, int j, double sj) {
                RVec y = x;
                if (i >= 0) y[i] += si * hs;
                if (j >= 0) y[j] += sj * hs;
                return sys.phi(y, b);
            };
            const double f0 = sys.phi(x, b);
            for (int i = 0; i < n; ++i) {
                const double fp = at(i, 1, -1, 0), fm = at(i, -1, -1, 0);
                rep.deriv1_per_k[b] = std::max(rep.deriv1_per_k[b], std::abs(fp - fm) / (2 * hs) * w);
                d2k[b] = std::max(d2k[b], std::abs(fp - 2 * f0 + fm) / (hs * hs) * w * w);
                for (int j = i + 1; j < n; ++j) {
                    const double m = at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1);
                    d2k[b] = std::max(d2k[b], std::abs(m) / (4 * hs * hs) * w * w);
                }
            }
        }
    });
    rep.deriv1 = *std::max_element(rep.deriv1_per_k.begin(), rep.deriv1_per_k.end());
    rep.deriv2 = *std::max_element(d2k.begin(), d2k.end());
    return rep;
}

}  // namespace amspec
