#pragma once

#include <memory>
#include <string>
#include <vector>

#include "amspec/lattice.hpp"
#include "amspec/mixednorm.hpp"

namespace amspec {

enum class ProfileKind { Standard, Alternate };

// rho = 1 on t <= 1, 0 on t >= 3/2. Standard: sigma built from e(u) = exp(-1/u);
// Alternate: the same construction from exp(-1/u^2), a second admissible profile.
struct BumpProfile {
    ProfileKind kind = ProfileKind::Standard;
    double rho(double t) const;
};

class BapuSystem {
public:
    BapuSystem(const AlphaGeometry& g, const Truncation& t, BumpProfile prof = {});

    const AlphaGeometry& geometry() const { return geom_; }
    const Truncation& truncation() const { return trunc_; }
    const BumpProfile& profile() const { return prof_; }

    std::size_t size() const { return ks_.size(); }
    const IVec& k(std::size_t b) const { return ks_[b]; }
    double r(std::size_t b) const { return r_[b]; }
    const RVec& xi(std::size_t b) const { return xi_[b]; }
    double support_radius(std::size_t b) const { return 1.5 * geom_.c1 * r_[b]; }

    double phi(const RVec& xi, std::size_t b) const;
    double phi_k(const RVec& xi, const IVec& k) const;
    // blocks whose support contains xi
    std::vector<std::size_t> active(const RVec& xi) const;
    double denominator(const RVec& xi) const;  // sum of phi^2
    double theta_k(const RVec& xi, const IVec& k) const;
    double theta(const RVec& xi, std::size_t b) const;
    // theta without the coverage guard, as 1/sqrt(sum (phi_j/phi_b)^2) so tails never underflow to 0/0
    double theta_raw(const RVec& xi, std::size_t b) const;

    // Blocks j whose support intersects that of b (b included).
    const std::vector<std::size_t>& neighbours(std::size_t b) const { return nbr_[b]; }
    // max over blocks and axes of |xi_k,i| + 1.5 c1 r_k
    double outer_radius() const { return outer_; }
    double interior() const { return interior_half_width(geom_, trunc_.kmax); }

private:
    AlphaGeometry geom_;
    Truncation trunc_;
    BumpProfile prof_;
    std::vector<IVec> ks_;
    RVec r_;
    std::vector<RVec> xi_;
    std::vector<std::vector<std::size_t>> nbr_;
    double outer_ = 0.0;
    // slabs along axis 1 for point queries
    double slab_lo_ = 0.0, slab_w_ = 1.0;
    std::vector<std::vector<std::size_t>> slabs_;
};

struct BapuReport {
    double pu_max_err = 0.0;
    bool support_ok = false;
    double bapu3_sup = 0.0;
    RVec bapu3_per_k;
    double deriv1 = 0.0;
    double deriv2 = 0.0;
    RVec deriv1_per_k;

    std::string to_json() const;
};

// Condition (iii) uses Q_k = B(xi_k, 1.5 c1 r_k) and p~_j = min(1, p_1..p_j);
// |F^{-1} phi_k| is sampled on `grid` with the frequency quadrature centred on xi_k.
BapuReport certify_bapu(const BapuSystem& sys, const PVec& p, const Grid& grid, std::size_t probes,
                        std::uint64_t seed);

// Uniform random points in the interior probe box.
std::vector<RVec> interior_probes(const BapuSystem& sys, std::size_t count, std::uint64_t seed);

// ||1_B||_{p} / |B| for a ball of radius R in dimension n under the mixed norm p.
double ball_mixed_norm(int dim, double R, const RVec& p);

}  // namespace amspec
