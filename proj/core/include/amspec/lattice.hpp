#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "amspec/common.hpp"

namespace amspec {

struct AlphaGeometry {
    double alpha = 0.0;
    int dim = 1;
    double c1 = 1.0;
    double a = 0.0;

    // a = max(2 c1, pi sqrt(n)/2) (1 + 1/16)
    static AlphaGeometry make(double alpha, int dim, double c1);
    void validate() const;
    double gamma() const { return alpha / (1.0 - alpha); }
};

double r_of(const IVec& k, const AlphaGeometry& g);
RVec xi_of(const IVec& k, const AlphaGeometry& g);
RVec x_of(const IVec& k, const IVec& ell, const AlphaGeometry& g);

struct Ball {
    RVec center;
    double radius = 0.0;
};

// Q(k,l) = B(-(pi/a) r_k^{-1} l, r_k^{-1})
Ball qball(const IVec& k, const IVec& ell, const AlphaGeometry& g);

struct Truncation {
    int kmax = 0;
    double T = 1.0;
    int margin = 1;

    void validate() const;
    int ellmax(const IVec& k, const AlphaGeometry& g) const;
};

// All k with |k|_inf <= kmax, lexicographic with the first coordinate slowest.
std::vector<IVec> freq_indices(int dim, int kmax);
std::size_t freq_position(const IVec& k, int kmax);

std::vector<Ball> ball_cover(const AlphaGeometry& g, const Truncation& t);

// Half width of the interior probe box: axis cover reach minus a collar of 2 c1 r_max.
double interior_half_width(const AlphaGeometry& g, int kmax);

double ball_volume(int dim, double radius);

struct CoverReport {
    int n0 = 0;
    bool coverage_ok = false;
    double size_ratio_min = 0.0;
    double size_ratio_max = 0.0;
    double c1 = 0.0;
    double a = 0.0;
    double radius_ratio = 1.0;
    std::size_t probes = 0;
    double interior = 0.0;

    std::string to_json() const;
};

CoverReport certify_covering(const AlphaGeometry& g, const Truncation& t, double probe_resolution);

// Smallest c1 in {1, 1.5, 2, 2.5, 3} whose cover passes certify_covering.
double select_c1(double alpha, int dim, int kmax, double probe_resolution);

// Per-k block of the time-frequency index set. Local l-index t in [0,P)^n, l = lo + t.
struct KBlock {
    IVec k;
    double r = 1.0;
    RVec xi;
    int P = 1;
    int lo = 0;
    double step = 1.0;  // x_{k,l} = step * l
    std::size_t offset = 0;
    std::size_t count = 1;  // P^n
};

// Finite (k,l) index set. Nominal layouts use the step (pi/a)/r_k and |l|_inf <= ellmax(k).
// Periodic layouts live on the torus [-T,T)^n: P_k = round(2 a r_k T/pi) translates with step 2T/P_k,
// so that the localized exponentials are exactly orthonormal on the DFT grid.
class TFLayout {
public:
    static std::shared_ptr<const TFLayout> nominal(const AlphaGeometry& g, const Truncation& t);
    static std::shared_ptr<const TFLayout> periodic(const AlphaGeometry& g, int kmax, double T);

    const AlphaGeometry& geometry() const { return geom_; }
    int dim() const { return geom_.dim; }
    int kmax() const { return kmax_; }
    double T() const { return T_; }
    bool is_periodic() const { return periodic_; }

    std::size_t num_blocks() const { return blocks_.size(); }
    const KBlock& block(std::size_t b) const { return blocks_[b]; }
    const std::vector<KBlock>& blocks() const { return blocks_; }
    std::size_t size() const { return total_; }

    // -1 when k lies outside the truncation
    long block_of(const IVec& k) const;
    std::size_t flat(const IVec& k, const IVec& ell) const;
    std::size_t block_of_flat(std::size_t idx) const;
    IVec ell_of(std::size_t idx) const;
    RVec center(std::size_t idx) const;
    Ball qball(std::size_t idx) const;
    // Euclidean distance, minimum-image on the torus for periodic layouts
    double distance(const RVec& x, const RVec& y) const;

    bool same_as(const TFLayout& o) const;

private:
    AlphaGeometry geom_;
    int kmax_ = 0;
    double T_ = 0.0;
    bool periodic_ = false;
    std::vector<KBlock> blocks_;
    std::size_t total_ = 0;

    void finish();
};

using LayoutPtr = std::shared_ptr<const TFLayout>;

}  // namespace amspec
