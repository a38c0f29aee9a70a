#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amspec/frame.hpp"
#include "amspec/transform.hpp"

namespace amspec {

struct AdParams {
    double s = 0.0;
    double alpha = 0.0;
    PVec p;
    double delta = 1.0;
    double beta = 1.0;
    double rho0 = 1.0, rho1 = 1.0;
    double R0 = 0.0, R1 = 0.0;

    // beta < 0 selects min(1, (1-alpha)/alpha) (1 at alpha = 0). rho0 = 1 unless alpha (1+beta) = 1, where the
    // moderate bound needs rho0 < 1 and 1/2 is used. R0, R1 are fitted on radial probes.
    static AdParams make(double s, double alpha, PVec p, double delta, double beta = -1.0);
    int dim() const { return p.dim(); }
    double J() const { return p.J(); }
    void validate() const;
};

struct ModerateFit {
    double R0 = 0.0;
    double R1 = 0.0;
};
// Smallest R0, R1 for which the two moderate-weight implications hold on radial probes |xi| <= extent.
ModerateFit fit_moderate(double alpha, double beta, double rho0, double rho1, double extent);

// Sparse matrix in CSR form; rows indexed by `rows`, columns by `cols`.
class OpMatrix {
public:
    OpMatrix() = default;
    OpMatrix(LayoutPtr rows, LayoutPtr cols);

    struct Triplet {
        std::size_t row, col;
        cd value;
    };
    // Duplicates are summed in input order.
    static OpMatrix from_triplets(LayoutPtr rows, LayoutPtr cols, std::vector<Triplet> t);
    static OpMatrix identity(LayoutPtr L);

    const LayoutPtr& row_layout() const { return rows_; }
    const LayoutPtr& col_layout() const { return cols_; }
    std::size_t num_rows() const { return rows_->size(); }
    std::size_t num_cols() const { return cols_->size(); }
    std::size_t nnz() const { return val_.size(); }

    const std::vector<std::size_t>& row_ptr() const { return ptr_; }
    const std::vector<std::size_t>& col_index() const { return col_; }
    const std::vector<cd>& values() const { return val_; }
    std::vector<cd>& values() { return val_; }

    cd get(std::size_t r, std::size_t c) const;  // 0 when not stored
    OpMatrix& operator*=(cd s);

private:
    LayoutPtr rows_, cols_;
    std::vector<std::size_t> ptr_{0};
    std::vector<std::size_t> col_;
    std::vector<cd> val_;
};

// w^{s,delta}_{(j,m)(k,n)} for row atom (j,m) of `Lr` and column atom (k,n) of `Lc`.
double weight(const TFLayout& Lr, std::size_t jm, const TFLayout& Lc, std::size_t kn, const AdParams& par);
double weight(const TFLayout& Lr, std::size_t jm, const TFLayout& Lc, std::size_t kn, const AdParams& par,
              double delta);

struct AdMembership {
    double C = 0.0;
    std::size_t entries = 0;
};
AdMembership is_almost_diagonal(const OpMatrix& A, const AdParams& par);

struct StabilityReport {
    double fitted_small = 0.0;
    double fitted_large = 0.0;
    double rel_change = 0.0;
    bool stable = false;
    std::string to_json() const;
};
StabilityReport stability(double small, double large, double tolerance);

OpMatrix compose(const OpMatrix& A, const OpMatrix& B);
CoeffField apply(const OpMatrix& A, const CoeffField& c);

// Probe pairs (j,m),(k,n) restricted to |k|_inf, |j|_inf <= kcap and |x| <= xcap, stratified by |k-j|_inf.
struct ProbePair {
    IVec j, m, k, n;
};
std::vector<ProbePair> stratified_pairs(const TFLayout& L, int kcap, double xcap, std::size_t per_shell,
                                        std::uint64_t seed);

// max over probes of [sum_{(i,l)} w^delta_{jm,il} w^delta_{il,kn}] / w^{delta/2}_{jm,kn}, summed over layout L
double composition_closure_check(const AdParams& par, const TFLayout& L, const std::vector<ProbePair>& probes);

// max over the panel of seq_norm(A c)/seq_norm(c)
double bounded_action_check(const OpMatrix& A, const SpaceParams& sp, const std::vector<CoeffField>& panel,
                            const Grid& grid);

struct GramOptions {
    const AdParams* par = nullptr;  // when set, entries with weight below weight_floor are not stored
    double weight_floor = 1e-14;
};
struct GramResult {
    OpMatrix G;
    std::size_t dropped = 0;
    double dropped_max_ratio = 0.0;  // max |entry|/weight over dropped entries
};
// Entry [(j,m),(k,n)] = <cols_{k,n}, rows_{j,m}>. Frame x frame with the same system uses the spectral block
// kernel, so entries of blocks with disjoint theta supports are structurally absent.
GramResult gram(const AtomFamily& cols, const AtomFamily& rows, const GramOptions& opt = {});
GramResult gram(const FrameSystem& fs, const GramOptions& opt = {});

struct GramDecay {
    double C = 0.0;     // against the molecule envelope with exponents M, N, L
    double C_A1 = 0.0;  // against min-ratio^{n/2} (1 + min r |dx|)^{-2N}
    std::size_t below_floor = 0;
};
// Entries at or below rel_floor * max|G| sit at the round-off level of the quadrature and are not fitted.
GramDecay gram_decay_check(const OpMatrix& G, double M, double N, double L, double rel_floor = 1e-12);

struct Summability {
    double Ca = 0.0;
    double Cb = 0.0;
};
Summability summability_check(const AdParams& par, int kmax);

// Random sparse s on block k, random (j,m), probe points x of Q(j,m) on `grid`; returns the max ratio
// LHS / [max(r_k/r_j,1)^{n/r} M_r(sum_l |s_kl| 1_{Q(k,l)})(x)].
double maxsum_check(const TFLayout& L, const Grid& grid, double r, double Nexp, int trials, std::uint64_t seed);

}  // namespace amspec
