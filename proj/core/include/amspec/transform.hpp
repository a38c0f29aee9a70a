#pragma once

#include <vector>

#include "amspec/frame.hpp"

namespace amspec {

struct SpaceParams {
    double s = 0.0;
    double alpha = 0.0;
    PVec p;  // carries q

    SpaceParams() = default;
    SpaceParams(double s_, double alpha_, PVec p_);
    void validate() const;
};

// (sum_j || sum_m r_j^{s+n/2} |b_jm| 1_{Q(j,m)} ||_p^q)^{1/q}; closed balls rasterized at the sample points of
// `grid` (periodic in x with period 2T).
double seq_norm(const CoeffField& c, const SpaceParams& sp, const Grid& grid);

// (sum_k r_k^{qs} ||F^{-1}(psi_k F f)||_p^q)^{1/q} with psi_k = phi_k / sum_j phi_j, a partition of unity
// built from the bumps of `bapu`.
double mod_norm(const SampledSignal& f, const SpaceParams& sp, const BapuSystem& bapu);

struct NormBracket {
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    RVec ratios;
};

// seq_norm(analyze(f)) / mod_norm(f) over the panel
NormBracket norm_equivalence_check(const AtomFamily& fam, const BapuSystem& bapu,
                                   const std::vector<SampledSignal>& panel, const SpaceParams& sp);

// sup over stored entries of <k>^{-beta} |b_{k,l}|
double growth_class(const CoeffField& c, double beta);

}  // namespace amspec
