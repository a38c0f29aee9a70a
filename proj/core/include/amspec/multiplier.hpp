#pragma once

#include <functional>
#include <string>
#include <vector>

#include "amspec/admat.hpp"
#include "amspec/frame.hpp"
#include "amspec/transform.hpp"

namespace amspec {

struct Symbol {
    std::function<cd(const RVec&)> eval;
    double order = 0.0;  // b
    std::string name;

    cd operator()(const RVec& xi) const { return eval(xi); }
};

Symbol symbol_one();
Symbol symbol_bracket_power(double b);
// sin(xi_1^2): bounded, but its derivatives grow, so it lies in no symbol class of order 0
Symbol symbol_sin_square();
Symbol symbol_product(const Symbol& a, const Symbol& b);
// n = 1 table "xi,re,im" (header optional), linear interpolation, constant beyond the end points
Symbol symbol_from_csv(const std::string& path, double order);

struct SeminormEntry {
    IVec eta;
    double value = 0.0;     // step <xi>^alpha/32 on |xi|_inf <= extent
    double halved = 0.0;    // step halved
    double extended = 0.0;  // extent doubled
};

struct SymbolReport {
    double alpha = 0.0;
    double b = 0.0;
    double extent = 0.0;
    std::vector<SeminormEntry> table;
    bool in_class = false;

    std::string to_json() const;
};

// sup of <xi>^{alpha|eta| - b} |D^eta m(xi)| over a probe grid, with central differences of step <xi>^alpha/32.
// in_class: every seminorm finite and within 10% under step halving and under extent doubling (values below
// 1e-9 of the order-0 seminorm count as zero).
SymbolReport symbol_class_check(const Symbol& m, int dim, double alpha, double b, int max_order, double extent);

// <m(D) phi_{k,l}, phi_{j,m}> at row (j,m), column (k,l); same spectral kernel as gram(fs), so m = 1 reproduces it
// entry for entry, and blocks with disjoint theta supports are structurally absent.
OpMatrix multiplier_matrix(const FrameSystem& fs, const Symbol& m);

// column (k,l) scaled by <xi_k>^{-b}
OpMatrix rescale_columns(const OpMatrix& A, double b);
AdMembership multiplier_is_ad(const FrameSystem& fs, const Symbol& m, const AdParams& par);

struct RowDecay {
    double N = 0.0;
    double C_min = 0.0;  // over overlapping (k,j) block pairs
    double C_max = 0.0;
    double C_diag_min = 0.0;  // over pairs with k = j
    double C_diag_max = 0.0;
};
// C_N(k,j) = max_{l,m} <xi_k>^{-b} |entry| (1 + d)^N with d the translation-index distance
// |x_{k,l} - x_{j,m}| / max(step_k, step_j) (minimum image, equal to |l - m| when k = j).
RowDecay row_decay(const OpMatrix& A, double b, double N);

enum class Route { Direct, Matrix };
// Direct: multiply the spectrum pointwise. Matrix: synthesize(M analyze(f)). The direct route requires f to have
// no spectral mass (relative 1e-10) beyond 0.9 Nyquist, the matrix route none beyond the tight band.
SampledSignal apply_multiplier(const Symbol& m, const SampledSignal& f, Route route, const FrameSystem* fs = nullptr,
                               const OpMatrix* M = nullptr);

// mod_norm(m(D) f; s) / mod_norm(f; s + shift) over the panel. Bands carry the weight r_k^s and
// <xi_k> ~ r_k^{1/alpha}, so an order-b symbol costs shift = b/alpha (smoothness_shift); shift = b leaves a
// residual growth <xi>^{b(1-alpha)}.
NormBracket multiplier_bound_bracket(const Symbol& m, const BapuSystem& bapu, const std::vector<SampledSignal>& panel,
                                     const SpaceParams& sp, double shift);
double smoothness_shift(double b, double alpha);

}  // namespace amspec
