#pragma once

#include <memory>
#include <string>
#include <vector>

#include "amspec/admat.hpp"
#include "amspec/frame.hpp"
#include "amspec/transform.hpp"

namespace amspec {

// Tensor cardinal B-spline of order p on [0,p]^n with g^(0) = 1 (F g(xi) = int g e^{-i x.xi} dx).
struct GeneratorG {
    int order = 4;
    int dim = 1;

    double eval(const RVec& x) const;
    double eval1(double x) const;  // one axis
    cd hat(const RVec& xi) const;
    cd hat1(double xi) const;
    double support() const { return order; }
    // slope of log|g^| against log(1+|xi|) over the lobe peaks xi = (2j+1) pi, j = 8..512
    double fitted_decay_exponent() const;
};

GeneratorG bspline_generator(int order, int dim);

// tau(y) = sum_i a_i g_m(y + b_i), g_m(y) = C_g m^n g(m y), C_g = 1; n = 1.
struct KTermApprox {
    int m = 1;
    GeneratorG g;
    std::vector<cd> a;  // shifts equispaced: b_i = b0 + i db
    double b0 = 0.0, db = 0.0;

    std::size_t K() const { return a.size(); }
    cd eval(double y) const;
    // tau vanishes outside [lo, hi]
    double support_lo() const;
    double support_hi() const;
};

struct FitWeights {
    double N_env = 0.0;
    double M_env = 0.0;
};

// Envelope exponent targets N = 2(J + delta), M = 2(J + delta) + (2/beta)(|s| + 2J + 3 delta/2).
FitWeights corollary_exponents(const AdParams& par);

struct TauFit {
    KTermApprox tau;
    double eps = 0.0;  // max of the two below
    double eps_space = 0.0;
    double eps_freq = 0.0;
    double l2_rel = 0.0;   // ||mu - tau||_2 / ||mu||_2 on the grid
    double window = 0.0;   // centres c_i = -b_i cover [-window, window]
    std::string to_json() const;
};

// mu_k sampled on the y grid (n = 1). Basis i is g_m(y + b_i), supported on [c_i, c_i + p/m] with c_i = -b_i.
// K = 0 spaces the c_i by 1/m over [-window, window] (the sample step must then be 1/(q m)); K > 0 places K of
// them equispaced over the window, at the nearest whole multiple of the sample step. window <= 0 selects 1.5 x
// the radius beyond which mu has relative L2 tail <= 1e-9. Coefficients by least squares weighted with
// (1+|y|)^{N_env}; eps measured as sup |mu - tau| (1+|y|)^{N_env} and sup |mu^ - tau^| (1+|eta|)^{M_env} on the
// grid and its DFT frequencies. Throws TargetNotReached when eps > tol.
TauFit fit_tau(const SampledSignal& mu, const GeneratorG& g, std::size_t K, int m, const FitWeights& w,
               double window = 0.0, double tol = INFINITY);

// Weighted errors of an arbitrary tau against mu on the grid of mu.
TauFit tau_errors(const SampledSignal& mu, const KTermApprox& tau, const FitWeights& w);

// mu_k(y) = (2a)^{1/2} r_k^{-1/2} phi_{k,0}(y/r_k) e^{-i xi_k y/r_k}, so phi_{k,l}(x) = (2a)^{-1/2} r_k^{1/2}
// mu_k(r_k d) e^{i xi_k (x_{k,l} + d)} with d = x - x_{k,l} wrapped to [-T,T). Evaluated from the trigonometric sum
// of phi_{k,0} at spacing exactly hy, on an even number of points covering [-r_k T, r_k T] plus 8 samples each side.
SampledSignal envelope_samples(const FrameSystem& fs, std::size_t block, double hy);

// Per-block envelope used by a perturbed family: a K-term sum, or mu_k itself read off its samples by 8-point
// Lagrange interpolation on [ylo, yhi).
struct Profile {
    bool sampled = false;
    KTermApprox kterm;
    SampledSignal samples;
    double ylo = 0.0, yhi = 0.0;

    static Profile from_kterm(KTermApprox t);
    static Profile from_samples(SampledSignal mu, double ylo, double yhi);
    cd eval(double y) const;
    double lo() const;
    double hi() const;
};

// psi_{k,l}(x) = (2a)^{-1/2} r_k^{1/2} tau_k(r_k d) e^{i xi_k (x_{k,l} + d)}, d = x - x_{k,l} wrapped to [-T,T).
class PerturbedFamily : public AtomFamily {
public:
    PerturbedFamily(const FrameSystem& fs, std::vector<Profile> taus, double eps);

    const LayoutPtr& layout() const override { return fs_.layout(); }
    const Grid& grid() const override { return fs_.grid(); }
    CoeffField analyze(const SampledSignal& f) const override;
    SampledSignal synthesize(const CoeffField& c) const override;
    SampledSignal atom(std::size_t idx) const override;

    double epsilon() const { return eps_; }
    const Profile& tau(std::size_t block) const { return taus_[block]; }
    // psi_{k,l} vanishes outside x_{k,l} + [lo, hi] (before wrapping)
    std::pair<double, double> support_box(std::size_t idx) const;

private:
    const FrameSystem& fs_;
    std::vector<Profile> taus_;
    double eps_;

    template <class F>
    void for_each_sample(std::size_t idx, F&& f) const;
};

struct PerturbedBuild {
    std::unique_ptr<PerturbedFamily> family;
    std::vector<TauFit> fits;  // per block
    double eps = 0.0;          // max over blocks
};
// One fit per block; K = 0 and window = 0 select the automatic choices of fit_tau.
PerturbedBuild build_perturbed_family(const FrameSystem& fs, const GeneratorG& g, std::size_t K, int m,
                                      const FitWeights& w, double hy, double window = 0.0);
// tau_k = mu_k: psi = phi up to the interpolation of the samples
PerturbedBuild exact_envelope_family(const FrameSystem& fs, double hy);
// tau_k = 0 for every block: the degenerate family
PerturbedBuild zero_family(const FrameSystem& fs);

// Atoms a_i - b_i
class DifferenceFamily : public AtomFamily {
public:
    DifferenceFamily(const AtomFamily& a, const AtomFamily& b);
    const LayoutPtr& layout() const override { return a_.layout(); }
    const Grid& grid() const override { return a_.grid(); }
    CoeffField analyze(const SampledSignal& f) const override;
    SampledSignal synthesize(const CoeffField& c) const override;
    SampledSignal atom(std::size_t idx) const override;

private:
    const AtomFamily& a_;
    const AtomFamily& b_;
};

// Atoms phi_i + t (psi_i - phi_i)
class BlendFamily : public AtomFamily {
public:
    BlendFamily(const AtomFamily& phi, const AtomFamily& psi, double t);
    const LayoutPtr& layout() const override { return phi_.layout(); }
    const Grid& grid() const override { return phi_.grid(); }
    CoeffField analyze(const SampledSignal& f) const override;
    SampledSignal synthesize(const CoeffField& c) const override;
    SampledSignal atom(std::size_t idx) const override;

private:
    const AtomFamily& phi_;
    const AtomFamily& psi_;
    double t_;
};

// Atoms (I - S) phi_i with S the frame operator of `psi`; S is self-adjoint, so <f, (I-S)phi_i> = <(I-S)f, phi_i>.
class FrameOpResidualFamily : public AtomFamily {
public:
    FrameOpResidualFamily(const AtomFamily& phi, const AtomFamily& psi);
    const LayoutPtr& layout() const override { return phi_.layout(); }
    const Grid& grid() const override { return phi_.grid(); }
    CoeffField analyze(const SampledSignal& f) const override;
    SampledSignal synthesize(const CoeffField& c) const override;
    SampledSignal atom(std::size_t idx) const override;

private:
    const AtomFamily& phi_;
    const AtomFamily& psi_;
};

SampledSignal frame_operator_apply(const AtomFamily& fam, const SampledSignal& f);

struct NeumannResult {
    SampledSignal g;   // approximation of S^{-1} f
    int iterations = 0;
    bool converged = false;
    RVec residuals;    // ||(I-S)^i f|| / ||f||, i = 0..iterations
    double max_ratio = 0.0;  // max ||(I-S)^{i+1} f|| / ||(I-S)^i f||
};
// Neumann series sum_i (I-S)^i f; stops once ||(I-S)^i f|| < tol ||f|| or after maxit terms. Throws NoConvergence
// after 3 consecutive non-decreasing residuals.
NeumannResult neumann_invert(const AtomFamily& fam, const SampledSignal& f, double tol, int maxit);

struct ExpansionResult {
    CoeffField coeffs;
    double resynth_err = 0.0;
    int iterations = 0;
    double max_ratio = 0.0;
};
// <S^{-1} f, psi_i>, with the resynthesis error ||f - sum c_i psi_i|| / ||f||
ExpansionResult frame_expansion(const AtomFamily& fam, const SampledSignal& f, double tol, int maxit = 50);

struct NormingReport {
    double C1 = 0.0;  // lower bracket
    double C2 = 0.0;  // upper bracket
    RVec ratios;
};
NormingReport norming_check(const AtomFamily& fam, const BapuSystem& bapu, const std::vector<SampledSignal>& panel,
                            const SpaceParams& sp);

// Largest blend t in [0, t_max] (bisection, `steps` halvings) for which the Neumann residuals of every panel
// signal contract over `probe_iters` iterations; eps0 = t * eps(psi).
struct Eps0Report {
    double t = 0.0;
    double eps0 = 0.0;
};
Eps0Report epsilon0_search(const AtomFamily& phi, const AtomFamily& psi, double eps_psi,
                           const std::vector<SampledSignal>& panel, double t_max, int steps, int probe_iters);

}  // namespace amspec
