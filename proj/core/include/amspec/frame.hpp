#pragma once

#include <memory>
#include <string>
#include <vector>

#include "amspec/bapu.hpp"
#include "amspec/lattice.hpp"
#include "amspec/mixednorm.hpp"

namespace amspec {

// Dense coefficient vector over a finite (k,l) layout; entries off the layout are zero.
struct CoeffField {
    LayoutPtr layout;
    std::vector<cd> values;

    CoeffField() = default;
    explicit CoeffField(LayoutPtr L) : layout(std::move(L)), values(layout->size()) {}
    CoeffField(LayoutPtr L, std::vector<cd> v);

    cd& at(const IVec& k, const IVec& ell) { return values[layout->flat(k, ell)]; }
    cd at(const IVec& k, const IVec& ell) const { return values[layout->flat(k, ell)]; }
    double l2() const;
    CoeffField& operator+=(const CoeffField& o);
    CoeffField& operator-=(const CoeffField& o);
    CoeffField& operator*=(cd s);
};

CoeffField operator+(CoeffField a, const CoeffField& b);
CoeffField operator-(CoeffField a, const CoeffField& b);

// Frequency samples of a function on the window origin + [0,P)^n of unwrapped grid indices.
struct SpectralBlock {
    IVec origin;
    int P = 0;
    std::vector<cd> values;
};

// A finite family {psi_i} indexed by a layout on a sampling grid.
class AtomFamily {
public:
    virtual ~AtomFamily() = default;
    virtual const LayoutPtr& layout() const = 0;
    virtual const Grid& grid() const = 0;
    // c_i = <f, psi_i>
    virtual CoeffField analyze(const SampledSignal& f) const = 0;
    // sum_i c_i psi_i
    virtual SampledSignal synthesize(const CoeffField& c) const = 0;
    virtual SampledSignal atom(std::size_t idx) const = 0;
};

// Tight frame phi_{k,l} on the periodic grid: phi^_{k,l} = theta_k (2 a r~_k)^{-n/2} e^{-i x_{k,l}.(xi - xi_k)},
// with P_k = round(2 a r_k T/pi) translates per axis and P_k dxi = 2 a r~_k.
class FrameSystem : public AtomFamily {
public:
    FrameSystem(const AlphaGeometry& g, int kmax, const Grid& grid, BumpProfile prof = {});

    const LayoutPtr& layout() const override { return layout_; }
    const Grid& grid() const override { return grid_; }
    const BapuSystem& bapu() const { return bapu_; }
    const AlphaGeometry& geometry() const { return bapu_.geometry(); }

    CoeffField analyze(const SampledSignal& f) const override;
    SampledSignal synthesize(const CoeffField& c) const override;
    SampledSignal atom(std::size_t idx) const override;

    CoeffField analyze_spectrum(const std::vector<cd>& fhat) const;
    std::vector<cd> synthesize_spectrum(const CoeffField& c) const;

    SpectralBlock atom_freq(std::size_t idx) const;
    SpectralBlock atom_freq(const IVec& k, const IVec& ell) const { return atom_freq(layout_->flat(k, ell)); }
    // <u, phi_{b,l}> for every l of block b, in layout order, for u given by its spectral block
    std::vector<cd> analyze_block(std::size_t b, const SpectralBlock& u) const;

    const SpectralBlock& theta_block(std::size_t b) const { return theta_[b]; }
    // blocks whose theta windows overlap that of b
    const std::vector<std::size_t>& neighbours(std::size_t b) const { return bapu_.neighbours(b); }
    // frequencies with |xi|_inf below this lie where sum theta_k^2 = 1
    double band_radius() const { return bapu_.interior(); }

private:
    BapuSystem bapu_;
    Grid grid_;
    LayoutPtr layout_;
    std::vector<SpectralBlock> theta_;   // real theta_k on each window, stored complex for the kernels
    std::vector<double> scale_;          // (2 a r~_k)^{-n/2}
    std::vector<std::vector<cd>> phase_; // per block, per axis: e^{i l phi0} for local index t in [0,P)

    void block_coeffs(std::size_t b, std::vector<cd>& g, cd* out) const;
};

struct MoleculeAtom {
    SampledSignal values;
    RVec center;  // x_{k,l}
    RVec xi;      // xi_k
    double r = 1.0;
};

struct MoleculeCert {
    double M = 0.0;
    double N = 0.0;
    double C_M = 0.0;
    double K_N = 0.0;
    std::size_t atoms = 0;

    std::string to_json() const;
};

std::vector<MoleculeAtom> molecule_atoms(const AtomFamily& fam, const std::vector<std::size_t>& indices);

// C_M = max |psi(x)| (2a)^{n/2} r^{-n/2} (1 + r|x - x_kl|)^M, K_N = max |psi^(xi)| r^{n/2} (1 + |xi - xi_k|/r)^N;
// distances are minimum-image on the periodic grid.
MoleculeCert envelope_fit(const std::vector<MoleculeAtom>& atoms, double a, double M, double N);

struct TightFrameReport {
    double parseval_err = 0.0;
    double recon_err = 0.0;
};
TightFrameReport tight_frame_check(const FrameSystem& fs, const std::vector<SampledSignal>& panel);

// Band-limited, time-concentrated test signals: Gaussian packets whose spectrum (to 1e-16) lies inside the
// frame's tight band and whose mass lies in [-T/2, T/2]^n.
std::vector<SampledSignal> band_limited_panel(const FrameSystem& fs, std::size_t count, std::uint64_t seed);

}  // namespace amspec
