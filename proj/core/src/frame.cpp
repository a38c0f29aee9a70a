#include "amspec/frame.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include <nlohmann/json.hpp>

#include "amspec/fft.hpp"

namespace amspec {

CoeffField::CoeffField(LayoutPtr L, std::vector<cd> v) : layout(std::move(L)), values(std::move(v)) {
    if (values.size() != layout->size()) throw DimensionMismatch("coefficient count does not match the layout");
}

double CoeffField::l2() const {
    double s = 0.0;
    for (const cd& v : values) s += std::norm(v);
    return std::sqrt(s);
}

CoeffField& CoeffField::operator+=(const CoeffField& o) {
    if (!layout->same_as(*o.layout)) throw DimensionMismatch("coefficient layouts differ");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

CoeffField& CoeffField::operator-=(const CoeffField& o) {
    if (!layout->same_as(*o.layout)) throw DimensionMismatch("coefficient layouts differ");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

CoeffField& CoeffField::operator*=(cd s) {
    for (cd& v : values) v *= s;
    return *this;
}

CoeffField operator+(CoeffField a, const CoeffField& b) { return a += b; }
CoeffField operator-(CoeffField a, const CoeffField& b) { return a -= b; }

namespace {

// local window offset t (row-major over [0,P)^n) -> unwrapped grid index vector origin + t
void unflatten(std::size_t loc, int P, int n, int* t) {
    for (int i = n - 1; i >= 0; --i) {
        t[i] = int(loc % std::size_t(P));
        loc /= std::size_t(P);
    }
}

std::size_t grid_slot(const IVec& origin, const int* t, int n, int N) {
    std::size_t s = 0;
    for (int i = 0; i < n; ++i) s = s * std::size_t(N) + std::size_t(wrap_index(long(origin[i]) + t[i], N));
    return s;
}

}  // namespace

FrameSystem::FrameSystem(const AlphaGeometry& g, int kmax, const Grid& grid, BumpProfile prof)
    : bapu_(g, Truncation{kmax, grid.T, 0}, prof), grid_(grid) {
    grid.validate();
    require(grid.dim == g.dim, "grid dimension differs from the geometry dimension");
    if (grid.nyquist() < 1.25 * bapu_.outer_radius())
        throw NyquistViolation("grid frequency reach " + std::to_string(grid.nyquist()) +
                               " is below 1.25 x outer cover radius " + std::to_string(bapu_.outer_radius()));
    layout_ = TFLayout::periodic(g, kmax, grid.T);
    const int n = g.dim;
    // theta_b uses every bump of the full cover that meets supp phi_b, including those beyond kmax, so edge
    // windows fall off smoothly instead of jumping to 0 at the rim of phi_b.
    int pad = 1;
    std::unique_ptr<BapuSystem> ext;
    for (;; ++pad) {
        ext = std::make_unique<BapuSystem>(g, Truncation{kmax + pad, grid.T, 0}, prof);
        int reach = 0;
        for (const auto& k : freq_indices(n, kmax))
            for (std::size_t j : ext->neighbours(freq_position(k, kmax + pad)))
                for (int v : ext->k(j)) reach = std::max(reach, std::abs(v));
        if (reach < kmax + pad) break;
    }
    const double dxi = grid.dxi();
    const std::size_t K = layout_->num_blocks();
    theta_.resize(K);
    scale_.resize(K);
    phase_.resize(K);
    parallel_for(K, [&](std::size_t b) {
        const KBlock& B = layout_->block(b);
        if (B.P > grid.N) throw NyquistViolation("translation count exceeds the grid size");
        SpectralBlock& W = theta_[b];
        W.P = B.P;
        W.origin.resize(n);
        for (int i = 0; i < n; ++i) {
            W.origin[i] = int(std::lround(B.xi[i] / dxi)) - B.P / 2;
            const double R = bapu_.support_radius(b);
            if (W.origin[i] * dxi > B.xi[i] - R || (W.origin[i] + B.P - 1) * dxi < B.xi[i] + R)
                throw PreconditionFailed("spectral window does not contain the bump support");
        }
        W.values.assign(B.count, 0.0);
        std::vector<int> t(n);
        RVec xi(n);
        for (std::size_t loc = 0; loc < B.count; ++loc) {
            unflatten(loc, B.P, n, t.data());
            for (int i = 0; i < n; ++i) xi[i] = (W.origin[i] + t[i]) * dxi;
            W.values[loc] = ext->theta_raw(xi, freq_position(B.k, kmax + pad));
        }
        scale_[b] = std::pow(B.P * dxi, -n / 2.0);
        // phi0 = step (o dxi - xi_k) per axis; phase e^{i l phi0} at DFT slot l mod P
        phase_[b].assign(std::size_t(n) * B.P, 0.0);
        for (int i = 0; i < n; ++i) {
            const double phi0 = B.step * (W.origin[i] * dxi - B.xi[i]);
            for (int tl = 0; tl < B.P; ++tl) {
                const int ell = B.lo + tl;
                phase_[b][std::size_t(i) * B.P + std::size_t(wrap_index(ell, B.P))] = std::polar(1.0, ell * phi0);
            }
        }
    });
}

// g holds (u theta_b) on the window; writes <u, phi_{b,l}> in layout order to out.
void FrameSystem::block_coeffs(std::size_t b, std::vector<cd>& g, cd* out) const {
    const KBlock& B = layout_->block(b);
    const int n = grid_.dim;
    fft::transform(g, IVec(n, B.P), +1);
    const double c = std::pow(grid_.dxi(), n) * scale_[b];
    std::vector<int> t(n);
    for (std::size_t loc = 0; loc < B.count; ++loc) {
        unflatten(loc, B.P, n, t.data());
        std::size_t slot = 0;
        cd ph = c;
        for (int i = 0; i < n; ++i) {
            const int s = wrap_index(B.lo + t[i], B.P);
            slot = slot * std::size_t(B.P) + std::size_t(s);
            ph *= phase_[b][std::size_t(i) * B.P + std::size_t(s)];
        }
        out[loc] = g[slot] * ph;
    }
}

CoeffField FrameSystem::analyze_spectrum(const std::vector<cd>& fhat) const {
    if (fhat.size() != grid_.size()) throw DimensionMismatch("spectrum size does not match the grid");
    CoeffField c(layout_);
    const int n = grid_.dim;
    parallel_for(layout_->num_blocks(), [&](std::size_t b) {
        const KBlock& B = layout_->block(b);
        const SpectralBlock& W = theta_[b];
        std::vector<cd> g(B.count);
        std::vector<int> t(n);
        for (std::size_t loc = 0; loc < B.count; ++loc) {
            if (W.values[loc] == 0.0) continue;
            unflatten(loc, B.P, n, t.data());
            g[loc] = fhat[grid_slot(W.origin, t.data(), n, grid_.N)] * W.values[loc].real();
        }
        block_coeffs(b, g, c.values.data() + B.offset);
    });
    return c;
}

CoeffField FrameSystem::analyze(const SampledSignal& f) const {
    if (f.grid != grid_) throw DimensionMismatch("signal grid does not match the frame grid");
    return analyze_spectrum(to_spectrum(f));
}

std::vector<cd> FrameSystem::analyze_block(std::size_t b, const SpectralBlock& u) const {
    const KBlock& B = layout_->block(b);
    const SpectralBlock& W = theta_[b];
    const int n = grid_.dim;
    std::vector<cd> g(B.count);
    std::vector<int> t(n);
    for (std::size_t loc = 0; loc < B.count; ++loc) {
        if (W.values[loc] == 0.0) continue;
        unflatten(loc, B.P, n, t.data());
        std::size_t uloc = 0;
        bool inside = true;
        for (int i = 0; i < n; ++i) {
            const int d = W.origin[i] + t[i] - u.origin[i];
            if (d < 0 || d >= u.P) {
                inside = false;
                break;
            }
            uloc = uloc * std::size_t(u.P) + std::size_t(d);
        }
        if (inside) g[loc] = u.values[uloc] * W.values[loc].real();
    }
    std::vector<cd> out(B.count);
    block_coeffs(b, g, out.data());
    return out;
}

std::vector<cd> FrameSystem::synthesize_spectrum(const CoeffField& c) const {
    if (!c.layout->same_as(*layout_)) throw DimensionMismatch("coefficient layout does not match the frame");
    const int n = grid_.dim;
    const std::size_t K = layout_->num_blocks();
    std::vector<std::vector<cd>> parts(K);
    parallel_for(K, [&](std::size_t b) {
        const KBlock& B = layout_->block(b);
        std::vector<cd>& d = parts[b];
        d.assign(B.count, 0.0);
        std::vector<int> t(n);
        for (std::size_t loc = 0; loc < B.count; ++loc) {
            unflatten(loc, B.P, n, t.data());
            std::size_t slot = 0;
            cd ph = 1.0;
            for (int i = 0; i < n; ++i) {
                const int s = wrap_index(B.lo + t[i], B.P);
                slot = slot * std::size_t(B.P) + std::size_t(s);
                ph *= std::conj(phase_[b][std::size_t(i) * B.P + std::size_t(s)]);
            }
            d[slot] = c.values[B.offset + loc] * ph;
        }
        fft::transform(d, IVec(n, B.P), -1);
        for (std::size_t loc = 0; loc < B.count; ++loc) d[loc] *= scale_[b] * theta_[b].values[loc].real();
    });
    // fixed block order keeps the accumulation schedule independent
    std::vector<cd> fhat(grid_.size());
    std::vector<int> t(n);
    for (std::size_t b = 0; b < K; ++b) {
        const SpectralBlock& W = theta_[b];
        for (std::size_t loc = 0; loc < parts[b].size(); ++loc) {
            if (W.values[loc] == 0.0) continue;
            unflatten(loc, W.P, n, t.data());
            fhat[grid_slot(W.origin, t.data(), n, grid_.N)] += parts[b][loc];
        }
    }
    return fhat;
}

SampledSignal FrameSystem::synthesize(const CoeffField& c) const {
    return from_spectrum(grid_, synthesize_spectrum(c));
}

SpectralBlock FrameSystem::atom_freq(std::size_t idx) const {
    if (idx >= layout_->size()) throw IndexOutOfTruncation("atom index outside truncation");
    const std::size_t b = layout_->block_of_flat(idx);
    const KBlock& B = layout_->block(b);
    const IVec ell = layout_->ell_of(idx);
    const int n = grid_.dim;
    SpectralBlock out = theta_[b];
    std::vector<int> t(n);
    for (std::size_t loc = 0; loc < B.count; ++loc) {
        if (out.values[loc] == 0.0) continue;
        unflatten(loc, B.P, n, t.data());
        double arg = 0.0;
        for (int i = 0; i < n; ++i) {
            const double phi0 = B.step * (out.origin[i] * grid_.dxi() - B.xi[i]);
            arg += ell[i] * phi0 + 2.0 * kPi * double((long(ell[i]) * t[i]) % B.P) / B.P;
        }
        out.values[loc] *= scale_[b] * std::polar(1.0, -arg);
    }
    return out;
}

SampledSignal FrameSystem::atom(std::size_t idx) const {
    const SpectralBlock s = atom_freq(idx);
    const int n = grid_.dim;
    std::vector<cd> fhat(grid_.size());
    std::vector<int> t(n);
    for (std::size_t loc = 0; loc < s.values.size(); ++loc) {
        if (s.values[loc] == 0.0) continue;
        unflatten(loc, s.P, n, t.data());
        fhat[grid_slot(s.origin, t.data(), n, grid_.N)] += s.values[loc];
    }
    return from_spectrum(grid_, std::move(fhat));
}

std::vector<MoleculeAtom> molecule_atoms(const AtomFamily& fam, const std::vector<std::size_t>& indices) {
    const TFLayout& L = *fam.layout();
    std::vector<MoleculeAtom> out(indices.size());
    parallel_for(indices.size(), [&](std::size_t i) {
        const std::size_t b = L.block_of_flat(indices[i]);
        out[i].values = fam.atom(indices[i]);
        out[i].center = L.center(indices[i]);
        out[i].xi = L.block(b).xi;
        out[i].r = L.block(b).r;
    });
    return out;
}

std::string MoleculeCert::to_json() const {
    nlohmann::json j;
    j["M"] = M;
    j["N"] = N;
    j["C_M"] = C_M;
    j["K_N"] = K_N;
    j["atoms"] = atoms;
    return j.dump(2);
}

MoleculeCert envelope_fit(const std::vector<MoleculeAtom>& atoms, double a, double M, double N) {
    MoleculeCert cert;
    cert.M = M;
    cert.N = N;
    cert.atoms = atoms.size();
    RVec cm(atoms.size(), 0.0), kn(atoms.size(), 0.0);
    parallel_for(atoms.size(), [&](std::size_t ai) {
        const MoleculeAtom& A = atoms[ai];
        const Grid& g = A.values.grid;
        const int n = g.dim;
        const double pre = std::pow(2.0 * a, n / 2.0) * std::pow(A.r, -n / 2.0);
        std::vector<int> id(n);
        for (std::size_t s = 0; s < g.size(); ++s) {
            std::size_t rem = s;
            double d2 = 0.0;
            for (int i = n - 1; i >= 0; --i) {
                id[i] = int(rem % std::size_t(g.N));
                rem /= std::size_t(g.N);
                double d = std::abs(g.x(id[i]) - A.center[i]);
                d = std::fmod(d, 2.0 * g.T);
                d = std::min(d, 2.0 * g.T - d);
                d2 += d * d;
            }
            cm[ai] = std::max(cm[ai], std::abs(A.values.values[s]) * pre * std::pow(1.0 + A.r * std::sqrt(d2), M));
        }
        const std::vector<cd> spec = to_spectrum(A.values);
        const double pre2 = std::pow(A.r, n / 2.0);
        for (std::size_t s = 0; s < spec.size(); ++s) {
            std::size_t rem = s;
            double d2 = 0.0;
            for (int i = n - 1; i >= 0; --i) {
                const double xi = signed_index(int(rem % std::size_t(g.N)), g.N) * g.dxi();
                rem /= std::size_t(g.N);
                d2 += (xi - A.xi[i]) * (xi - A.xi[i]);
            }
            kn[ai] = std::max(kn[ai], std::abs(spec[s]) * pre2 * std::pow(1.0 + std::sqrt(d2) / A.r, N));
        }
    });
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        cert.C_M = std::max(cert.C_M, cm[i]);
        cert.K_N = std::max(cert.K_N, kn[i]);
    }
    return cert;
}

TightFrameReport tight_frame_check(const FrameSystem& fs, const std::vector<SampledSignal>& panel) {
    TightFrameReport rep;
    for (const auto& f : panel) {
        const double nf = f.l2();
        if (nf == 0.0) continue;
        const CoeffField c = fs.analyze(f);
        const double e = c.l2();
        rep.parseval_err = std::max(rep.parseval_err, std::abs(e * e - nf * nf) / (nf * nf));
        rep.recon_err = std::max(rep.recon_err, (f - fs.synthesize(c)).l2() / nf);
    }
    return rep;
}

std::vector<SampledSignal> band_limited_panel(const FrameSystem& fs, std::size_t count, std::uint64_t seed) {
    const Grid& g = fs.grid();
    const int n = g.dim;
    const double B = std::min(fs.band_radius(), g.nyquist());
    require(B > 0.0, "frame has an empty tight band");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    // Gaussian spectrum e^{-w^2|xi-omega|^2/2} cut at the band edge where it is below e^{-18}
    const double width = std::min(6.0 / (B / 2.0), g.T / 12.0);
    std::vector<SampledSignal> out;
    for (std::size_t s = 0; s < count; ++s) {
        std::vector<cd> spec(g.size());
        for (int p = 0; p < 3; ++p) {
            RVec omega(n), x0(n);
            for (int i = 0; i < n; ++i) {
                omega[i] = U(rng) * B / 2.0;
                x0[i] = U(rng) * g.T / 4.0;
            }
            const cd amp = std::polar(0.5 + 0.5 * std::abs(U(rng)), kPi * U(rng));
            for (std::size_t idx = 0; idx < spec.size(); ++idx) {
                std::size_t rem = idx;
                double d2 = 0.0, ph = 0.0;
                bool inside = true;
                for (int i = n - 1; i >= 0; --i) {
                    const double xi = signed_index(int(rem % std::size_t(g.N)), g.N) * g.dxi();
                    rem /= std::size_t(g.N);
                    if (std::abs(xi) >= B) inside = false;
                    d2 += (xi - omega[i]) * (xi - omega[i]);
                    ph -= x0[i] * xi;
                }
                if (inside) spec[idx] += amp * std::exp(-0.5 * width * width * d2) * std::polar(1.0, ph);
            }
        }
        out.push_back(from_spectrum(g, std::move(spec)));
    }
    return out;
}

}  // namespace amspec
