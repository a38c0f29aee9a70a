#include "amspec/csupp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <nlohmann/json.hpp>

#include "amspec/fft.hpp"

namespace amspec {

namespace {

double binomial(int p, int j) {
    double c = 1.0;
    for (int i = 1; i <= j; ++i) c = c * (p - j + i) / i;
    return c;
}

}  // namespace

double GeneratorG::eval1(double x) const {
    const int p = order;
    if (x <= 0.0 || x >= p) return 0.0;
    // symmetric about p/2; evaluating on the left half keeps the alternating sum short
    if (x > 0.5 * p) x = p - x;
    double fact = 1.0;
    for (int i = 2; i < p; ++i) fact *= i;
    double s = 0.0;
    for (int j = 0; j <= int(std::floor(x)); ++j) {
        double pw = 1.0;
        for (int e = 1; e < p; ++e) pw *= x - j;
        s += ((j & 1) ? -1.0 : 1.0) * binomial(p, j) * pw;
    }
    return s / fact;
}

double GeneratorG::eval(const RVec& x) const {
    if (int(x.size()) != dim) throw DimensionMismatch("generator argument dimension");
    double v = 1.0;
    for (double xi : x) v *= eval1(xi);
    return v;
}

cd GeneratorG::hat1(double xi) const {
    // ((1 - e^{-i xi}) / (i xi))^p = e^{-i p xi/2} sinc(xi/2)^p
    const double u = 0.5 * xi;
    const double sinc = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
    return std::polar(std::pow(sinc, order), -order * u);
}

cd GeneratorG::hat(const RVec& xi) const {
    if (int(xi.size()) != dim) throw DimensionMismatch("generator frequency dimension");
    cd v = 1.0;
    for (double z : xi) v *= hat1(z);
    return v;
}

double GeneratorG::fitted_decay_exponent() const {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int j = 8; j <= 512; ++j) {
        const double xi = (2 * j + 1) * kPi;
        const double lx = std::log1p(xi), ly = std::log(std::abs(hat1(xi)));
        sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
        ++cnt;
    }
    return -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

GeneratorG bspline_generator(int order, int dim) {
    require(order >= 3, "B-spline order must be at least 3 (C^1 generator)");
    require(dim >= 1, "generator dimension must be positive");
    return {order, dim};
}

cd KTermApprox::eval(double y) const {
    const std::size_t K = a.size();
    if (K == 0) return 0.0;
    const double wsup = double(g.order) / m;
    // basis i is live when 0 < y + b0 + i db < wsup
    long i0 = 0, i1 = long(K) - 1;
    if (db != 0.0) {
        double t0 = (-y - b0) / db, t1 = (wsup - y - b0) / db;
        if (t0 > t1) std::swap(t0, t1);
        i0 = std::max(0L, long(std::floor(t0)));
        i1 = std::min(long(K) - 1, long(std::ceil(t1)));
    }
    cd s = 0.0;
    for (long i = i0; i <= i1; ++i) {
        const double v = g.eval1(m * (y + b0 + i * db));
        if (v != 0.0) s += a[std::size_t(i)] * (m * v);
    }
    return s;
}

double KTermApprox::support_lo() const {
    if (a.empty()) return 0.0;
    return -std::max(b0, b0 + (double(a.size()) - 1.0) * db);
}

double KTermApprox::support_hi() const {
    if (a.empty()) return 0.0;
    return -std::min(b0, b0 + (double(a.size()) - 1.0) * db) + double(g.order) / m;
}

FitWeights corollary_exponents(const AdParams& par) {
    const double J = par.J(), d = par.delta;
    const double N = 2.0 * (J + d);
    return {N, N + (2.0 / par.beta) * (std::abs(par.s) + 2.0 * J + 1.5 * d)};
}

std::string TauFit::to_json() const {
    nlohmann::json j;
    j["K"] = tau.K();
    j["m"] = tau.m;
    j["eps"] = eps;
    j["eps_space"] = eps_space;
    j["eps_freq"] = eps_freq;
    j["l2_rel"] = l2_rel;
    j["window"] = window;
    return j.dump();
}

namespace {

// tau^ on the DFT frequencies of `gy`, exact: tau^(eta) = g^(eta/m) e^{i eta b0} sum_i a_i e^{i eta i db}, with
// db = -q h so that the sum is a length-N DFT.
std::vector<cd> tau_spectrum(const KTermApprox& tau, const Grid& gy, int q) {
    const int Ny = gy.N;
    std::vector<cd> A(std::size_t(Ny), 0.0);
    for (std::size_t i = 0; i < tau.K(); ++i) A[std::size_t(wrap_index(long(i) * q, Ny))] += tau.a[i];
    fft::transform(A, IVec{Ny}, -1);
    std::vector<cd> out(static_cast<std::size_t>(Ny));
    for (int s = 0; s < Ny; ++s) {
        const double eta = signed_index(s, Ny) * gy.dxi();
        out[std::size_t(s)] = tau.g.hat1(eta / tau.m) * std::polar(1.0, eta * tau.b0) * A[std::size_t(s)];
    }
    return out;
}

int shift_stride(const KTermApprox& tau, const Grid& gy) {
    if (tau.K() <= 1) return 0;
    const double q = -tau.db / gy.h();
    const int qi = int(std::lround(q));
    require(qi >= 1 && std::abs(q - qi) < 1e-9, "shift spacing must be a positive multiple of the sample spacing");
    return qi;
}

}  // namespace

TauFit tau_errors(const SampledSignal& mu, const KTermApprox& tau, const FitWeights& w) {
    require(mu.grid.dim == 1, "envelope fits are one-dimensional");
    const Grid& gy = mu.grid;
    TauFit out;
    out.tau = tau;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < gy.N; ++i) {
        const double y = gy.x(i);
        const cd d = mu.values[std::size_t(i)] - tau.eval(y);
        out.eps_space = std::max(out.eps_space, std::abs(d) * std::pow(1.0 + std::abs(y), w.N_env));
        num += std::norm(d);
        den += std::norm(mu.values[std::size_t(i)]);
    }
    out.l2_rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    // mu is band limited well inside Nyquist, so its DFT is its transform; rescale to the integral convention
    std::vector<cd> mhat = to_spectrum(mu);
    const double c = std::sqrt(2.0 * kPi);
    const std::vector<cd> that = tau_spectrum(tau, gy, shift_stride(tau, gy));
    for (int s = 0; s < gy.N; ++s) {
        const double eta = signed_index(s, gy.N) * gy.dxi();
        const double d = std::abs(c * mhat[std::size_t(s)] - that[std::size_t(s)]);
        out.eps_freq = std::max(out.eps_freq, d * std::pow(1.0 + std::abs(eta), w.M_env));
    }
    out.eps = std::max(out.eps_space, out.eps_freq);
    const double span = tau.K() > 1 ? -(double(tau.K()) - 1.0) * tau.db : 0.0;
    out.window = 0.5 * span;
    return out;
}

TauFit fit_tau(const SampledSignal& mu, const GeneratorG& g, std::size_t K, int m, const FitWeights& w,
               double window, double tol) {
    require(mu.grid.dim == 1 && g.dim == 1, "envelope fits are one-dimensional");
    require(m >= 1, "dilation m must be positive");
    const Grid& gy = mu.grid;
    const double Y = gy.T, hy = gy.h();
    const double wsup = double(g.order) / m;

    if (window <= 0.0) {
        // smallest radius with relative L2 tail <= 1e-9
        std::vector<std::pair<double, double>> e(std::size_t(gy.N));
        double tot = 0.0;
        for (int i = 0; i < gy.N; ++i) {
            e[std::size_t(i)] = {std::abs(gy.x(i)), std::norm(mu.values[std::size_t(i)])};
            tot += e[std::size_t(i)].second;
        }
        std::sort(e.begin(), e.end());
        double tail = 0.0, yeff = 0.0;
        for (std::size_t i = e.size(); i-- > 0;) {
            tail += e[i].second;
            if (tail > 1e-18 * tot) {
                yeff = e[i].first;
                break;
            }
        }
        window = 1.5 * yeff;
    }
    // envelope grids carry 8 guard samples past the period on each side
    window = std::min(window, Y - 8.0 * hy - wsup);

    // K = 0: centres c_i = -b_i at spacing 1/m over the window; K > 0: K centres equispaced over the window.
    // Spacings are whole multiples q of the sample step, so tau^ is an exact DFT.
    KTermApprox tau;
    tau.m = m;
    tau.g = g;
    int q = 1;
    if (K == 0) {
        const double qd = 1.0 / (m * hy);
        q = int(std::lround(qd));
        require(q >= 1 && std::abs(qd - q) < 1e-9 * qd, "envelope sample spacing must be 1/(q m)");
        K = std::size_t(std::floor(2.0 * window * m + 1e-9)) + 1;
    } else if (K > 1) {
        q = std::max(1, int(std::lround(2.0 * window / (double(K - 1) * hy))));
    }
    const double W = 0.5 * double(K - 1) * q * hy;
    require(W + wsup <= Y, "fit window does not fit in the sample range");
    tau.b0 = W;
    tau.db = K > 1 ? -q * hy : 0.0;
    tau.a.assign(K, 0.0);

    // weighted least squares on the samples meeting some basis support
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rre = Eigen::VectorXd::Zero(long(K)), rim = Eigen::VectorXd::Zero(long(K));
    std::vector<std::pair<long, double>> live;
    KTermApprox probe = tau;
    for (int s = 0; s < gy.N; ++s) {
        const double y = gy.x(s);
        if (y <= -W || y >= W + wsup) continue;
        live.clear();
        long i0 = 0, i1 = long(K) - 1;
        if (K > 1) {
            double t0 = (-y - tau.b0) / tau.db, t1 = (wsup - y - tau.b0) / tau.db;
            if (t0 > t1) std::swap(t0, t1);
            i0 = std::max(0L, long(std::floor(t0)));
            i1 = std::min(long(K) - 1, long(std::ceil(t1)));
        }
        for (long i = i0; i <= i1; ++i) {
            const double v = m * g.eval1(m * (y + tau.b0 + double(i) * tau.db));
            if (v != 0.0) live.push_back({i, v});
        }
        if (live.empty()) continue;
        const double wt = std::pow(1.0 + std::abs(y), 2.0 * w.N_env);
        const cd f = mu.values[std::size_t(s)];
        for (const auto& [i, v] : live) {
            rre[i] += wt * v * f.real();
            rim[i] += wt * v * f.imag();
            for (const auto& [j, u] : live) trip.emplace_back(int(i), int(j), wt * v * u);
        }
    }
    Eigen::SparseMatrix<double> A{long(K), long(K)};
    A.setFromTriplets(trip.begin(), trip.end());
    // a relative ridge far below round-off; centres without samples get a unit diagonal
    for (long i = 0; i < long(K); ++i) {
        const double d = A.coeff(i, i);
        A.coeffRef(i, i) += d > 0.0 ? 1e-15 * d : 1.0;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw TargetNotReached("normal equations of the envelope fit are singular");
    const Eigen::VectorXd xr = solver.solve(rre), xi = solver.solve(rim);
    for (std::size_t i = 0; i < K; ++i) tau.a[i] = cd(xr[long(i)], xi[long(i)]);

    TauFit out = tau_errors(mu, tau, w);
    out.window = W;
    if (out.eps > tol)
        throw TargetNotReached("envelope fit eps " + std::to_string(out.eps) + " above target " +
                               std::to_string(tol));
    return out;
}

SampledSignal envelope_samples(const FrameSystem& fs, std::size_t block, double hy) {
    const Grid& g = fs.grid();
    require(g.dim == 1, "envelope samples are one-dimensional");
    require(hy > 0.0, "envelope sample spacing must be positive");
    const TFLayout& L = *fs.layout();
    const KBlock& B = L.block(block);
    const double r = B.r;
    const int half = int(std::ceil(r * g.T / hy)) + 8;
    const Grid gy{1, half * hy, 2 * half};
    const SpectralBlock s = fs.atom_freq(L.flat(B.k, IVec{0}));
    // phi_{k,0}(x) = (2 pi)^{-1/2} dxi sum_t phi^_t e^{i xi_t x}; omega_t = (xi_t - xi_k)/r is the y frequency
    std::vector<cd> z, rot;
    RVec omega;
    for (int t = 0; t < s.P; ++t) {
        if (s.values[std::size_t(t)] == 0.0) continue;
        omega.push_back(((s.origin[0] + t) * g.dxi() - B.xi[0]) / r);
        z.push_back(s.values[std::size_t(t)]);
        rot.push_back(std::polar(1.0, omega.back() * hy));
    }
    const double c = std::sqrt(2.0 * L.geometry().a / r) * g.dxi() / std::sqrt(2.0 * kPi);
    SampledSignal mu(gy);
    std::vector<cd> cur(z.size());
    for (int i = 0; i < gy.N; ++i) {
        // re-anchor the rotations every 256 samples
        if (i % 256 == 0)
            for (std::size_t t = 0; t < z.size(); ++t) cur[t] = z[t] * std::polar(1.0, omega[t] * gy.x(i));
        cd acc = 0.0;
        for (std::size_t t = 0; t < z.size(); ++t) {
            acc += cur[t];
            cur[t] *= rot[t];
        }
        mu.values[std::size_t(i)] = c * acc;
    }
    return mu;
}

Profile Profile::from_kterm(KTermApprox t) {
    Profile p;
    p.kterm = std::move(t);
    return p;
}

Profile Profile::from_samples(SampledSignal mu, double ylo, double yhi) {
    require(mu.grid.dim == 1, "sampled profiles are one-dimensional");
    require(-mu.grid.T + 4.0 * mu.grid.h() <= ylo && yhi <= mu.grid.T - 4.0 * mu.grid.h(),
            "profile range needs a full stencil of samples");
    Profile p;
    p.sampled = true;
    p.samples = std::move(mu);
    p.ylo = ylo;
    p.yhi = yhi;
    return p;
}

cd Profile::eval(double y) const {
    if (!sampled) return kterm.eval(y);
    const Grid& g = samples.grid;
    const double t = (y + g.T) / g.h();
    if (y < ylo || y >= yhi) return 0.0;
    // 8-point Lagrange stencil
    const long i0 = long(std::floor(t)) - 3;
    cd s = 0.0;
    for (int j = 0; j < 8; ++j) {
        const cd v = samples.values[std::size_t(i0 + j)];
        double wgt = 1.0;
        for (int k = 0; k < 8; ++k)
            if (k != j) wgt *= (t - double(i0 + k)) / double(j - k);
        s += wgt * v;
    }
    return s;
}

double Profile::lo() const { return sampled ? ylo : kterm.support_lo(); }
double Profile::hi() const { return sampled ? yhi : kterm.support_hi(); }

PerturbedFamily::PerturbedFamily(const FrameSystem& fs, std::vector<Profile> taus, double eps)
    : fs_(fs), taus_(std::move(taus)), eps_(eps) {
    require(fs.grid().dim == 1, "compactly supported families are one-dimensional");
    require(taus_.size() == fs.layout()->num_blocks(), "one envelope per frequency block");
    for (std::size_t b = 0; b < taus_.size(); ++b) {
        const Profile& p = taus_[b];
        if (p.sampled) continue;
        const double width = (p.hi() - p.lo()) / fs.layout()->block(b).r;
        require(width < 2.0 * fs.grid().T, "envelope support exceeds the period");
    }
}

std::pair<double, double> PerturbedFamily::support_box(std::size_t idx) const {
    const TFLayout& L = *fs_.layout();
    const std::size_t b = L.block_of_flat(idx);
    const double r = L.block(b).r;
    const double xl = L.center(idx)[0];
    return {xl + taus_[b].lo() / r, xl + taus_[b].hi() / r};
}

template <class F>
void PerturbedFamily::for_each_sample(std::size_t idx, F&& f) const {
    const TFLayout& L = *fs_.layout();
    const Grid& g = fs_.grid();
    const std::size_t b = L.block_of_flat(idx);
    const KBlock& B = L.block(b);
    const Profile& prof = taus_[b];
    const double r = B.r, h = g.h(), xl = L.center(idx)[0], xi = B.xi[0];
    const cd coef = std::sqrt(r / (2.0 * L.geometry().a));
    const double lo = prof.lo() / r, hi = prof.hi() / r;
    const long u0 = long(std::ceil((xl + lo + g.T) / h));
    long u1 = prof.sampled ? long(std::ceil((xl + hi + g.T) / h)) - 1 : long(std::floor((xl + hi + g.T) / h));
    u1 = std::min(u1, u0 + g.N - 1);
    // e^{i xi x} advanced by a fixed rotation, re-anchored every 64 samples
    const cd rot = std::polar(1.0, xi * h);
    cd ph;
    for (long u = u0; u <= u1; ++u) {
        const double x = -g.T + double(u) * h;
        ph = ((u - u0) % 64 == 0) ? std::polar(1.0, xi * x) : ph * rot;
        const cd v = prof.eval(r * (x - xl));
        if (v != 0.0) f(std::size_t(wrap_index(u, g.N)), coef * v * ph);
    }
}

CoeffField PerturbedFamily::analyze(const SampledSignal& f) const {
    if (f.grid != fs_.grid()) throw DimensionMismatch("signal grid differs from the family grid");
    CoeffField c(fs_.layout());
    const double h = f.grid.h();
    parallel_for(c.values.size(), [&](std::size_t idx) {
        cd s = 0.0;
        for_each_sample(idx, [&](std::size_t slot, cd v) { s += f.values[slot] * std::conj(v); });
        c.values[idx] = h * s;
    });
    return c;
}

SampledSignal PerturbedFamily::synthesize(const CoeffField& c) const {
    if (!c.layout->same_as(*fs_.layout())) throw DimensionMismatch("coefficient layout differs from the family");
    const TFLayout& L = *fs_.layout();
    std::vector<std::vector<cd>> part(L.num_blocks());
    parallel_for(L.num_blocks(), [&](std::size_t b) {
        const KBlock& B = L.block(b);
        part[b].assign(fs_.grid().size(), 0.0);
        for (std::size_t i = 0; i < B.count; ++i) {
            const cd cv = c.values[B.offset + i];
            if (cv == 0.0) continue;
            for_each_sample(B.offset + i, [&](std::size_t slot, cd v) { part[b][slot] += cv * v; });
        }
    });
    SampledSignal out(fs_.grid());
    for (const auto& p : part)
        for (std::size_t i = 0; i < p.size(); ++i) out.values[i] += p[i];
    return out;
}

SampledSignal PerturbedFamily::atom(std::size_t idx) const {
    if (idx >= fs_.layout()->size()) throw IndexOutOfTruncation("atom index outside truncation");
    SampledSignal out(fs_.grid());
    for_each_sample(idx, [&](std::size_t slot, cd v) { out.values[slot] += v; });
    return out;
}

PerturbedBuild build_perturbed_family(const FrameSystem& fs, const GeneratorG& g, std::size_t K, int m,
                                      const FitWeights& w, double hy, double window) {
    const TFLayout& L = *fs.layout();
    PerturbedBuild out;
    out.fits.resize(L.num_blocks());
    parallel_for(L.num_blocks(), [&](std::size_t b) {
        out.fits[b] = fit_tau(envelope_samples(fs, b, hy), g, K, m, w, window);
    });
    std::vector<Profile> prof;
    for (const auto& f : out.fits) {
        prof.push_back(Profile::from_kterm(f.tau));
        out.eps = std::max(out.eps, f.eps);
    }
    out.family = std::make_unique<PerturbedFamily>(fs, std::move(prof), out.eps);
    return out;
}

PerturbedBuild exact_envelope_family(const FrameSystem& fs, double hy) {
    const TFLayout& L = *fs.layout();
    std::vector<Profile> prof(L.num_blocks());
    parallel_for(L.num_blocks(), [&](std::size_t b) {
        const double Y = L.block(b).r * fs.grid().T;
        prof[b] = Profile::from_samples(envelope_samples(fs, b, hy), -Y, Y);
    });
    PerturbedBuild out;
    out.fits.resize(L.num_blocks());
    out.family = std::make_unique<PerturbedFamily>(fs, std::move(prof), 0.0);
    return out;
}

PerturbedBuild zero_family(const FrameSystem& fs) {
    const TFLayout& L = *fs.layout();
    std::vector<Profile> prof(L.num_blocks(), Profile::from_kterm(KTermApprox{}));
    PerturbedBuild out;
    out.fits.resize(L.num_blocks());
    out.family = std::make_unique<PerturbedFamily>(fs, std::move(prof), INFINITY);
    return out;
}

DifferenceFamily::DifferenceFamily(const AtomFamily& a, const AtomFamily& b) : a_(a), b_(b) {
    if (!a.layout()->same_as(*b.layout()) || a.grid() != b.grid())
        throw DimensionMismatch("difference of families on different layouts");
}
CoeffField DifferenceFamily::analyze(const SampledSignal& f) const { return a_.analyze(f) - b_.analyze(f); }
SampledSignal DifferenceFamily::synthesize(const CoeffField& c) const { return a_.synthesize(c) - b_.synthesize(c); }
SampledSignal DifferenceFamily::atom(std::size_t idx) const { return a_.atom(idx) - b_.atom(idx); }

BlendFamily::BlendFamily(const AtomFamily& phi, const AtomFamily& psi, double t) : phi_(phi), psi_(psi), t_(t) {
    if (!phi.layout()->same_as(*psi.layout()) || phi.grid() != psi.grid())
        throw DimensionMismatch("blend of families on different layouts");
}
CoeffField BlendFamily::analyze(const SampledSignal& f) const {
    CoeffField a = phi_.analyze(f);
    CoeffField d = psi_.analyze(f) - a;
    d *= t_;
    return a + d;
}
SampledSignal BlendFamily::synthesize(const CoeffField& c) const {
    SampledSignal a = phi_.synthesize(c);
    SampledSignal d = psi_.synthesize(c) - a;
    d *= t_;
    return a + d;
}
SampledSignal BlendFamily::atom(std::size_t idx) const {
    SampledSignal a = phi_.atom(idx);
    SampledSignal d = psi_.atom(idx) - a;
    d *= t_;
    return a + d;
}

FrameOpResidualFamily::FrameOpResidualFamily(const AtomFamily& phi, const AtomFamily& psi) : phi_(phi), psi_(psi) {
    if (phi.grid() != psi.grid()) throw DimensionMismatch("families on different grids");
}
CoeffField FrameOpResidualFamily::analyze(const SampledSignal& f) const {
    return phi_.analyze(f - frame_operator_apply(psi_, f));
}
SampledSignal FrameOpResidualFamily::synthesize(const CoeffField& c) const {
    const SampledSignal g = phi_.synthesize(c);
    return g - frame_operator_apply(psi_, g);
}
SampledSignal FrameOpResidualFamily::atom(std::size_t idx) const {
    const SampledSignal g = phi_.atom(idx);
    return g - frame_operator_apply(psi_, g);
}

SampledSignal frame_operator_apply(const AtomFamily& fam, const SampledSignal& f) {
    return fam.synthesize(fam.analyze(f));
}

NeumannResult neumann_invert(const AtomFamily& fam, const SampledSignal& f, double tol, int maxit) {
    NeumannResult out;
    out.g = f;
    const double nf = f.l2();
    out.residuals.push_back(nf > 0.0 ? 1.0 : 0.0);
    if (nf == 0.0) {
        out.converged = true;
        return out;
    }
    SampledSignal r = f;
    double prev = nf;
    int stalled = 0;
    for (int it = 1; it <= maxit; ++it) {
        r -= frame_operator_apply(fam, r);
        const double nr = r.l2();
        out.iterations = it;
        out.residuals.push_back(nr / nf);
        const double ratio = nr / prev;
        out.max_ratio = std::max(out.max_ratio, ratio);
        stalled = ratio >= 1.0 ? stalled + 1 : 0;
        if (stalled >= 3)
            throw NoConvergence("Neumann residuals stopped decreasing at iteration " + std::to_string(it) +
                                " (ratio " + std::to_string(ratio) + ")");
        out.g += r;
        prev = nr;
        if (nr < tol * nf) {
            out.converged = true;
            break;
        }
    }
    return out;
}

ExpansionResult frame_expansion(const AtomFamily& fam, const SampledSignal& f, double tol, int maxit) {
    const NeumannResult n = neumann_invert(fam, f, tol, maxit);
    if (!n.converged)
        throw NoConvergence("Neumann series did not reach tolerance in " + std::to_string(maxit) + " iterations");
    ExpansionResult out;
    out.coeffs = fam.analyze(n.g);
    const SampledSignal back = fam.synthesize(out.coeffs);
    const double nf = f.l2();
    out.resynth_err = nf > 0.0 ? (f - back).l2() / nf : 0.0;
    out.iterations = n.iterations;
    out.max_ratio = n.max_ratio;
    return out;
}

NormingReport norming_check(const AtomFamily& fam, const BapuSystem& bapu, const std::vector<SampledSignal>& panel,
                            const SpaceParams& sp) {
    const NormBracket br = norm_equivalence_check(fam, bapu, panel, sp);
    return {br.ratio_min, br.ratio_max, br.ratios};
}

Eps0Report epsilon0_search(const AtomFamily& phi, const AtomFamily& psi, double eps_psi,
                           const std::vector<SampledSignal>& panel, double t_max, int steps, int probe_iters) {
    require(!panel.empty() && probe_iters >= 1 && t_max > 0.0, "eps0 search needs a panel, iterations and t_max");
    auto contracts = [&](double t) {
        const BlendFamily fam(phi, psi, t);
        for (const auto& f : panel) {
            SampledSignal r = f;
            double prev = r.l2();
            for (int it = 0; it < probe_iters && prev > 0.0; ++it) {
                r -= frame_operator_apply(fam, r);
                const double nr = r.l2();
                // residuals at round-off of f have converged
                if (nr <= 1e-13 * f.l2()) break;
                if (nr >= prev) return false;
                prev = nr;
            }
        }
        return true;
    };
    Eps0Report out;
    if (contracts(t_max)) {
        out.t = t_max;
    } else {
        double lo = 0.0, hi = t_max;
        for (int i = 0; i < steps; ++i) {
            const double mid = 0.5 * (lo + hi);
            (contracts(mid) ? lo : hi) = mid;
        }
        out.t = lo;
    }
    out.eps0 = out.t * eps_psi;
    return out;
}

}  // namespace amspec
