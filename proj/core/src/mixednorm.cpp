#include "amspec/mixednorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "amspec/bapu.hpp"
#include "amspec/fft.hpp"

namespace amspec {

std::size_t Grid::size() const {
    std::size_t s = 1;
    for (int i = 0; i < dim; ++i) s *= std::size_t(N);
    return s;
}

void Grid::validate() const {
    require(dim >= 1, "grid dimension must be positive");
    require(T > 0.0, "grid half width must be positive");
    require(N >= 2 && (N & (N - 1)) == 0, "grid samples per dimension must be a power of two");
}

SampledSignal::SampledSignal(const Grid& g, std::vector<cd> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) throw DimensionMismatch("sample count does not match grid");
}

double SampledSignal::l2() const {
    double s = 0.0;
    for (const cd& v : values) s += std::norm(v);
    return std::sqrt(s * std::pow(grid.h(), grid.dim));
}

SampledSignal& SampledSignal::operator+=(const SampledSignal& o) {
    if (grid != o.grid) throw DimensionMismatch("grid mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
    return *this;
}

SampledSignal& SampledSignal::operator-=(const SampledSignal& o) {
    if (grid != o.grid) throw DimensionMismatch("grid mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
}

SampledSignal& SampledSignal::operator*=(cd s) {
    for (auto& v : values) v *= s;
    return *this;
}

SampledSignal operator+(SampledSignal a, const SampledSignal& b) { return a += b; }
SampledSignal operator-(SampledSignal a, const SampledSignal& b) { return a -= b; }

cd inner(const SampledSignal& f, const SampledSignal& g) {
    if (f.grid != g.grid) throw DimensionMismatch("grid mismatch");
    cd s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * std::conj(g.values[i]);
    return s * std::pow(f.grid.h(), f.grid.dim);
}

PVec::PVec(RVec p_, double q_) : p(std::move(p_)), q(q_) {
    require(!p.empty(), "exponent vector must be nonempty");
    for (double v : p) require(std::isfinite(v) && v > 0.0, "exponents p_j must be finite and positive");
    require(std::isfinite(q) && q > 0.0, "exponent q must be finite and positive");
}

double PVec::rfloor() const {
    double r = std::min(1.0, q);
    for (double v : p) r = std::min(r, v);
    return r;
}

double mixed_norm_abs(const Grid& g, std::vector<double> a, const RVec& p) {
    require(int(p.size()) == g.dim, "exponent vector length must equal grid dimension");
    const double h = g.h();
    std::size_t rest = a.size();
    for (int ax = 0; ax < g.dim; ++ax) {
        rest /= std::size_t(g.N);
        const double pj = p[ax];
        std::vector<double> next(rest, 0.0);
        for (std::size_t i = 0; i < std::size_t(g.N); ++i) {
            const double* row = a.data() + i * rest;
            if (pj == 2.0) {
                for (std::size_t r = 0; r < rest; ++r) next[r] += row[r] * row[r];
            } else if (pj == 1.0) {
                for (std::size_t r = 0; r < rest; ++r) next[r] += row[r];
            } else {
                for (std::size_t r = 0; r < rest; ++r)
                    if (row[r] != 0.0) next[r] += std::pow(row[r], pj);
            }
        }
        for (auto& v : next) v = std::pow(h * v, 1.0 / pj);
        a.swap(next);
    }
    return a[0];
}

double mixed_norm(const SampledSignal& f, const RVec& p) {
    std::vector<double> a(f.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
    return mixed_norm_abs(f.grid, std::move(a), p);
}

double mixed_norm(const SampledSignal& f, const PVec& p) { return mixed_norm(f, p.p); }

bool subadditivity_check(const SampledSignal& f, const SampledSignal& g, const RVec& p, double r, double tol) {
    double pmin = 1.0;
    for (double v : p) pmin = std::min(pmin, v);
    require(r > 0.0 && r <= pmin, "subadditivity needs 0 < r <= min(1, p_1..p_n)");
    const double lhs = std::pow(mixed_norm(f + g, p), r);
    const double rhs = std::pow(mixed_norm(f, p), r) + std::pow(mixed_norm(g, p), r);
    return lhs <= rhs + tol * std::max(1.0, rhs);
}

namespace {
// M[i] = max over a <= i <= b of mean(v[a..b])
void line_max(const double* v, std::size_t stride, std::size_t L, std::vector<double>& prefix,
              std::vector<double>& out) {
    prefix.assign(L + 1, 0.0);
    for (std::size_t i = 0; i < L; ++i) prefix[i + 1] = prefix[i] + v[i * stride];
    out.assign(L, 0.0);
    for (std::size_t a = 0; a < L; ++a) {
        double R = -std::numeric_limits<double>::infinity();
        for (std::size_t b = L; b-- > a;) {
            R = std::max(R, (prefix[b + 1] - prefix[a]) / double(b - a + 1));
            if (R > out[b]) out[b] = R;
        }
    }
}
}  // namespace

void directional_max_inplace(const Grid& g, std::vector<double>& a, int axis) {
    require(axis >= 1 && axis <= g.dim, "axis out of range");
    const std::size_t N = std::size_t(g.N);
    std::size_t stride = 1;
    for (int i = axis; i < g.dim; ++i) stride *= N;
    const std::size_t outer = a.size() / (stride * N);
    std::vector<double> src = a;
    parallel_for(outer * stride, [&](std::size_t line) {
        const std::size_t o = line / stride, in = line % stride;
        const std::size_t base = o * stride * N + in;
        std::vector<double> prefix, res;
        line_max(src.data() + base, stride, N, prefix, res);
        for (std::size_t i = 0; i < N; ++i) a[base + i * stride] = res[i];
    });
}

SampledSignal directional_max(const SampledSignal& f, int axis) {
    std::vector<double> a(f.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
    directional_max_inplace(f.grid, a, axis);
    SampledSignal out(f.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i];
    return out;
}

std::vector<double> iterated_max_abs(const Grid& g, std::vector<double> a, double theta) {
    require(theta > 0.0, "theta must be positive");
    for (auto& v : a) v = std::pow(v, theta);
    for (int ax = 1; ax <= g.dim; ++ax) directional_max_inplace(g, a, ax);
    for (auto& v : a) v = std::pow(v, 1.0 / theta);
    return a;
}

SampledSignal iterated_max(const SampledSignal& f, double theta) {
    std::vector<double> a(f.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
    a = iterated_max_abs(f.grid, std::move(a), theta);
    SampledSignal out(f.grid);
    for (std::size_t i = 0; i < a.size(); ++i) out.values[i] = a[i];
    return out;
}

RectangleBound rectangle_bound_check(const SampledSignal& f, std::size_t budget, std::uint64_t seed) {
    const Grid& g = f.grid;
    const int n = g.dim;
    const long N = g.N;
    std::vector<double> a(f.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
    const std::vector<double> M = iterated_max_abs(g, a, 1.0);

    const double intervals = double(N) * (N + 1) / 2.0;
    const double all = std::pow(intervals, n);
    const bool exhaustive = all <= double(budget);

    RectangleBound res;
    res.max_excess = -std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> pick(0, N - 1);

    std::vector<long> lo(n), hi(n);
    auto check = [&] {
        // mean over the rectangle, then compare with M at every point of it
        std::vector<long> id(lo);
        double sum = 0.0;
        std::size_t cnt = 0;
        auto flat = [&](const std::vector<long>& v) {
            std::size_t p = 0;
            for (int i = 0; i < n; ++i) p = p * std::size_t(N) + std::size_t(v[i]);
            return p;
        };
        auto advance = [&] {
            int ax = n - 1;
            while (ax >= 0 && ++id[ax] > hi[ax]) {
                id[ax] = lo[ax];
                --ax;
            }
            return ax >= 0;
        };
        do {
            sum += a[flat(id)];
            ++cnt;
        } while (advance());
        const double mean = sum / double(cnt);
        id = lo;
        do {
            const double m = M[flat(id)];
            const double excess = (mean - m) / std::max(1e-300, std::abs(m));
            res.max_excess = std::max(res.max_excess, excess);
        } while (advance());
        ++res.rectangles;
    };

    if (exhaustive) {
        // enumerate (lo_i <= hi_i) on every axis
        std::fill(lo.begin(), lo.end(), 0);
        std::fill(hi.begin(), hi.end(), 0);
        for (;;) {
            check();
            int ax = n - 1;
            while (ax >= 0) {
                if (++hi[ax] < N) break;
                if (++lo[ax] < N) {
                    hi[ax] = lo[ax];
                    break;
                }
                lo[ax] = 0;
                hi[ax] = 0;
                --ax;
            }
            if (ax < 0) break;
        }
    } else {
        for (std::size_t t = 0; t < budget; ++t) {
            for (int i = 0; i < n; ++i) {
                long u = pick(rng), v = pick(rng);
                lo[i] = std::min(u, v);
                hi[i] = std::max(u, v);
            }
            check();
        }
    }
    res.ok = res.max_excess <= 1e-12;
    return res;
}

SampledSignal random_packet_signal(const Grid& g, std::uint64_t seed, int packets, double max_freq, double width,
                                   double spread) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    SampledSignal f(g);
    const int n = g.dim;
    const std::size_t total = g.size();
    for (int p = 0; p < packets; ++p) {
        RVec c(n), w(n);
        for (int i = 0; i < n; ++i) c[i] = spread * U(rng);
        for (int i = 0; i < n; ++i) w[i] = max_freq * U(rng);
        const cd amp(U(rng), U(rng));
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t rem = idx;
            double d2 = 0.0, ph = 0.0;
            for (int i = n - 1; i >= 0; --i) {
                const double x = g.x(int(rem % std::size_t(g.N)));
                rem /= std::size_t(g.N);
                d2 += (x - c[i]) * (x - c[i]);
                ph += w[i] * x;
            }
            f.values[idx] += amp * std::exp(-d2 / (2.0 * width * width)) * std::polar(1.0, ph);
        }
    }
    return f;
}

double maximal_inequality_check(const PVec& p, double theta, int trials, const Grid& g, std::uint64_t seed) {
    double pmin = p.p[0];
    for (double v : p.p) pmin = std::min(pmin, v);
    require(theta > 0.0 && theta < pmin, "maximal inequality needs 0 < theta < min p_j");
    require(p.dim() == g.dim, "exponent vector length must equal grid dimension");
    const double w = g.T / 10.0;
    double C = 0.0;
    for (int t = 0; t < trials; ++t) {
        const SampledSignal f = random_packet_signal(g, seed + std::uint64_t(t), 3, 2.0 / w, w, g.T / 2.0);
        const double num = mixed_norm(iterated_max(f, theta), p.p);
        const double den = mixed_norm(f, p.p);
        if (den > 0.0) C = std::max(C, num / den);
    }
    return C;
}

SampledSignal peetre_probe_signal(const Grid& g, const RVec& c_f, double R) {
    const int n = g.dim;
    require(int(c_f.size()) == n, "frequency centre has wrong dimension");
    require(R > 0.0, "R must be positive");
    const BumpProfile prof;
    const double dxi = g.dxi();
    std::vector<long> cidx(n);
    for (int i = 0; i < n; ++i) cidx[i] = std::lround(c_f[i] / dxi);
    std::vector<cd> spec(g.size(), 0.0);
    for (std::size_t idx = 0; idx < spec.size(); ++idx) {
        std::size_t rem = idx;
        double d2 = 0.0;
        for (int i = n - 1; i >= 0; --i) {
            const int m = signed_index(int(rem % std::size_t(g.N)), g.N);
            rem /= std::size_t(g.N);
            const double d = (m - cidx[i]) * dxi / R;
            d2 += d * d;
        }
        spec[idx] = prof.rho(std::sqrt(d2));
    }
    // shifted copies may wrap; reject if the band leaves the grid
    for (int i = 0; i < n; ++i)
        require(std::abs(c_f[i]) + 1.5 * R * std::sqrt(double(n)) < g.nyquist(), "probe band exceeds Nyquist");
    return from_spectrum(g, std::move(spec));
}

double peetre_check(const SampledSignal& f, double theta, double R) {
    const Grid& g = f.grid;
    const int n = g.dim;
    require(theta > 0.0 && R > 0.0, "peetre_check needs theta > 0, R > 0");
    std::vector<double> a(f.values.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(f.values[i]);
    const std::vector<double> M = iterated_max_abs(g, a, theta);
    const std::size_t total = a.size();
    std::vector<RVec> coords(total, RVec(n));
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        for (int i = n - 1; i >= 0; --i) {
            coords[idx][i] = g.x(int(rem % std::size_t(g.N)));
            rem /= std::size_t(g.N);
        }
    }
    const double ex = n / theta;
    std::vector<double> ratio(total, 0.0);
    parallel_for(total, [&](std::size_t xi) {
        double sup = 0.0;
        for (std::size_t yi = 0; yi < total; ++yi) {
            if (a[yi] == 0.0) continue;
            double d2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double d = R * (coords[xi][i] - coords[yi][i]);
                d2 += d * d;
            }
            sup = std::max(sup, a[yi] / std::pow(1.0 + d2, ex / 2.0));
        }
        ratio[xi] = M[xi] > 0.0 ? sup / M[xi] : 0.0;
    });
    return *std::max_element(ratio.begin(), ratio.end());
}

}  // namespace amspec
