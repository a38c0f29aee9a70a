#pragma once

#include <cstdint>
#include <vector>

#include "amspec/common.hpp"

namespace amspec {

// Uniform box grid x_i = -T + i h, h = 2T/N, on each of n axes; row-major, x_1 slowest.
struct Grid {
    int dim = 1;
    double T = 1.0;
    int N = 2;

    double h() const { return 2.0 * T / N; }
    double dxi() const { return kPi / T; }
    double nyquist() const { return kPi / h(); }
    double x(int i) const { return -T + i * h(); }
    std::size_t size() const;
    void validate() const;
    bool operator==(const Grid& o) const { return dim == o.dim && T == o.T && N == o.N; }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

struct SampledSignal {
    Grid grid;
    std::vector<cd> values;

    SampledSignal() = default;
    explicit SampledSignal(const Grid& g) : grid(g), values(g.size()) {}
    SampledSignal(const Grid& g, std::vector<cd> v);

    double l2() const;  // rectangle-rule L2 norm
    SampledSignal& operator+=(const SampledSignal& o);
    SampledSignal& operator-=(const SampledSignal& o);
    SampledSignal& operator*=(cd s);
};

SampledSignal operator+(SampledSignal a, const SampledSignal& b);
SampledSignal operator-(SampledSignal a, const SampledSignal& b);
cd inner(const SampledSignal& f, const SampledSignal& g);  // h^n sum f conj(g)

struct PVec {
    RVec p;
    double q = 2.0;

    PVec() = default;
    PVec(RVec p_, double q_);
    int dim() const { return int(p.size()); }
    double rfloor() const;  // min(1, q, p_1..p_n)
    double J() const { return dim() / rfloor(); }
};

double mixed_norm(const SampledSignal& f, const RVec& p);
double mixed_norm(const SampledSignal& f, const PVec& p);
double mixed_norm_abs(const Grid& g, std::vector<double> a, const RVec& p);

bool subadditivity_check(const SampledSignal& f, const SampledSignal& g, const RVec& p, double r,
                         double tol = 1e-12);

// Exact sup over grid intervals along `axis` (1-based) of interval means of |f|; no wraparound.
SampledSignal directional_max(const SampledSignal& f, int axis);
void directional_max_inplace(const Grid& g, std::vector<double>& a, int axis);

SampledSignal iterated_max(const SampledSignal& f, double theta);
std::vector<double> iterated_max_abs(const Grid& g, std::vector<double> a, double theta);

struct RectangleBound {
    std::size_t rectangles = 0;
    double max_excess = 0.0;  // max over rectangles and points of mean - M f, should be <= 0
    bool ok = false;
};
// Enumerates grid rectangles (all of them when the count is at most `budget`, else a deterministic sample).
RectangleBound rectangle_bound_check(const SampledSignal& f, std::size_t budget, std::uint64_t seed);

// Smooth band-limited random signal: sum of modulated Gaussian packets with band well below Nyquist.
SampledSignal random_packet_signal(const Grid& g, std::uint64_t seed, int packets, double max_freq,
                                   double width, double spread);

double maximal_inequality_check(const PVec& p, double theta, int trials, const Grid& g, std::uint64_t seed);

// f(x) = e^{i c_f x} F^{-1}[bump(xi/R)], exact band limit inside c_f + R[-2,2]^n
SampledSignal peetre_probe_signal(const Grid& g, const RVec& c_f, double R);
double peetre_check(const SampledSignal& f, double theta, double R);

}  // namespace amspec
