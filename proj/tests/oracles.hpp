#pragma once

// Test-only reference implementations. Each is the plain definition with no shortcuts, kept separate from the
// library so the library can be checked against it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "amspec/mixednorm.hpp"

namespace oracle {

using amspec::cd;
using amspec::Grid;
using amspec::SampledSignal;

inline int centred(int s, int N) { return s < N / 2 ? s : s - N; }

// fhat(m dxi) = (2 pi)^{-n/2} h^n sum_j f_j e^{-i x_j . xi_m}, stored at m mod N (n = 1 or 2), O(N^{2n})
inline std::vector<cd> dft_spectrum(const SampledSignal& f) {
    const Grid& g = f.grid;
    const int N = g.N;
    const double h = g.h();
    std::vector<cd> out(f.values.size());
    if (g.dim == 1) {
        for (int s = 0; s < N; ++s) {
            const double xi = centred(s, N) * g.dxi();
            cd acc = 0.0;
            for (int j = 0; j < N; ++j) acc += f.values[std::size_t(j)] * std::polar(1.0, -g.x(j) * xi);
            out[std::size_t(s)] = acc * h / std::sqrt(2.0 * amspec::kPi);
        }
        return out;
    }
    for (int s1 = 0; s1 < N; ++s1)
        for (int s2 = 0; s2 < N; ++s2) {
            const double a = centred(s1, N) * g.dxi();
            const double b = centred(s2, N) * g.dxi();
            cd acc = 0.0;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j)
                    acc += f.values[std::size_t(i) * N + j] * std::polar(1.0, -(g.x(i) * a + g.x(j) * b));
            out[std::size_t(s1) * N + s2] = acc * h * h / (2.0 * amspec::kPi);
        }
    return out;
}

// h^n sum f conj(g)
inline cd quad_inner(const SampledSignal& f, const SampledSignal& g) {
    cd acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) acc += f.values[i] * std::conj(g.values[i]);
    return acc * std::pow(f.grid.h(), f.grid.dim);
}

// ||| f |_{L_p1 in x_1} ... |_{L_pn in x_n}, x_1 innermost, rectangle rule; n = 1 or 2
inline double mixed_norm(const SampledSignal& f, const std::vector<double>& p) {
    const Grid& g = f.grid;
    const int N = g.N;
    const double h = g.h();
    if (g.dim == 1) {
        double s = 0.0;
        for (const cd& v : f.values) s += std::pow(std::abs(v), p[0]) * h;
        return std::pow(s, 1.0 / p[0]);
    }
    double outer = 0.0;
    for (int j = 0; j < N; ++j) {
        double inner = 0.0;
        for (int i = 0; i < N; ++i) inner += std::pow(std::abs(f.values[std::size_t(i) * N + j]), p[0]) * h;
        outer += std::pow(std::pow(inner, 1.0 / p[0]), p[1]) * h;
    }
    return std::pow(outer, 1.0 / p[1]);
}

// sup over all index intervals [lo, hi] containing i of the mean of a[lo..hi]
inline std::vector<double> interval_max(const std::vector<double>& a) {
    const std::size_t N = a.size();
    std::vector<double> out(N, 0.0);
    for (std::size_t lo = 0; lo < N; ++lo) {
        double s = 0.0;
        for (std::size_t hi = lo; hi < N; ++hi) {
            s += a[hi];
            const double mean = s / double(hi - lo + 1);
            for (std::size_t i = lo; i <= hi; ++i) out[i] = std::max(out[i], mean);
        }
    }
    return out;
}

inline SampledSignal random_signal(const Grid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> U;
    SampledSignal f(g);
    for (auto& v : f.values) v = cd(U(rng), U(rng));
    return f;
}

}  // namespace oracle
