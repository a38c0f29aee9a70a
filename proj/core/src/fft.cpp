#include "amspec/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace amspec {
namespace fft {

std::string library_version() { return fftw_version; }

namespace {
struct PlanCache {
    std::mutex mu;
    std::map<std::pair<IVec, int>, fftw_plan> plans;
    ~PlanCache() {
        for (auto& kv : plans) fftw_destroy_plan(kv.second);
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

fftw_plan get_plan(const IVec& dims, int sign) {
    auto& c = cache();
    std::lock_guard<std::mutex> lk(c.mu);
    auto key = std::make_pair(dims, sign);
    auto it = c.plans.find(key);
    if (it != c.plans.end()) return it->second;
    std::size_t total = 1;
    for (int d : dims) total *= std::size_t(d);
    auto* buf = fftw_alloc_complex(total);
    fftw_plan p = fftw_plan_dft(int(dims.size()), dims.data(), buf, buf, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    c.plans.emplace(key, p);
    return p;
}
}  // namespace

void transform(cd* data, const IVec& dims, int sign) {
    fftw_plan p = get_plan(dims, sign);
    auto* d = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, d, d);
}

}  // namespace fft

std::vector<cd> to_spectrum(const SampledSignal& f) {
    const Grid& g = f.grid;
    std::vector<cd> s = f.values;
    fft::transform(s, IVec(g.dim, g.N), -1);
    const double scale = std::pow(2.0 * kPi, -g.dim / 2.0) * std::pow(g.h(), g.dim);
    // e^{i T xi_m} = (-1)^m per axis
    const std::size_t total = s.size();
    const int n = g.dim;
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        int parity = 0;
        for (int i = 0; i < n; ++i) {
            parity += int(rem % std::size_t(g.N));
            rem /= std::size_t(g.N);
        }
        s[idx] *= (parity & 1) ? -scale : scale;
    }
    return s;
}

SampledSignal from_spectrum(const Grid& g, std::vector<cd> s) {
    const int n = g.dim;
    const double scale = std::pow(2.0 * kPi, -n / 2.0) * std::pow(g.dxi(), n);
    const std::size_t total = s.size();
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        int parity = 0;
        for (int i = 0; i < n; ++i) {
            parity += int(rem % std::size_t(g.N));
            rem /= std::size_t(g.N);
        }
        s[idx] *= (parity & 1) ? -scale : scale;
    }
    fft::transform(s, IVec(n, g.N), +1);
    return SampledSignal(g, std::move(s));
}

}  // namespace amspec
