#pragma once

#include <string>
#include <vector>

#include "amspec/common.hpp"
#include "amspec/mixednorm.hpp"

namespace amspec {

namespace fft {
// Unnormalized n-d DFT in place, row-major. sign = -1: sum e^{-2 pi i jm/P}; sign = +1: e^{+...}.
void transform(cd* data, const IVec& dims, int sign);
// version string of the linked FFT library
std::string library_version();
inline void transform(std::vector<cd>& v, const IVec& dims, int sign) { transform(v.data(), dims, sign); }
}  // namespace fft

inline int wrap_index(long m, int N) {
    long r = m % N;
    return int(r < 0 ? r + N : r);
}
// signed frequency index in [-N/2, N/2) of storage slot s
inline int signed_index(int s, int N) { return s < N / 2 ? s : s - N; }

// fhat(xi_m) = (2 pi)^{-n/2} h^n sum_j f_j e^{-i x_j xi_m}, xi_m = m pi/T, stored at m mod N.
std::vector<cd> to_spectrum(const SampledSignal& f);
SampledSignal from_spectrum(const Grid& g, std::vector<cd> spec);

}  // namespace amspec
