#pragma once

#include <complex>
#include <vector>

namespace voiceml::detail {

// In-place iterative radix-2 Cooley-Tukey. data.size() must be a power of two.
void fft_pow2(std::vector<std::complex<double>>& data);

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace voiceml::detail
