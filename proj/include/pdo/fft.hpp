#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "pdo/error.hpp"

namespace pdo {

/// In-place iterative radix-2 FFT. Size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& data);

/// Smallest power of two >= n (n >= 1).
std::size_t next_pow2(std::size_t n);

}  // namespace pdo
