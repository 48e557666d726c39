#pragma once

#include <complex>
#include <cstddef>

namespace foliage::detail {

/// Unnormalized inverse DFT, out[j] = sum_k in[k] e^{+2 pi i k j / n}.
/// Thread-safe; plans are cached per length.
void ifft_unnormalized(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

} // namespace foliage::detail
