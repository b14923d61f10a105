#pragma once

#include <complex>
#include <span>

namespace retroimg::detail {

enum class FftSign { Forward, Backward };

// Unnormalised in-place DFT; Forward uses exp(-2 pi i m j / n). Thread-safe.
void fft_inplace(std::span<std::complex<double>> data, FftSign sign);

}  // namespace retroimg::detail
