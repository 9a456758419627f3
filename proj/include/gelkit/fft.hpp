#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace gelkit::fft {

// In-place iterative radix-2 transform; a.size() must be a power of two.
void transform(std::vector<std::complex<double>>& a, bool inverse);

// Full linear convolution, length a+b-1; direct for small inputs.
std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b);

}  // namespace gelkit::fft
