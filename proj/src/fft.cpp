#include "gelkit/fft.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "gelkit/errors.hpp"
#include "gelkit/numeric.hpp"

namespace gelkit::fft {

namespace {

// Roots exp(-2*pi*i*k/n), k < n/2, computed per index for accuracy and cached
// per transform size.
const std::vector<std::complex<double>>& root_table(std::size_t n) {
  thread_local std::unordered_map<std::size_t,
                                  std::vector<std::complex<double>>>
      cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> roots(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    roots[k] = {std::cos(ang), std::sin(ang)};
  }
  return cache.emplace(n, std::move(roots)).first->second;
}

}  // namespace

void transform(std::vector<std::complex<double>>& a, bool inverse) {
  std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw DomainError("transform length must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const auto& roots = root_table(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> w = roots[k * stride];
        if (inverse) w = std::conj(w);
        std::complex<double>& lo = a[i + k];
        std::complex<double>& hi = a[i + k + len / 2];
        std::complex<double> t = hi * w;
        hi = lo - t;
        lo += t;
      }
    }
  }
  if (inverse) {
    double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

std::vector<double> convolve(const std::vector<double>& a,
                             const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::size_t out_len = a.size() + b.size() - 1;
  if (std::min(a.size(), b.size()) <= 32 || out_len <= 64) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  }
  std::size_t n = next_pow2(out_len);
  std::vector<std::complex<double>> fa(n), fb(n);
  for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  transform(fa, false);
  transform(fb, false);
  for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  transform(fa, true);
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace gelkit::fft
