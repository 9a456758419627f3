#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gelkit {

// Neumaier-compensated accumulator. Sums of probability vectors have to hold
// near 1 to ~1e-15 even with 1e5 terms of mixed magnitude.
class KahanAccumulator {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& v) {
  KahanAccumulator acc;
  for (double x : v) acc.add(x);
  return acc.value();
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace gelkit
