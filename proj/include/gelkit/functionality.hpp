#pragma once

#include <string_view>
#include <utility>
#include <vector>

namespace gelkit {

// Initial functionality mixture: fraction f_m of units carrying m reactive
// groups. Finite support, m >= 1, fractions sum to 1 after construction.
class FunctionalityDistribution {
 public:
  static constexpr int kDefaultMaxFunctionality = 10000;

  // entries: (m, f_m) pairs, duplicates summed, zero fractions dropped.
  // normalize=false demands the input already sums to 1 within 1e-9; either
  // way the stored fractions are rescaled so they sum to 1 exactly.
  explicit FunctionalityDistribution(
      std::vector<std::pair<int, double>> entries, bool normalize = false,
      int max_functionality = kDefaultMaxFunctionality);

  // Accepts "m:f" comma lists ("1:0.96,6:0.04") or a JSON object
  // ({"1":0.96,"6":0.04}).
  static FunctionalityDistribution parse(std::string_view text,
                                         bool normalize = false);

  double fraction(int m) const;  // f_m, 0 outside the support
  int max_m() const { return max_m_; }

  // Sparse view, ascending m, only positive fractions.
  const std::vector<std::pair<int, double>>& entries() const {
    return entries_;
  }

  // Raw moments of the mixture itself: sum_m m^order f_m, order in 1..3.
  double partial_moment(int order) const;

 private:
  std::vector<std::pair<int, double>> entries_;
  int max_m_ = 0;
};

}  // namespace gelkit
