#pragma once

#include <vector>

#include "gelkit/functionality.hpp"
#include "gelkit/system_state.hpp"

namespace gelkit {

// Joint law u(n, m): probability that a unit has functionality m and n of its
// groups converted to bonds. At bond density c each group converts
// independently, so rows are binomial:
//   u(n, m) = C(m, n) c^n (1-c)^(m-n) f_m.
class DegreeDistribution {
 public:
  DegreeDistribution(const FunctionalityDistribution& f,
                     const SystemState& state);

  // Wraps externally produced rows (e.g. integrator output). Rows are checked
  // for non-negativity up to `tolerance` and row sums against f.
  static DegreeDistribution from_rows(const FunctionalityDistribution& f,
                                      const SystemState& state,
                                      std::vector<std::vector<double>> rows,
                                      double tolerance);

  double u(int n) const;         // marginal degree law, sum over m
  double u(int n, int m) const;  // joint entry, 0 off support
  int max_degree() const { return static_cast<int>(marginal_.size()) - 1; }
  const std::vector<double>& marginal() const { return marginal_; }
  const SystemState& state() const { return state_; }
  const std::vector<int>& support() const { return support_; }
  const std::vector<double>& row(int m) const;  // length m+1

 private:
  DegreeDistribution() = default;

  SystemState state_;
  std::vector<int> support_;               // m with f_m > 0, ascending
  std::vector<std::vector<double>> rows_;  // u(., m) per support entry
  std::vector<double> marginal_;           // u(n), n = 0..max_m
};

struct MomentSet {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
};

// Moments of the marginal degree law, summed with compensation.
MomentSet moments_exact(const DegreeDistribution& d);

// Closed forms in terms of mixture moments and c. mu3 carries two values: the
// canonical one (matches direct summation) and a reduced variant that drops
// the third mixture moment; the two disagree whenever mu03 matters.
struct ClosedFormMoments {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;         // canonical, equals moments_exact().mu3
  double mu3_reduced = 0.0; // drops the mu03 term, kept for comparison
};
ClosedFormMoments moments_closed_form(const FunctionalityDistribution& f,
                                      const SystemState& state);

// Generating function U(x) = sum_n u(n) x^n and its derivative, x in [0, 1].
struct GfValue {
  double value = 0.0;
  double derivative = 0.0;
};
GfValue gf_eval(const DegreeDistribution& d, double x);

// Size-biased transform U1(x) = U'(x)/U'(1) and its derivative.
GfValue gf_biased_eval(const DegreeDistribution& d, double x);

namespace detail {
// Binomial(m, c) pmf as a dense row of length m+1. Exact 0/1 endpoints;
// integer-exact binomial coefficients for m <= 60, log-space above.
std::vector<double> binomial_row(int m, double c);
}  // namespace detail

}  // namespace gelkit
