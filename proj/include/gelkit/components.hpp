#pragma once

#include <cstdint>
#include <vector>

#include "gelkit/degree_distribution.hpp"
#include "gelkit/system_state.hpp"

namespace gelkit {

enum class SizeDistMethod {
  kDirectConvolution,  // repeated convolution, the exact reference
  kPerSizeFft,         // transform, pointwise power, inverse, per size
  kSeriesInversion,    // Newton on W1 = x*U1(W1), the fast default
};

// Finite-component size law w(n): probability that a random vertex sits in a
// finite component of n vertices. Computed for n = 1..n_max; the remaining
// mass is either beyond the truncation or (post-gel) in the giant component.
struct SizeDistribution {
  SystemState state;
  SizeDistMethod method = SizeDistMethod::kSeriesInversion;
  std::vector<double> values;          // index n; values[0] unused and 0
  std::vector<std::uint8_t> clamped;   // sub-floor entries zeroed, not repaired
  double noise_floor = 0.0;            // 1e-13 * max(w), 0 for the reference
  double mass = 0.0;                   // sum of values
  double truncation_deficit = 0.0;     // estimated mass at n > n_max

  int n_max() const { return static_cast<int>(values.size()) - 1; }
  double w(int n) const {
    return (n >= 1 && n < static_cast<int>(values.size())) ? values[n] : 0.0;
  }
};

// Size-biased neighbor degree u1(n) = (n+1)u(n+1)/mu1, n = 0..m_max-1.
std::vector<double> biased_degree(const DegreeDistribution& d);

SizeDistribution size_distribution(
    const DegreeDistribution& d, int n_max,
    SizeDistMethod method = SizeDistMethod::kSeriesInversion);

// Doubles n_max (from 256, up to n_cap) until the mass unaccounted for by
// values + deficit estimate drops below mass_tol. Returns the last attempt
// even if the target was not reached; callers can inspect the fields.
SizeDistribution size_distribution_adaptive(
    const DegreeDistribution& d, double mass_tol,
    SizeDistMethod method = SizeDistMethod::kSeriesInversion,
    int n_cap = 1 << 20);

// Closed form for a single-functionality system, log-space evaluation.
SizeDistribution size_distribution_monodisperse(int m, const SystemState& state,
                                                int n_max);

// Large-n envelope w_inf(n) = c1 * exp(-c2*n) * n^(-3/2). The moment-based
// pair is canonical; the explicit time-parameterized pair is reported for
// comparison and agrees with it only near the transition.
struct AsymptoteCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c1_explicit = 0.0;
  double c2_explicit = 0.0;
};
AsymptoteCoefficients asymptote(const DegreeDistribution& d);

// Smallest nonnegative fixed point of U1, reached by iteration from 0 with a
// Newton finish. 1 up to the transition, < 1 past it, 0 when u1(0) = 0.
double fixed_point_r0(const DegreeDistribution& d);

struct ComponentStats {
  double r0 = 1.0;
  double gel_fraction = 0.0;
  double expected_size = 1.0;  // +inf at the transition; NaN when no finite
                               // components exist at all (gel_fraction = 1)
  bool diverges = false;
};
ComponentStats component_stats(const DegreeDistribution& d);

}  // namespace gelkit
