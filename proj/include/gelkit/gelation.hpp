#pragma once

#include "gelkit/functionality.hpp"

namespace gelkit {

// Phase transition summary for a mixture. The discriminant is
// criterion_value = mu02 - 2*mu01:
//   > 0  : giant component appears at finite time t_gel, density c_gel
//   = 0  : approached asymptotically, t_gel = +inf, c_gel = 1
//   < 0  : never appears; c_gel has no meaning (NaN, c_gel_applicable false)
struct GelReport {
  bool gels_in_finite_time = false;
  double t_gel = 0.0;
  double c_gel = 0.0;
  bool c_gel_applicable = true;
  double criterion_value = 0.0;
};

GelReport analyze_gelation(const FunctionalityDistribution& f,
                           double rate_scale = 1.0);

// Single-functionality threshold density 1/(m-1), m >= 2.
double flory_conversion(int m);

// Smallest fraction of 1-functional diluent that suppresses the finite-time
// transition for an otherwise pure m-functional system, m >= 3.
double prevention_threshold(int m);

}  // namespace gelkit
