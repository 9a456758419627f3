#include "gelkit/gelation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gelkit/errors.hpp"

namespace gelkit {

GelReport analyze_gelation(const FunctionalityDistribution& f,
                           double rate_scale) {
  if (!(rate_scale > 0.0) || !std::isfinite(rate_scale))
    throw DomainError("rate_scale must be positive and finite");
  double mu01 = f.partial_moment(1);
  double mu02 = f.partial_moment(2);
  GelReport r;
  r.criterion_value = mu02 - 2.0 * mu01;
  if (std::abs(r.criterion_value) <= 1e-12) {
    // borderline: transition only in the infinite-time limit
    r.gels_in_finite_time = false;
    r.t_gel = std::numeric_limits<double>::infinity();
    r.c_gel = 1.0;
  } else if (r.criterion_value < 0.0) {
    r.gels_in_finite_time = false;
    r.t_gel = std::numeric_limits<double>::infinity();
    r.c_gel = std::numeric_limits<double>::quiet_NaN();
    r.c_gel_applicable = false;
  } else {
    r.gels_in_finite_time = true;
    r.t_gel = 1.0 / (rate_scale * r.criterion_value);
    r.c_gel = mu01 / (mu02 - mu01);
  }
  return r;
}

double flory_conversion(int m) {
  if (m < 2)
    throw DomainError("threshold density needs m >= 2, got " +
                      std::to_string(m));
  return 1.0 / (m - 1);
}

double prevention_threshold(int m) {
  if (m < 3)
    throw DomainError("dilution threshold needs m >= 3, got " +
                      std::to_string(m));
  double a = static_cast<double>(m) * m - 2.0 * m;
  return a / (a + 1.0);
}

}  // namespace gelkit
