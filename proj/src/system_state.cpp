#include "gelkit/system_state.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gelkit/errors.hpp"

namespace gelkit {

namespace {

SystemState base_state(const FunctionalityDistribution& f, double rate_scale) {
  if (!(rate_scale > 0.0) || !std::isfinite(rate_scale))
    throw DomainError("rate_scale must be positive and finite");
  SystemState s;
  s.rate_scale = rate_scale;
  s.mu01 = f.partial_moment(1);
  s.mu02 = f.partial_moment(2);
  s.mu03 = f.partial_moment(3);
  return s;
}

}  // namespace

SystemState state_from_time(const FunctionalityDistribution& f, double t,
                            double rate_scale) {
  if (std::isnan(t) || t < 0.0)
    throw DomainError("time must be >= 0");
  SystemState s = base_state(f, rate_scale);
  s.t = t;
  if (std::isinf(t)) {
    s.c = 1.0;
  } else {
    double tau = rate_scale * t * s.mu01;
    s.c = tau / (1.0 + tau);
  }
  return s;
}

SystemState state_from_density(const FunctionalityDistribution& f, double c,
                               double rate_scale) {
  if (!(c >= 0.0 && c <= 1.0))
    throw DomainError("bond density must lie in [0, 1], got " +
                      std::to_string(c));
  SystemState s = base_state(f, rate_scale);
  s.c = c;
  s.t = (c == 1.0) ? std::numeric_limits<double>::infinity()
                   : c / (rate_scale * s.mu01 * (1.0 - c));
  return s;
}

}  // namespace gelkit
