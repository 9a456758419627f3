#pragma once

#include "gelkit/functionality.hpp"

namespace gelkit {

// A point on the reaction trajectory. Either coordinate determines the other:
//   c = mu01*kp*t / (1 + mu01*kp*t),   t = c / (kp*mu01*(1 - c)).
// c = 1 corresponds to t = +infinity (full conversion).
struct SystemState {
  double t = 0.0;           // process time, +inf at c == 1
  double c = 0.0;           // bond density in [0, 1]
  double rate_scale = 1.0;  // kp, the pairing rate constant
  double mu01 = 0.0;        // mixture moments carried along for convenience
  double mu02 = 0.0;
  double mu03 = 0.0;
};

SystemState state_from_time(const FunctionalityDistribution& f, double t,
                            double rate_scale = 1.0);
SystemState state_from_density(const FunctionalityDistribution& f, double c,
                               double rate_scale = 1.0);

}  // namespace gelkit
