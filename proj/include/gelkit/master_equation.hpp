#pragma once

#include "gelkit/degree_distribution.hpp"
#include "gelkit/functionality.hpp"

namespace gelkit {

// Integrates the forward equation
//   du(n,m)/dt = kp * [ (m-n+1) u(n-1,m) - (m-n) u(n,m) ] * (mu01 - mu10(t))
// from u(n,m,0) = f_m * [n == 0] with classic fixed-step RK4. Serves as an
// oracle against the closed-form distribution; intentionally independent of
// it. Per-functionality mass is conserved exactly by the equation, so drift
// beyond mass_tolerance signals step-size trouble and raises NumericError.
DegreeDistribution integrate_master_equation(const FunctionalityDistribution& f,
                                             double t_end, double dt,
                                             double rate_scale = 1.0,
                                             double mass_tolerance = 1e-6);

}  // namespace gelkit
