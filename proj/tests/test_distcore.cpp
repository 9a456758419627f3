#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gelkit/degree_distribution.hpp"
#include "gelkit/errors.hpp"
#include "gelkit/functionality.hpp"
#include "gelkit/master_equation.hpp"
#include "gelkit/numeric.hpp"
#include "gelkit/system_state.hpp"

using namespace gelkit;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

FunctionalityDistribution tri() { return FunctionalityDistribution({{3, 1.0}}); }
FunctionalityDistribution mostly_two() {
  return FunctionalityDistribution({{2, 0.98}, {3, 0.02}});
}
FunctionalityDistribution capped() {
  return FunctionalityDistribution({{1, 0.96}, {6, 0.04}});
}
}  // namespace

TEST_CASE("time and density parameterizations invert each other") {
  auto f = tri();
  for (double t : {0.0, 0.05, 0.5, 3.0, 100.0}) {
    SystemState st = state_from_time(f, t);
    CHECK(st.c == doctest::Approx(3.0 * t / (1.0 + 3.0 * t)).epsilon(1e-15));
    SystemState back = state_from_density(f, st.c);
    CHECK(back.t == doctest::Approx(t).epsilon(1e-12));
  }
  SystemState full = state_from_time(f, kInf);
  CHECK(full.c == 1.0);
  SystemState full2 = state_from_density(f, 1.0);
  CHECK(std::isinf(full2.t));
  CHECK(state_from_density(f, 0.0).t == 0.0);
  CHECK_THROWS_AS(state_from_density(f, -0.1), DomainError);
  CHECK_THROWS_AS(state_from_density(f, 1.1), DomainError);
  CHECK_THROWS_AS(state_from_time(f, -1.0), DomainError);
}

TEST_CASE("rate scale shifts time but not density") {
  auto f = tri();
  SystemState st = state_from_time(f, 0.5, 2.0);
  CHECK(st.c == doctest::Approx(3.0 / 4.0).epsilon(1e-15));
  SystemState back = state_from_density(f, st.c, 2.0);
  CHECK(back.t == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("binomial rows are exact at the endpoints") {
  auto r0 = detail::binomial_row(4, 0.0);
  CHECK(r0[0] == 1.0);
  CHECK(r0[4] == 0.0);
  auto r1 = detail::binomial_row(4, 1.0);
  CHECK(r1[4] == 1.0);
  CHECK(r1[0] == 0.0);
  auto r = detail::binomial_row(3, 0.5);
  CHECK(r[0] == 0.125);
  CHECK(r[1] == 0.375);
  CHECK(r[2] == 0.375);
  CHECK(r[3] == 0.125);
}

TEST_CASE("large-m binomial rows stay normalized") {
  for (int m : {61, 200, 1000}) {
    auto row = detail::binomial_row(m, 0.37);
    double sum = compensated_sum(row);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (double v : row) CHECK(v >= 0.0);
  }
}

TEST_CASE("degree distribution marginal and joint") {
  auto f = capped();
  SystemState st = state_from_density(f, 0.25);
  DegreeDistribution d(f, st);
  CHECK(d.max_degree() == 6);
  // degree 0: monofunctional misses with 3/4, hexafunctional with (3/4)^6
  CHECK(d.u(0) ==
        doctest::Approx(0.96 * 0.75 + 0.04 * std::pow(0.75, 6)).epsilon(1e-14));
  CHECK(d.u(0, 1) == doctest::Approx(0.96 * 0.75).epsilon(1e-14));
  CHECK(d.u(2, 1) == 0.0);
  CHECK(d.u(7) == 0.0);
  double total = 0.0;
  for (int n = 0; n <= d.max_degree(); ++n) total += d.u(n);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("closed-form moments match direct summation") {
  for (auto f : {tri(), mostly_two(), capped()}) {
    for (double c : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      SystemState st = state_from_density(f, c);
      DegreeDistribution d(f, st);
      MomentSet direct = moments_exact(d);
      ClosedFormMoments closed = moments_closed_form(f, st);
      CHECK(closed.mu1 == doctest::Approx(direct.mu1).epsilon(1e-12));
      CHECK(closed.mu2 == doctest::Approx(direct.mu2).epsilon(1e-12));
      CHECK(closed.mu3 == doctest::Approx(direct.mu3).epsilon(1e-12));
    }
  }
}

TEST_CASE("reduced third moment differs once mu03 matters") {
  auto f = tri();
  SystemState st = state_from_time(f, 0.2);
  ClosedFormMoments closed = moments_closed_form(f, st);
  DegreeDistribution d(f, st);
  MomentSet direct = moments_exact(d);
  CHECK(closed.mu3 == doctest::Approx(direct.mu3).epsilon(1e-12));
  CHECK(std::abs(closed.mu3_reduced - direct.mu3) > 1e-3);
}

TEST_CASE("moment ordering invariants") {
  for (auto f : {tri(), mostly_two(), capped()}) {
    for (double c : {0.05, 0.3, 0.6, 0.95}) {
      auto st = state_from_density(f, c);
      auto m = moments_closed_form(f, st);
      CHECK(m.mu1 <= m.mu2 + 1e-15);
      CHECK(m.mu1 * m.mu3 >= m.mu2 * m.mu2 - 1e-12);
    }
  }
}

TEST_CASE("generating function evaluation") {
  auto f = tri();
  SystemState st = state_from_density(f, 0.5);
  DegreeDistribution d(f, st);
  GfValue at1 = gf_eval(d, 1.0);
  CHECK(at1.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(at1.derivative == doctest::Approx(1.5).epsilon(1e-14));
  GfValue at0 = gf_eval(d, 0.0);
  CHECK(at0.value == doctest::Approx(0.125).epsilon(1e-14));
  CHECK_THROWS_AS(gf_eval(d, -0.1), DomainError);
  CHECK_THROWS_AS(gf_eval(d, 1.1), DomainError);

  GfValue b1 = gf_biased_eval(d, 1.0);
  CHECK(b1.value == doctest::Approx(1.0).epsilon(1e-14));
  // biased mean U1'(1) = mu2/mu1 - 1
  CHECK(b1.derivative == doctest::Approx(3.0 / 1.5 - 1.0).epsilon(1e-14));
}

TEST_CASE("biased gf needs at least one bond") {
  auto f = tri();
  DegreeDistribution d(f, state_from_density(f, 0.0));
  CHECK_THROWS_AS(gf_biased_eval(d, 0.5), DomainError);
}

TEST_CASE("integrator matches closed form on the test matrix") {
  const double times[] = {0.05, 0.1, 0.25, 0.5, 1.0};
  for (auto f : {tri(), mostly_two(), capped()}) {
    for (double t : times) {
      DegreeDistribution numeric = integrate_master_equation(f, t, 1e-3);
      DegreeDistribution closed(f, state_from_time(f, t));
      for (const auto& [m, fm] : f.entries()) {
        for (int n = 0; n <= m; ++n)
          CHECK(std::abs(numeric.u(n, m) - closed.u(n, m)) < 1e-6);
      }
      MomentSet mn = moments_exact(numeric);
      MomentSet mc = moments_exact(closed);
      CHECK(mn.mu1 == doctest::Approx(mc.mu1).epsilon(1e-6));
    }
  }
}

TEST_CASE("integrator conserves per-functionality mass") {
  auto f = capped();
  DegreeDistribution d = integrate_master_equation(f, 2.0, 1e-3);
  double row1 = 0.0, row6 = 0.0;
  for (int n = 0; n <= 1; ++n) row1 += d.u(n, 1);
  for (int n = 0; n <= 6; ++n) row6 += d.u(n, 6);
  CHECK(row1 == doctest::Approx(0.96).epsilon(1e-12));
  CHECK(row6 == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("integrator flags drift when the step is absurd") {
  auto f = tri();
  CHECK_THROWS_AS(integrate_master_equation(f, 10.0, 10.0, 1.0, 1e-12),
                  NumericError);
}

TEST_CASE("integrator rejects bad arguments") {
  auto f = tri();
  CHECK_THROWS_AS(integrate_master_equation(f, -1.0, 1e-3), DomainError);
  CHECK_THROWS_AS(integrate_master_equation(f, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(integrate_master_equation(f, kInf, 1e-3), DomainError);
}

TEST_CASE("integrator at t=0 returns the initial condition") {
  auto f = mostly_two();
  DegreeDistribution d = integrate_master_equation(f, 0.0, 1e-3);
  CHECK(d.u(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.u(1) == 0.0);
}
