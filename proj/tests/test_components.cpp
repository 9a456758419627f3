#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gelkit/components.hpp"
#include "gelkit/degree_distribution.hpp"
#include "gelkit/errors.hpp"
#include "gelkit/functionality.hpp"
#include "gelkit/gelation.hpp"
#include "gelkit/system_state.hpp"

using namespace gelkit;

namespace {

DegreeDistribution at_c(const FunctionalityDistribution& f, double c) {
  return DegreeDistribution(f, state_from_density(f, c));
}

FunctionalityDistribution tri() { return FunctionalityDistribution({{3, 1.0}}); }
FunctionalityDistribution chains() {
  return FunctionalityDistribution({{2, 1.0}});
}
FunctionalityDistribution capped() {
  return FunctionalityDistribution({{1, 24.0 / 25.0}, {6, 1.0 / 25.0}});
}
FunctionalityDistribution mostly_two() {
  return FunctionalityDistribution({{2, 0.98}, {3, 0.02}});
}
FunctionalityDistribution half_half() {
  return FunctionalityDistribution({{1, 0.5}, {3, 0.5}});
}

constexpr SizeDistMethod kAll[] = {SizeDistMethod::kDirectConvolution,
                                   SizeDistMethod::kPerSizeFft,
                                   SizeDistMethod::kSeriesInversion};

}  // namespace

TEST_CASE("biased degree law") {
  auto d = at_c(tri(), 0.5);
  auto u1 = biased_degree(d);
  REQUIRE(u1.size() == 3);
  CHECK(u1[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(u1[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(u1[2] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK_THROWS_AS(biased_degree(at_c(tri(), 0.0)), DomainError);
}

TEST_CASE("trifunctional spot values at half conversion") {
  const double expected[] = {0.125, 0.09375, 0.0703125, 0.0546875,
                             0.0439453125, 0.0362548828125,
                             0.030548095703125, 0.02618408203125};
  auto d = at_c(tri(), 0.5);
  for (auto method : kAll) {
    auto sd = size_distribution(d, 8, method);
    CHECK(std::abs(sd.w(1) - 0.125) <= 1e-16);
    CHECK(std::abs(sd.w(2) - 0.09375) <= 1e-15);
    for (int n = 1; n <= 8; ++n)
      CHECK(sd.w(n) == doctest::Approx(expected[n - 1]).epsilon(1e-12));
  }
}

TEST_CASE("chain system has the classic pentamer value") {
  auto d = at_c(chains(), 0.5);
  for (auto method : kAll) {
    auto sd = size_distribution(d, 8, method);
    CHECK(sd.w(5) == doctest::Approx(5.0 / 64.0).epsilon(1e-12));
  }
}

TEST_CASE("first entry equals the isolated-unit probability bitwise") {
  for (auto f : {tri(), capped(), mostly_two()}) {
    for (double c : {0.2, 0.7, 0.97}) {
      auto d = at_c(f, c);
      for (auto method : kAll) {
        auto sd = size_distribution(d, 16, method);
        CHECK(sd.w(1) == d.u(0));
      }
    }
  }
}

TEST_CASE("backends agree on the test matrix") {
  auto mixtures = {tri(), mostly_two(), capped(), chains(), half_half()};
  const double densities[] = {0.1, 0.45, 0.75, 0.97, 1.0};
  for (const auto& f : mixtures) {
    for (double c : densities) {
      auto d = at_c(f, c);
      auto ref = size_distribution(d, 512, SizeDistMethod::kDirectConvolution);
      for (auto method :
           {SizeDistMethod::kPerSizeFft, SizeDistMethod::kSeriesInversion}) {
        auto sd = size_distribution(d, 512, method);
        for (int n = 1; n <= 512; ++n) {
          double a = ref.w(n);
          double b = sd.w(n);
          double scale = std::max(std::abs(a), std::abs(b));
          if (scale == 0.0) continue;
          CHECK(std::abs(a - b) <= 1e-10 * scale);
        }
      }
    }
  }
}

TEST_CASE("monodisperse closed form matches the convolution backends") {
  for (int m : {1, 2, 3, 6}) {
    FunctionalityDistribution f({{m, 1.0}});
    for (double c : {0.3, 0.75, 1.0}) {
      SystemState st = state_from_density(f, c);
      DegreeDistribution d(f, st);
      auto closed = size_distribution_monodisperse(m, st, 64);
      auto ref = size_distribution(d, 64, SizeDistMethod::kDirectConvolution);
      for (int n = 1; n <= 64; ++n) {
        double scale = std::max(std::abs(closed.w(n)), std::abs(ref.w(n)));
        if (scale == 0.0) continue;
        CHECK(std::abs(closed.w(n) - ref.w(n)) <= 1e-11 * scale);
      }
    }
  }
}

TEST_CASE("monodisperse dimer identities") {
  FunctionalityDistribution f({{1, 1.0}});
  for (double c : {0.25, 0.8, 1.0}) {
    SystemState st = state_from_density(f, c);
    auto sd = size_distribution_monodisperse(1, st, 8);
    CHECK(sd.w(1) == doctest::Approx(1.0 - c).epsilon(1e-15));
    CHECK(sd.w(2) == doctest::Approx(c).epsilon(1e-15));
    for (int n = 3; n <= 8; ++n) CHECK(sd.w(n) == 0.0);
  }
}

TEST_CASE("support lattice zeros survive every backend") {
  auto f = capped();
  auto d = at_c(f, 1.0);
  for (auto method : kAll) {
    auto sd = size_distribution(d, 64, method);
    for (int n = 1; n <= 64; ++n) {
      bool on_support = (n == 2) || (n >= 2 && (n - 2) % 5 == 0 && n >= 7);
      if (!on_support) {
        CHECK(sd.w(n) == 0.0);
      } else {
        CHECK(sd.w(n) > 0.0);
      }
    }
  }
}

TEST_CASE("pre-gel mass closes to one adaptively") {
  struct Case {
    FunctionalityDistribution f;
    double c;
  } cases[] = {{tri(), 0.3}, {mostly_two(), 0.9}, {capped(), 0.97}};
  for (const auto& [f, c] : cases) {
    auto d = at_c(f, c);
    auto sd = size_distribution_adaptive(d, 1e-6);
    CHECK(std::abs(1.0 - sd.mass) <= sd.truncation_deficit + 1e-6);
    CHECK(sd.truncation_deficit <= 1e-6);
  }
}

TEST_CASE("post-gel mass closes to the sol fraction") {
  auto d = at_c(tri(), 0.75);
  auto sd = size_distribution_adaptive(d, 1e-8);
  CHECK(std::abs(sd.mass - 1.0 / 27.0) <= sd.truncation_deficit + 1e-8);
}

TEST_CASE("small-component mass drains toward the transition") {
  auto f = tri();
  double prev = std::numeric_limits<double>::infinity();
  for (double c : {0.1, 0.2, 0.3, 0.4, 0.49}) {
    auto sd = size_distribution(at_c(f, c), 10,
                                SizeDistMethod::kSeriesInversion);
    CHECK(sd.mass < prev);
    prev = sd.mass;
  }
}

TEST_CASE("values are never negative and flags mark only floor entries") {
  auto d = at_c(mostly_two(), 0.97);
  for (auto method : kAll) {
    auto sd = size_distribution(d, 256, method);
    for (int n = 1; n <= sd.n_max(); ++n) {
      CHECK(sd.values[n] >= 0.0);
      if (sd.clamped[n]) CHECK(sd.values[n] == 0.0);
    }
  }
}

TEST_CASE("argument validation") {
  auto d = at_c(tri(), 0.5);
  CHECK_THROWS_AS(size_distribution(d, 0), DomainError);
  CHECK_THROWS_AS(size_distribution(d, (1 << 22) + 1), DomainError);
  CHECK_THROWS_AS(size_distribution_adaptive(d, 0.0), DomainError);
  CHECK_THROWS_AS(size_distribution_monodisperse(0, d.state(), 8), DomainError);
}

TEST_CASE("asymptote coefficients at a benchmark state") {
  auto d = at_c(tri(), 0.45);
  auto a = asymptote(d);
  CHECK(a.c2 == doctest::Approx(0.010101010101010124).epsilon(1e-12));
  CHECK(a.c2_explicit == doctest::Approx(0.005050505050505).epsilon(1e-10));
  CHECK(a.c1 > 0.0);
  CHECK(a.c1_explicit > 0.0);
}

TEST_CASE("asymptote requires bonds and spread") {
  CHECK_THROWS_AS(asymptote(at_c(tri(), 0.0)), DomainError);
  // dimer-only system: mu1*mu3 == mu2^2, no envelope
  FunctionalityDistribution f({{1, 1.0}});
  CHECK_THROWS_AS(asymptote(at_c(f, 0.5)), DomainError);
  // fully converted monodisperse system: degenerate degree law, same story
  CHECK_THROWS_AS(asymptote(at_c(tri(), 1.0)), DomainError);
}

TEST_CASE("explicit asymptote pair is undefined at full conversion") {
  auto a = asymptote(at_c(capped(), 1.0));
  CHECK(std::isnan(a.c1_explicit));
  CHECK(std::isnan(a.c2_explicit));
  CHECK(std::isfinite(a.c1));
  CHECK(a.c1 > 0.0);
  CHECK(a.c2 <= 1e-25);  // tangent contact: no exponential decay
}

TEST_CASE("envelope tracks the distribution only near the transition") {
  auto f = tri();
  auto envelope_ratio = [&](double c, int n) {
    auto d = at_c(f, c);
    auto a = asymptote(d);
    auto sd = size_distribution(d, n, SizeDistMethod::kSeriesInversion);
    double env = a.c1 * std::exp(-a.c2 * n) * std::pow(n, -1.5);
    return sd.w(n) / env;
  };
  // near the transition the moment-based envelope is tight
  CHECK(std::abs(envelope_ratio(0.499, 800) - 1.0) < 0.05);
  CHECK(std::abs(envelope_ratio(0.49, 800) - 1.0) < 0.25);
  // far from it the quadratic rate estimate decays too fast by construction,
  // and the envelope misses by orders of magnitude at large n
  CHECK(envelope_ratio(0.3, 500) > 100.0);
}

TEST_CASE("root of the biased fixed point") {
  CHECK(fixed_point_r0(at_c(tri(), 0.25)) == 1.0);
  CHECK(fixed_point_r0(at_c(tri(), 0.5)) == 1.0);
  CHECK(fixed_point_r0(at_c(tri(), 0.75)) ==
        doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(fixed_point_r0(at_c(tri(), 1.0)) == 0.0);
  CHECK(fixed_point_r0(at_c(chains(), 1.0)) == 0.0);
  CHECK(fixed_point_r0(at_c(capped(), 1.0)) == doctest::Approx(1.0).epsilon(1e-9));
  // closed form for the trifunctional system: r0 = ((1-c)/c)^2
  for (double c : {0.6, 0.75, 0.9}) {
    double expected = std::pow((1.0 - c) / c, 2.0);
    CHECK(fixed_point_r0(at_c(tri(), c)) ==
          doctest::Approx(expected).epsilon(1e-10));
  }
  // approaching the transition the root's condition number is 1/crit, so
  // the certifiable accuracy degrades to eps/crit
  CHECK(fixed_point_r0(at_c(tri(), 0.5 + 1e-5)) ==
        doctest::Approx(std::pow((0.5 - 1e-5) / (0.5 + 1e-5), 2.0))
            .epsilon(1e-9));
  CHECK(fixed_point_r0(at_c(tri(), 0.5 + 1e-7)) ==
        doctest::Approx(std::pow((0.5 - 1e-7) / (0.5 + 1e-7), 2.0))
            .epsilon(1e-7));
}

TEST_CASE("component stats across the transition") {
  auto pre = component_stats(at_c(tri(), 0.25));
  CHECK(pre.r0 == 1.0);
  CHECK(pre.gel_fraction == 0.0);
  CHECK(pre.expected_size == doctest::Approx(2.5).epsilon(1e-10));
  CHECK_FALSE(pre.diverges);

  auto crit = component_stats(at_c(tri(), 0.5));
  CHECK(crit.diverges);
  CHECK(std::isinf(crit.expected_size));
  CHECK(crit.gel_fraction == 0.0);

  auto post = component_stats(at_c(tri(), 0.75));
  CHECK(post.r0 == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
  CHECK(post.gel_fraction == doctest::Approx(26.0 / 27.0).epsilon(1e-10));
  CHECK(post.expected_size == doctest::Approx(2.5).epsilon(1e-10));
  CHECK_FALSE(post.diverges);
}

TEST_CASE("component stats endpoint cases") {
  auto start = component_stats(at_c(tri(), 0.0));
  CHECK(start.r0 == 1.0);
  CHECK(start.gel_fraction == 0.0);
  CHECK(start.expected_size == 1.0);

  auto full_tri = component_stats(at_c(tri(), 1.0));
  CHECK(full_tri.r0 == 0.0);
  CHECK(full_tri.gel_fraction == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::isnan(full_tri.expected_size));

  auto full_chain = component_stats(at_c(chains(), 1.0));
  CHECK(full_chain.r0 == 0.0);
  CHECK(full_chain.gel_fraction == doctest::Approx(1.0).epsilon(1e-14));

  // tangent contact at full conversion: no gel, diverging mean size
  auto tangent = component_stats(at_c(capped(), 1.0));
  CHECK(tangent.r0 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tangent.gel_fraction == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(tangent.diverges);
  CHECK(std::isinf(tangent.expected_size));

  // monofunctional units cap out at dimers
  FunctionalityDistribution mono({{1, 1.0}});
  auto dimers = component_stats(at_c(mono, 1.0));
  CHECK(dimers.r0 == 1.0);
  CHECK(dimers.gel_fraction == 0.0);
  CHECK(dimers.expected_size == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("proximity sentinel flags states dialed to the transition") {
  auto f = tri();
  GelReport gel = analyze_gelation(f);
  SystemState st = state_from_time(f, gel.t_gel * (1.0 - 1e-10));
  auto cs = component_stats(DegreeDistribution(f, st));
  CHECK(cs.diverges);
  CHECK(std::isinf(cs.expected_size));
}

TEST_CASE("gel fraction grows monotonically past the transition") {
  auto f = tri();
  double prev = 0.0;
  for (double c : {0.55, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    auto cs = component_stats(at_c(f, c));
    CHECK(cs.gel_fraction > prev);
    prev = cs.gel_fraction;
  }
}

TEST_CASE("expected size agrees with the weighted histogram sum") {
  auto d = at_c(tri(), 0.25);
  auto cs = component_stats(d);
  auto sd = size_distribution_adaptive(d, 1e-10);
  double mean = 0.0;
  for (int n = 1; n <= sd.n_max(); ++n) mean += n * sd.w(n);
  CHECK(cs.expected_size == doctest::Approx(mean).epsilon(1e-7));
}
