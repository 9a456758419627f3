#include "gelkit/components.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>

#include "gelkit/errors.hpp"
#include "gelkit/fft.hpp"
#include "gelkit/numeric.hpp"
#include "gelkit/power_series.hpp"

namespace gelkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFloorFactor = 1e-13;   // noise floor relative to max(w)
constexpr int kRepairLimit = 4096;       // largest n repaired by direct pass
constexpr double kRepairBudget = 2e9;    // flop cap for the repair pass

double poly_eval(const std::vector<double>& p, double x) {
  double r = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

double poly_deriv_eval(const std::vector<double>& p, double x) {
  double r = 0.0;
  for (std::size_t i = p.size(); i-- > 1;) r = r * x + static_cast<double>(i) * p[i];
  return r;
}

// Support structure of u1: extremes, lattice step, polynomial degree.
struct SupportInfo {
  int min_idx = -1;
  int max_idx = -1;
  int step = 0;  // gcd of index gaps; 0 when a single atom
};

SupportInfo support_info(const std::vector<double>& u1) {
  SupportInfo s;
  for (std::size_t k = 0; k < u1.size(); ++k) {
    if (u1[k] <= 0.0) continue;
    int ik = static_cast<int>(k);
    if (s.min_idx < 0) s.min_idx = ik;
    s.max_idx = ik;
  }
  if (s.min_idx >= 0) {
    for (std::size_t k = s.min_idx + 1; k < u1.size(); ++k)
      if (u1[k] > 0.0)
        s.step = std::gcd(s.step, static_cast<int>(k) - s.min_idx);
  }
  return s;
}

// Whether u1^{*n}(n-2) can be nonzero: the target must sit on the reachable
// lattice of the n-fold support sumset. Necessary, not sufficient, so it is
// only used to zero entries out.
bool target_on_lattice(const SupportInfo& s, long long n) {
  if (s.min_idx < 0) return false;
  long long t = n - 2;
  long long lo = n * s.min_idx;
  long long hi = n * s.max_idx;
  if (t < lo || t > hi) return false;
  if (s.step == 0) return t == lo;
  return (t - lo) % s.step == 0;
}

// Saddle of U1(theta)/theta: solves sum_k (k-1) u1_k theta^k = 0. The ratio
// rho = theta/U1(theta) at the root is the decay rate e^{rho} of w1; rho = 1
// exactly at the transition. Returns {theta, rho}; rho = +inf when the series
// terminates (degree < 2) without a geometric tail.
struct Saddle {
  double theta = 1.0;
  double rho = kInf;
  bool found = false;
};

Saddle saddle_point(const std::vector<double>& u1) {
  Saddle s;
  int deg = -1;
  for (std::size_t k = 0; k < u1.size(); ++k)
    if (u1[k] > 0.0) deg = static_cast<int>(k);
  if (deg < 1 || u1[0] <= 0.0) return s;
  if (deg == 1) {
    // single geometric factor: radius of 1/(1 - u1_1 x)
    s.rho = 1.0 / u1[1];
    s.theta = kInf;
    s.found = true;
    return s;
  }
  auto q = [&](double th) {
    double acc = 0.0;
    for (std::size_t k = u1.size(); k-- > 0;)
      acc = acc * th + (static_cast<double>(k) - 1.0) * u1[k];
    return acc;
  };
  double hi = 1.0;
  int guard = 0;
  while (q(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 200) return s;  // no root in range; leave unfound
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (q(mid) <= 0.0 ? lo : hi) = mid;
  }
  s.theta = 0.5 * (lo + hi);
  double u_at = poly_eval(u1, s.theta);
  s.rho = s.theta / u_at;
  if (s.rho < 1.0) s.rho = 1.0;  // round-off guard; the minimum is 1
  s.found = true;
  return s;
}

// Reference backend: w(n) = mu1/(n-1) * u1^{*n}(n-2) by repeated plain
// convolution, truncated to the indices that are ever read.
void direct_values(const std::vector<double>& u1, double mu1, int n_limit,
                   std::vector<double>& w) {
  if (n_limit < 2) return;
  std::size_t keep = static_cast<std::size_t>(n_limit) - 1;  // indices <= n_limit-2
  std::vector<double> power(u1.begin(),
                            u1.begin() + std::min(u1.size(), keep));
  std::vector<double> next;
  for (int n = 2; n <= n_limit; ++n) {
    std::size_t len = std::min(power.size() + u1.size() - 1, keep);
    next.assign(len, 0.0);
    for (std::size_t i = 0; i < power.size(); ++i) {
      if (power[i] == 0.0) continue;
      std::size_t jmax = std::min(u1.size(), len - i);
      for (std::size_t j = 0; j < jmax; ++j)
        next[i + j] += power[i] * u1[j];
    }
    power.swap(next);
    std::size_t t = static_cast<std::size_t>(n) - 2;
    w[n] = (t < power.size()) ? mu1 / (n - 1.0) * power[t] : 0.0;
  }
}

// Exponential tilt centred on the target index: solves for theta with
// tilted mean (n-2)/n, i.e. sum_k u1_k (k n - (n-2)) theta^k = 0.
double per_size_tilt(const std::vector<double>& u1, long long n) {
  auto g = [&](double th) {
    double acc = 0.0;
    for (std::size_t k = u1.size(); k-- > 0;)
      acc = acc * th +
            u1[k] * (static_cast<double>(k) * n - (static_cast<double>(n) - 2.0));
    return acc;
  };
  double hi = 1.0;
  int guard = 0;
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (++guard > 80)
      throw NumericError("tilt bracket failed at n=" + std::to_string(n));
  }
  double lo = 0.0;
  for (int i = 0; i < 110; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) <= 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void per_size_fft_values(const std::vector<double>& u1, double mu1, int n_max,
                         const SupportInfo& info, std::vector<double>& w,
                         std::vector<std::uint8_t>& flags) {
  if (n_max >= 2) w[2] = mu1 * u1[0] * u1[0];
  if (n_max < 3) return;
  int deg = info.max_idx;
  for (int n = 3; n <= n_max; ++n) {
    if (!target_on_lattice(info, n)) continue;  // exact structural zero
    double theta = per_size_tilt(u1, n);
    double scale = poly_eval(u1, theta);  // U1(theta)
    std::size_t len = next_pow2(static_cast<std::size_t>(n) * deg + 1);
    std::vector<std::complex<double>> a(len);
    for (int k = 0; k <= deg; ++k)
      a[k] = u1[k] * std::pow(theta, k) / scale;
    fft::transform(a, false);
    for (auto& z : a) {
      std::complex<double> base = z, r = 1.0;
      for (long long e = n; e > 0; e >>= 1) {
        if (e & 1) r *= base;
        base *= base;
      }
      z = r;
    }
    fft::transform(a, true);
    double peak = 0.0;
    for (const auto& z : a) peak = std::max(peak, z.real());
    double val = a[static_cast<std::size_t>(n) - 2].real();
    if (!(val > peak * 1e-12)) {
      // combinatorially unreachable within the lattice, or buried in noise
      if (val > 0.0) flags[n] = 1;
      continue;
    }
    double lw = std::log(mu1) - std::log(n - 1.0) + std::log(val) +
                static_cast<double>(n) * std::log(scale) -
                (static_cast<double>(n) - 2.0) * std::log(theta);
    w[n] = std::exp(lw);
  }
}

void series_values(const std::vector<double>& marginal,
                   const std::vector<double>& u1, int n_max,
                   const SupportInfo& info, const Saddle& saddle,
                   std::vector<double>& w, std::vector<std::uint8_t>& flags) {
  if (n_max < 2) return;
  // Rescale so the solution series has radius ~1 and flat coefficients: with
  // V(x) = W1(beta x), V = x * (beta U1)(V) and w(n) = [x^n] W = what the
  // composed series yields times beta^{-(n-1)}.
  double beta = (saddle.found && std::isfinite(saddle.rho)) ? saddle.rho : 1.0;
  std::size_t count = static_cast<std::size_t>(n_max);  // coeffs 0..n_max-1
  std::vector<double> scaled(u1.size());
  for (std::size_t k = 0; k < u1.size(); ++k) scaled[k] = beta * u1[k];
  std::vector<double> v = series::fixed_point_series(scaled, count);
  std::vector<double> composed = series::compose_polynomial(marginal, v, count);
  double log_beta = std::log(beta);
  for (int n = 2; n <= n_max; ++n) {
    if (!target_on_lattice(info, n)) continue;
    double coeff = composed[static_cast<std::size_t>(n) - 1];
    if (coeff <= 0.0) {
      if (coeff < 0.0) flags[n] = 1;
      continue;
    }
    w[n] = (beta == 1.0)
               ? coeff
               : std::exp(std::log(coeff) -
                          (static_cast<double>(n) - 1.0) * log_beta);
  }
}

// Entries flagged by a backend or sitting below the relative noise floor are
// recomputed by the reference backend when affordable, otherwise zeroed and
// left flagged. The repair pass cross-checks a few healthy entries so a
// disagreeing backend cannot slip through.
void apply_noise_floor(const std::vector<double>& u1, double mu1,
                       std::vector<double>& w,
                       std::vector<std::uint8_t>& flags, double& floor_out) {
  int n_max = static_cast<int>(w.size()) - 1;
  double wmax = 0.0;
  for (int n = 1; n <= n_max; ++n) wmax = std::max(wmax, w[n]);
  if (wmax <= 0.0) {
    floor_out = 0.0;
    return;
  }
  double floor = kFloorFactor * wmax;
  floor_out = floor;
  int worst = 0;
  for (int n = 2; n <= n_max; ++n)
    if (flags[n] || (w[n] > 0.0 && w[n] < floor)) worst = n;
  if (worst == 0) return;

  std::size_t deg = u1.size();
  int budget = static_cast<int>(
      std::sqrt(kRepairBudget / static_cast<double>(std::max<std::size_t>(deg, 1))));
  int limit = std::min(kRepairLimit, budget);
  if (worst <= limit) {
    std::vector<double> ref(worst + 1, 0.0);
    direct_values(u1, mu1, worst, ref);
    // sentinels: healthy entries must agree with the reference
    int checked = 0;
    for (int n = 2; n <= worst && checked < 5; ++n) {
      if (flags[n] || w[n] < floor || w[n] <= 0.0) continue;
      double diff = std::abs(w[n] - ref[n]);
      if (diff > 1e-6 * std::max(w[n], ref[n]))
        throw NumericError("backend disagrees with reference at n=" +
                           std::to_string(n));
      ++checked;
      n += std::max(1, worst / 6);
    }
    for (int n = 2; n <= worst; ++n) {
      if (flags[n] || (w[n] > 0.0 && w[n] < floor)) {
        w[n] = ref[n];
        flags[n] = 0;
      }
    }
  } else {
    for (int n = 2; n <= n_max; ++n) {
      if (flags[n] || (w[n] > 0.0 && w[n] < floor)) {
        w[n] = 0.0;
        flags[n] = 1;
      }
    }
  }
}

// Tail mass estimate beyond n_max assuming the envelope C n^{-3/2} e^{-a n}:
//   sum_{n>N} ~ C (2 e^{-aN}/sqrt(N) - 2 sqrt(pi a) erfc(sqrt(aN))) / step.
double estimate_deficit(const std::vector<double>& w, const SupportInfo& info,
                        const Saddle& saddle) {
  int n_max = static_cast<int>(w.size()) - 1;
  int last = 0;
  for (int n = n_max; n >= 2; --n)
    if (w[n] > 0.0) {
      last = n;
      break;
    }
  if (last < 8) return 0.0;
  int period = std::max(1, info.step);
  if (n_max - last > 3 * period) return 0.0;  // support genuinely ended

  double a;
  if (saddle.found && std::isfinite(saddle.rho)) {
    a = std::log(saddle.rho);
  } else {
    // fit the decay rate on the last populated stretch
    int first = last;
    int seen = 0;
    for (int n = last; n >= 2 && seen < 16; n -= 1)
      if (w[n] > 0.0) {
        first = n;
        ++seen;
      }
    if (first == last || w[first] <= 0.0) return 0.0;
    a = (std::log(w[first]) - std::log(w[last])) / (last - first);
  }
  if (!(a > 0.0)) a = 0.0;

  double n0 = static_cast<double>(last);
  double big_n = static_cast<double>(n_max);
  double log_c = std::log(w[last]) + 1.5 * std::log(n0) + a * n0;
  double tail;
  if (a == 0.0) {
    tail = 2.0 / std::sqrt(big_n);
  } else {
    double an = a * big_n;
    tail = 2.0 * std::exp(-an) / std::sqrt(big_n) -
           2.0 * std::sqrt(M_PI * a) * std::erfc(std::sqrt(an));
  }
  double deficit = std::exp(log_c) * tail / period;
  return std::max(deficit, 0.0);
}

void validate_n_max(int n_max) {
  if (n_max < 1) throw DomainError("n_max must be >= 1");
  if (n_max > (1 << 22))
    throw DomainError("n_max beyond supported range (max 2^22)");
}

}  // namespace

std::vector<double> biased_degree(const DegreeDistribution& d) {
  double mu1 = moments_exact(d).mu1;
  if (!(mu1 > 0.0))
    throw DomainError("size-biased degree undefined: no edges (mu1 = 0)");
  const auto& u = d.marginal();
  std::vector<double> u1(u.size() > 1 ? u.size() - 1 : 1, 0.0);
  for (std::size_t k = 0; k + 1 < u.size(); ++k)
    u1[k] = (static_cast<double>(k) + 1.0) * u[k + 1] / mu1;
  return u1;
}

SizeDistribution size_distribution(const DegreeDistribution& d, int n_max,
                                   SizeDistMethod method) {
  validate_n_max(n_max);
  SizeDistribution out;
  out.state = d.state();
  out.method = method;
  out.values.assign(n_max + 1, 0.0);
  out.clamped.assign(n_max + 1, 0.0);
  out.values[1] = d.u(0);

  double mu1 = moments_exact(d).mu1;
  if (mu1 > 0.0 && n_max >= 2) {
    std::vector<double> u1 = biased_degree(d);
    SupportInfo info = support_info(u1);
    Saddle saddle = saddle_point(u1);
    switch (method) {
      case SizeDistMethod::kDirectConvolution:
        direct_values(u1, mu1, n_max, out.values);
        break;
      case SizeDistMethod::kPerSizeFft:
        per_size_fft_values(u1, mu1, n_max, info, out.values, out.clamped);
        apply_noise_floor(u1, mu1, out.values, out.clamped, out.noise_floor);
        break;
      case SizeDistMethod::kSeriesInversion:
        series_values(d.marginal(), u1, n_max, info, saddle, out.values,
                      out.clamped);
        apply_noise_floor(u1, mu1, out.values, out.clamped, out.noise_floor);
        break;
    }
    out.mass = compensated_sum(out.values);
    out.truncation_deficit = estimate_deficit(out.values, info, saddle);
  } else {
    out.mass = out.values[1];
    out.truncation_deficit = 0.0;
  }
  return out;
}

SizeDistribution size_distribution_adaptive(const DegreeDistribution& d,
                                            double mass_tol,
                                            SizeDistMethod method, int n_cap) {
  if (!(mass_tol > 0.0)) throw DomainError("mass_tol must be positive");
  validate_n_max(n_cap);
  double target = 1.0;
  {
    ComponentStats stats = component_stats(d);
    if (stats.gel_fraction > 0.0) target = 1.0 - stats.gel_fraction;
  }
  int n = 256;
  SizeDistribution out;
  for (;;) {
    out = size_distribution(d, std::min(n, n_cap), method);
    double gap = std::abs(target - out.mass - out.truncation_deficit);
    if ((gap <= 0.5 * mass_tol && out.truncation_deficit <= 0.5 * mass_tol) ||
        n >= n_cap)
      return out;
    n *= 2;
  }
}

SizeDistribution size_distribution_monodisperse(int m, const SystemState& state,
                                                int n_max) {
  if (m < 1) throw DomainError("functionality must be >= 1");
  validate_n_max(n_max);
  SizeDistribution out;
  out.state = state;
  out.method = SizeDistMethod::kDirectConvolution;  // exact closed form
  out.values.assign(n_max + 1, 0.0);
  out.clamped.assign(n_max + 1, 0.0);

  double c = state.c;
  out.values[1] = std::pow(1.0 - c, m);
  double mu1 = c * m;
  if (mu1 > 0.0) {
    double log_c = std::log(c);
    double log_1mc = (c < 1.0) ? std::log1p(-c) : -kInf;
    for (int n = 2; n <= n_max; ++n) {
      // w(n) = mu1/(n-1) * C(n(m-1), n-2) * c^(n-2) * (1-c)^(n(m-2)+2)
      long long big_n = static_cast<long long>(n) * (m - 1);
      long long k = n - 2;
      if (k > big_n) continue;
      long long rest = big_n - k;  // = n(m-2) + 2
      if (c >= 1.0 && rest > 0) continue;
      double lg = std::log(mu1) - std::log(n - 1.0) +
                  std::lgamma(static_cast<double>(big_n) + 1.0) -
                  std::lgamma(static_cast<double>(k) + 1.0) -
                  std::lgamma(static_cast<double>(rest) + 1.0) +
                  static_cast<double>(k) * log_c;
      if (rest > 0) lg += static_cast<double>(rest) * log_1mc;
      out.values[n] = std::exp(lg);
    }
    std::vector<double> u1 = detail::binomial_row(m - 1, c);
    SupportInfo info = support_info(u1);
    out.mass = compensated_sum(out.values);
    out.truncation_deficit = estimate_deficit(out.values, info,
                                              saddle_point(u1));
  } else {
    out.mass = out.values[1];
  }
  return out;
}

AsymptoteCoefficients asymptote(const DegreeDistribution& d) {
  const SystemState& st = d.state();
  if (!(st.c > 0.0))
    throw DomainError("asymptote undefined at zero bond density");
  MomentSet mu = moments_exact(d);
  double disc = mu.mu1 * mu.mu3 - mu.mu2 * mu.mu2;
  if (!(disc > 0.0))
    throw DomainError("degenerate degree variance: no large-n asymptote");
  AsymptoteCoefficients out;
  out.c1 = mu.mu1 * mu.mu1 / std::sqrt(2.0 * M_PI * disc);
  double num = mu.mu2 - 2.0 * mu.mu1;
  out.c2 = num * num / (2.0 * disc);

  double tau = st.rate_scale * st.t;
  if (std::isfinite(tau) && tau > 0.0) {
    double mu01 = st.mu01, mu02 = st.mu02;
    double bracket = 2.0 + 3.0 * mu01 * tau - mu02 * tau;
    double denom1 = 2.0 * M_PI * (mu02 - mu01) * bracket;
    out.c1_explicit =
        denom1 > 0.0 ? mu01 * mu01 * std::sqrt(tau) / std::sqrt(denom1) : kNaN;
    double e = 1.0 - (mu02 - 2.0 * mu01) * tau;
    double denom2 = 2.0 * tau * (mu02 - mu01) * bracket;
    out.c2_explicit = denom2 > 0.0 ? e * e / denom2 : kNaN;
  } else {
    out.c1_explicit = kNaN;
    out.c2_explicit = kNaN;
  }
  return out;
}

double fixed_point_r0(const DegreeDistribution& d) {
  MomentSet mu = moments_exact(d);
  if (!(mu.mu1 > 0.0)) return 1.0;  // no edges: limit value
  std::vector<double> u1 = biased_degree(d);
  if (u1[0] == 0.0) return 0.0;  // biased vertex always continues outward
  double crit = mu.mu2 - 2.0 * mu.mu1;
  if (crit <= 0.0) return 1.0;  // at or before the transition

  // Monotone iteration brackets from below, Newton finishes. Both stay left
  // of the root because U1 is increasing and convex.
  double x = 0.0;
  for (int i = 0; i < 64; ++i) x = poly_eval(u1, x);
  bool converged = false;
  double prev_step = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    double fx = poly_eval(u1, x) - x;
    double dfx = poly_deriv_eval(u1, x) - 1.0;
    if (!(dfx < 0.0)) break;
    double step = fx / dfx;
    x -= step;
    double mag = std::abs(step);
    // done when the update is negligible or stops shrinking; near the
    // transition the step bottoms out at the roundoff floor eps/|dfx|
    if (mag < 1e-15 * std::max(1.0, std::abs(x)) ||
        (i > 2 && mag >= prev_step)) {
      converged = true;
      break;
    }
    prev_step = mag;
  }
  if (!converged) {
    long iters = 0;
    double prev;
    do {
      prev = x;
      x = poly_eval(u1, x);
      if (++iters > 1000000)
        throw NumericError("fixed point iteration did not converge");
    } while (std::abs(x - prev) > 1e-14);
  }
  if (std::abs(poly_eval(u1, x) - x) > 1e-12)
    throw NumericError("fixed point residual too large");
  return std::clamp(x, 0.0, 1.0);
}

ComponentStats component_stats(const DegreeDistribution& d) {
  const SystemState& st = d.state();
  MomentSet mu = moments_exact(d);
  ComponentStats out;
  if (!(mu.mu1 > 0.0)) return out;  // no edges: isolated vertices

  double mix_crit = st.mu02 - 2.0 * st.mu01;
  if (mix_crit > 1e-12 && std::isfinite(st.t)) {
    double t_gel = 1.0 / (st.rate_scale * mix_crit);
    if (std::abs(1.0 - st.t / t_gel) < 1e-9) {
      out.diverges = true;
      out.expected_size = kInf;
      return out;
    }
  }

  double crit = mu.mu2 - 2.0 * mu.mu1;
  double crit_scale = std::max(1.0, mu.mu2);
  if (crit < -1e-12 * crit_scale) {
    out.expected_size = 1.0 - mu.mu1 * mu.mu1 / crit;
    return out;
  }
  if (std::abs(crit) <= 1e-12 * crit_scale) {
    // transition reached asymptotically at full conversion
    out.r0 = fixed_point_r0(d);
    out.gel_fraction = std::clamp(1.0 - gf_eval(d, out.r0).value, 0.0, 1.0);
    out.expected_size = kInf;
    out.diverges = true;
    return out;
  }

  out.r0 = fixed_point_r0(d);
  out.gel_fraction = std::clamp(1.0 - gf_eval(d, out.r0).value, 0.0, 1.0);
  double u1_deriv = gf_biased_eval(d, out.r0).derivative;
  double denom = (1.0 - out.gel_fraction) * (1.0 - u1_deriv);
  out.expected_size =
      denom > 0.0 ? 1.0 + mu.mu1 * out.r0 * out.r0 / denom : kNaN;
  return out;
}

}  // namespace gelkit
