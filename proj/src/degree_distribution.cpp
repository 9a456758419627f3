#include "gelkit/degree_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "gelkit/errors.hpp"
#include "gelkit/numeric.hpp"

namespace gelkit {

namespace detail {

std::vector<double> binomial_row(int m, double c) {
  std::vector<double> row(m + 1, 0.0);
  if (c <= 0.0) {
    row[0] = 1.0;
    return row;
  }
  if (c >= 1.0) {
    row[m] = 1.0;
    return row;
  }
  if (m <= 60) {
    std::uint64_t binom = 1;  // C(m, n), exact in 64 bits up to m = 60
    for (int n = 0; n <= m; ++n) {
      row[n] = static_cast<double>(binom) * std::pow(c, n) *
               std::pow(1.0 - c, m - n);
      if (n < m) binom = binom * static_cast<std::uint64_t>(m - n) /
                         static_cast<std::uint64_t>(n + 1);
    }
  } else {
    double log_c = std::log(c);
    double log_1mc = std::log1p(-c);
    double lg_m1 = std::lgamma(m + 1.0);
    for (int n = 0; n <= m; ++n) {
      double lg = lg_m1 - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0);
      row[n] = std::exp(lg + n * log_c + (m - n) * log_1mc);
    }
  }
  return row;
}

}  // namespace detail

DegreeDistribution::DegreeDistribution(const FunctionalityDistribution& f,
                                       const SystemState& state) {
  state_ = state;
  marginal_.assign(f.max_m() + 1, 0.0);
  std::vector<KahanAccumulator> acc(f.max_m() + 1);
  for (const auto& [m, fm] : f.entries()) {
    support_.push_back(m);
    std::vector<double> row = detail::binomial_row(m, state.c);
    for (double& x : row) x *= fm;
    for (int n = 0; n <= m; ++n) acc[n].add(row[n]);
    rows_.push_back(std::move(row));
  }
  for (std::size_t n = 0; n < marginal_.size(); ++n)
    marginal_[n] = acc[n].value();
}

DegreeDistribution DegreeDistribution::from_rows(
    const FunctionalityDistribution& f, const SystemState& state,
    std::vector<std::vector<double>> rows, double tolerance) {
  if (rows.size() != f.entries().size())
    throw DomainError("row count does not match mixture support");
  DegreeDistribution d;
  d.state_ = state;
  d.marginal_.assign(f.max_m() + 1, 0.0);
  std::vector<KahanAccumulator> acc(f.max_m() + 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& [m, fm] = f.entries()[i];
    auto& row = rows[i];
    if (row.size() != static_cast<std::size_t>(m) + 1)
      throw DomainError("row for m=" + std::to_string(m) + " has wrong length");
    KahanAccumulator row_sum;
    for (double& x : row) {
      if (x < -tolerance)
        throw NumericError("negative probability in row m=" +
                           std::to_string(m));
      if (x < 0.0) x = 0.0;
      row_sum.add(x);
    }
    if (std::abs(row_sum.value() - fm) > tolerance)
      throw NumericError("row mass for m=" + std::to_string(m) +
                         " deviates from mixture fraction by " +
                         std::to_string(std::abs(row_sum.value() - fm)));
    d.support_.push_back(m);
    for (int n = 0; n <= m; ++n) acc[n].add(row[n]);
    d.rows_.push_back(std::move(row));
  }
  for (std::size_t n = 0; n < d.marginal_.size(); ++n)
    d.marginal_[n] = acc[n].value();
  return d;
}

double DegreeDistribution::u(int n) const {
  if (n < 0 || n >= static_cast<int>(marginal_.size())) return 0.0;
  return marginal_[n];
}

double DegreeDistribution::u(int n, int m) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), m);
  if (it == support_.end() || *it != m) return 0.0;
  if (n < 0 || n > m) return 0.0;
  return rows_[it - support_.begin()][n];
}

const std::vector<double>& DegreeDistribution::row(int m) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), m);
  if (it == support_.end() || *it != m)
    throw DomainError("m=" + std::to_string(m) + " not in mixture support");
  return rows_[it - support_.begin()];
}

MomentSet moments_exact(const DegreeDistribution& d) {
  KahanAccumulator a1, a2, a3;
  const auto& u = d.marginal();
  for (std::size_t n = 1; n < u.size(); ++n) {
    double nn = static_cast<double>(n);
    a1.add(nn * u[n]);
    a2.add(nn * nn * u[n]);
    a3.add(nn * nn * nn * u[n]);
  }
  return {a1.value(), a2.value(), a3.value()};
}

ClosedFormMoments moments_closed_form(const FunctionalityDistribution& f,
                                      const SystemState& state) {
  double c = state.c;
  double mu01 = f.partial_moment(1);
  double mu02 = f.partial_moment(2);
  double mu03 = f.partial_moment(3);
  ClosedFormMoments out;
  out.mu1 = c * mu01;
  out.mu2 = c * (1.0 - c) * mu01 + c * c * mu02;
  out.mu3 = c * (1.0 - c) * (1.0 - 2.0 * c) * mu01 +
            3.0 * c * c * (1.0 - c) * mu02 + c * c * c * mu03;
  // Reduced variant, written in time; misses the mu03 contribution.
  if (std::isinf(state.t)) {
    out.mu3_reduced = std::numeric_limits<double>::quiet_NaN();
  } else {
    double tau = state.rate_scale * state.t;
    out.mu3_reduced = mu01 * mu01 * tau *
                      (1.0 - 3.0 * mu01 * tau + 4.0 * mu02 * tau) /
                      (1.0 + mu01 * tau * tau);
  }
  return out;
}

namespace {

GfValue horner_with_derivative(const std::vector<double>& coeffs, double x) {
  // value and first derivative in one pass
  double p = 0.0, dp = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) {
    dp = dp * x + p;
    p = p * x + coeffs[i];
  }
  return {p, dp};
}

}  // namespace

GfValue gf_eval(const DegreeDistribution& d, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("generating function argument must lie in [0, 1]");
  return horner_with_derivative(d.marginal(), x);
}

GfValue gf_biased_eval(const DegreeDistribution& d, double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw DomainError("generating function argument must lie in [0, 1]");
  const auto& u = d.marginal();
  double mu1 = moments_exact(d).mu1;
  if (!(mu1 > 0.0))
    throw DomainError("size-biased law undefined at zero bond density");
  // U1(x) = U'(x)/mu1; its derivative needs U''.
  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = u.size(); i-- > 1;) {
    d2 = d2 * x + d1;
    d1 = d1 * x + static_cast<double>(i) * u[i];
  }
  return {d1 / mu1, d2 / mu1};
}

}  // namespace gelkit
