#include "gelkit/power_series.hpp"

#include <algorithm>

#include "gelkit/errors.hpp"
#include "gelkit/fft.hpp"

namespace gelkit::series {

namespace {

std::vector<double> truncated(std::vector<double> v, std::size_t count) {
  v.resize(count, 0.0);
  return v;
}

}  // namespace

std::vector<double> mul(const std::vector<double>& a,
                        const std::vector<double>& b, std::size_t count) {
  if (count == 0) return {};
  std::size_t la = std::min(a.size(), count);
  std::size_t lb = std::min(b.size(), count);
  if (la == 0 || lb == 0) return std::vector<double>(count, 0.0);
  std::vector<double> ta(a.begin(), a.begin() + la);
  std::vector<double> tb(b.begin(), b.begin() + lb);
  return truncated(fft::convolve(ta, tb), count);
}

std::vector<double> reciprocal(const std::vector<double>& a,
                               std::size_t count) {
  if (count == 0) return {};
  if (a.empty() || a[0] == 0.0)
    throw DomainError("series reciprocal needs a nonzero constant term");
  std::vector<double> b{1.0 / a[0]};
  std::size_t order = 1;
  while (order < count) {
    order = std::min(order * 2, count);
    // b <- b * (2 - a*b), correct to `order` coefficients
    std::vector<double> ab = mul(a, b, order);
    for (double& x : ab) x = -x;
    ab[0] += 2.0;
    b = mul(b, ab, order);
  }
  return truncated(std::move(b), count);
}

std::vector<double> compose_polynomial(const std::vector<double>& poly,
                                       const std::vector<double>& s,
                                       std::size_t count) {
  if (count == 0) return {};
  if (!s.empty() && s[0] != 0.0)
    throw DomainError("series composition needs s(0) == 0");
  std::vector<double> r(count, 0.0);
  if (poly.empty()) return r;
  r[0] = poly.back();
  for (std::size_t i = poly.size() - 1; i-- > 0;) {
    r = mul(r, s, count);
    r[0] += poly[i];
  }
  return r;
}

std::vector<double> fixed_point_series(const std::vector<double>& poly,
                                       std::size_t count) {
  if (count == 0) return {};
  std::vector<double> deriv;
  for (std::size_t k = 1; k < poly.size(); ++k)
    deriv.push_back(static_cast<double>(k) * poly[k]);

  std::vector<double> v(count, 0.0);
  if (count >= 2 && !poly.empty()) v[1] = poly[0];
  if (poly.size() <= 1 || count <= 2) return v;  // x*p0 is already exact

  std::size_t order = 2;
  while (order < count) {
    std::size_t prev = order;
    order = std::min(order * 2, count);
    std::vector<double> vt(v.begin(), v.begin() + order);
    // residual R = V - x*P(V)
    std::vector<double> pv = compose_polynomial(poly, vt, order);
    std::vector<double> resid(order, 0.0);
    for (std::size_t k = 1; k < order; ++k) resid[k] = vt[k] - pv[k - 1];
    // derivative D = 1 - x*P'(V)
    std::vector<double> dpv = compose_polynomial(deriv, vt, order);
    std::vector<double> d(order, 0.0);
    d[0] = 1.0;
    for (std::size_t k = 1; k < order; ++k) d[k] = -dpv[k - 1];
    std::vector<double> step = mul(resid, reciprocal(d, order), order);
    // coefficients below `prev` are already exact; the step there is pure
    // transform roundoff and must not leak in (v[0] stays a hard zero)
    for (std::size_t k = prev; k < order; ++k) vt[k] -= step[k];
    std::copy(vt.begin(), vt.end(), v.begin());
  }
  return v;
}

}  // namespace gelkit::series
