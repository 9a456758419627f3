#pragma once

#include <cstddef>
#include <vector>

namespace gelkit::series {

// Truncated power series arithmetic; vectors hold ascending coefficients and
// every operation returns exactly `count` of them.

std::vector<double> mul(const std::vector<double>& a,
                        const std::vector<double>& b, std::size_t count);

// 1/a as a series; requires a[0] != 0. Newton iteration with doubling order.
std::vector<double> reciprocal(const std::vector<double>& a,
                               std::size_t count);

// poly(s(x)) for a plain polynomial (dense coefficients) and a series s with
// s[0] == 0, by Horner over series.
std::vector<double> compose_polynomial(const std::vector<double>& poly,
                                       const std::vector<double>& s,
                                       std::size_t count);

// Solves V = x * P(V) for the series V (V[0] = 0), P a polynomial given by
// dense coefficients. Newton with order doubling.
std::vector<double> fixed_point_series(const std::vector<double>& poly,
                                       std::size_t count);

}  // namespace gelkit::series
