#include "gelkit/master_equation.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "gelkit/errors.hpp"
#include "gelkit/numeric.hpp"
#include "gelkit/system_state.hpp"

namespace gelkit {

namespace {

using Rows = std::vector<std::vector<double>>;

// mu01 - mu10 for the current rows: expected free groups per unit.
double free_groups(const Rows& rows, const std::vector<int>& support) {
  KahanAccumulator acc;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int m = support[i];
    for (int n = 0; n <= m; ++n) acc.add((m - n) * rows[i][n]);
  }
  return acc.value();
}

Rows derivative(const Rows& rows, const std::vector<int>& support,
                double rate_scale) {
  double factor = rate_scale * free_groups(rows, support);
  Rows out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    int m = support[i];
    out[i].assign(m + 1, 0.0);
    for (int n = 0; n <= m; ++n) {
      double gain = (n > 0) ? (m - n + 1) * rows[i][n - 1] : 0.0;
      out[i][n] = factor * (gain - (m - n) * rows[i][n]);
    }
  }
  return out;
}

void axpy(Rows& y, double a, const Rows& x) {
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t n = 0; n < y[i].size(); ++n) y[i][n] += a * x[i][n];
}

void check_mass(const Rows& rows, const FunctionalityDistribution& f,
                double tol, double t) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double sum = compensated_sum(rows[i]);
    double fm = f.entries()[i].second;
    double drift = std::abs(sum - fm);
    if (drift > tol)
      throw NumericError(
          "mass drift " + std::to_string(drift) + " for m=" +
          std::to_string(f.entries()[i].first) + " at t=" + std::to_string(t) +
          "; reduce dt");
  }
}

}  // namespace

DegreeDistribution integrate_master_equation(const FunctionalityDistribution& f,
                                             double t_end, double dt,
                                             double rate_scale,
                                             double mass_tolerance) {
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw DomainError("t_end must be finite and >= 0");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");

  std::vector<int> support;
  Rows rows;
  for (const auto& [m, fm] : f.entries()) {
    support.push_back(m);
    rows.emplace_back(m + 1, 0.0);
    rows.back()[0] = fm;
  }

  long n_steps =
      (t_end > 0.0) ? static_cast<long>(std::ceil(t_end / dt - 1e-12)) : 0;
  double h = (n_steps > 0) ? t_end / n_steps : 0.0;
  for (long step = 0; step < n_steps; ++step) {
    Rows k1 = derivative(rows, support, rate_scale);
    Rows stage = rows;
    axpy(stage, 0.5 * h, k1);
    Rows k2 = derivative(stage, support, rate_scale);
    stage = rows;
    axpy(stage, 0.5 * h, k2);
    Rows k3 = derivative(stage, support, rate_scale);
    stage = rows;
    axpy(stage, h, k3);
    Rows k4 = derivative(stage, support, rate_scale);

    axpy(rows, h / 6.0, k1);
    axpy(rows, h / 3.0, k2);
    axpy(rows, h / 3.0, k3);
    axpy(rows, h / 6.0, k4);

    if ((step & 0x3FF) == 0x3FF)
      check_mass(rows, f, mass_tolerance, (step + 1) * h);
  }
  check_mass(rows, f, mass_tolerance, t_end);

  SystemState state = state_from_time(f, t_end, rate_scale);
  return DegreeDistribution::from_rows(f, state, std::move(rows),
                                       mass_tolerance);
}

}  // namespace gelkit
