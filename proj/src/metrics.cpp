// SPDX-License-Identifier: Apache-2.0

#include "sirm/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace sirm
{

ErrorMetrics compare_against_reference(const Trajectory &candidate, const Trajectory &reference,
                                       double scale)
{
  if (candidate.empty() || reference.empty())
    throw std::invalid_argument("compare_against_reference: empty trajectory");
  if (candidate.dim() != reference.dim())
    throw std::invalid_argument("compare_against_reference: dimension mismatch");
  if (scale <= 0.0)
    throw std::invalid_argument("compare_against_reference: scale must be positive");
  const double lo = std::max(candidate.t_start(), reference.t_start());
  const double hi = std::min(candidate.t_end(), reference.t_end());
  if (hi <= lo)
    throw std::invalid_argument("compare_against_reference: time ranges do not overlap");

  ErrorMetrics em;
  for (double t : candidate.times) {
    if (t < lo - 1e-12 || t > hi + 1e-12)
      continue;
    const double e = scale * (candidate.state_at(t) - reference.state_at(t)).norm();
    em.times.push_back(t);
    em.errors.push_back(e);
    em.sup_error = std::max(em.sup_error, e);
    em.final_error = e;
  }
  if (em.times.empty())
    throw std::invalid_argument("compare_against_reference: no shared samples");
  return em;
}

PowerFit fit_loglog(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need at least two matching points");
  const int n = static_cast<int>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0)
      throw std::invalid_argument("fit_loglog: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0)
    throw std::invalid_argument("fit_loglog: degenerate abscissae");
  PowerFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.exponent * sx) / n;
  const double ss_tot = syy - sy * sy / n;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.exponent * std::log(x[i]) + fit.intercept;
    const double res = std::log(y[i]) - pred;
    ss_res += res * res;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double pearson_correlation(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("pearson_correlation: need at least two matching points");
  const int n = static_cast<int>(x.size());
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0)
    throw std::invalid_argument("pearson_correlation: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sirm
