// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_METRICS_HPP
#define SIRM_METRICS_HPP

#include <vector>

#include "sirm/trajectory.hpp"

namespace sirm
{

struct ErrorMetrics
{
  double sup_error = 0.0;    // max over compared samples of the 2-norm gap
  double final_error = 0.0;  // gap at the last shared time
  std::vector<double> times;
  std::vector<double> errors;
};

// Error of a candidate trajectory against a reference over their shared time
// range, sampled at the candidate's stored times. scale multiplies every
// norm, e.g. norm_weight(spec) to report mesh-weighted L2 values.
ErrorMetrics compare_against_reference(const Trajectory &candidate, const Trajectory &reference,
                                       double scale = 1.0);

// Least-squares fit of log(y) = exponent * log(x) + intercept.
struct PowerFit
{
  double exponent = 0.0;
  double intercept = 0.0;  // natural log of the coefficient
  double r_squared = 0.0;
};
PowerFit fit_loglog(const std::vector<double> &x, const std::vector<double> &y);

double pearson_correlation(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace sirm

#endif  // SIRM_METRICS_HPP
