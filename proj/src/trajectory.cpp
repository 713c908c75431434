// SPDX-License-Identifier: Apache-2.0

#include "sirm/trajectory.hpp"

#include <algorithm>
#include <cmath>

namespace sirm
{

Vector Trajectory::state_at(double t) const
{
  if (empty())
    throw std::invalid_argument("Trajectory::state_at: empty trajectory");
  if (t <= times.front())
    return states.col(0);
  if (t >= times.back())
    return states.col(size() - 1);
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const int hi = static_cast<int>(it - times.begin());
  const int lo = hi - 1;
  const double span = times[hi] - times[lo];
  const double w = (t - times[lo]) / span;
  return (1.0 - w) * states.col(lo) + w * states.col(hi);
}

void Trajectory::append(const Trajectory &other)
{
  if (other.empty())
    return;
  if (empty()) {
    *this = other;
    return;
  }
  if (other.dim() != dim())
    throw std::invalid_argument("Trajectory::append: dimension mismatch");
  const double t_last = times.back();
  int start = 0;
  if (std::abs(other.times.front() - t_last) <= 1e-12 * std::max(1.0, std::abs(t_last)))
    start = 1;
  else if (other.times.front() < t_last)
    throw std::invalid_argument("Trajectory::append: time ranges overlap");
  const int extra = other.size() - start;
  if (extra <= 0)
    return;
  const int old = size();
  Matrix merged(dim(), old + extra);
  merged.leftCols(old) = states;
  merged.rightCols(extra) = other.states.rightCols(extra);
  states.swap(merged);
  times.insert(times.end(), other.times.begin() + start, other.times.end());
}

}  // namespace sirm
