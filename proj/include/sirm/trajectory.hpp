// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_TRAJECTORY_HPP
#define SIRM_TRAJECTORY_HPP

#include <vector>

#include "sirm/types.hpp"

namespace sirm
{

// Sampled solution: states.col(i) is the state at times[i]. Times are
// strictly increasing.
struct Trajectory
{
  std::vector<double> times;
  Matrix states;

  int dim() const { return static_cast<int>(states.rows()); }
  int size() const { return static_cast<int>(times.size()); }
  bool empty() const { return times.empty(); }
  double t_start() const { return times.front(); }
  double t_end() const { return times.back(); }

  // Linear interpolation between stored samples; t is clamped to the stored
  // range (endpoint states are returned outside it).
  Vector state_at(double t) const;

  // Appends other, dropping other's first column when it duplicates this
  // trajectory's final time.
  void append(const Trajectory &other);
};

}  // namespace sirm

#endif  // SIRM_TRAJECTORY_HPP
