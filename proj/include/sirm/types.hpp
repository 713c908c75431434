// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_TYPES_HPP
#define SIRM_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace sirm
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown when a linear solver cannot produce a usable answer (zero pivot,
// iteration cap, non-finite residual).
class SolverError : public std::runtime_error
{
public:
  explicit SolverError(const std::string &msg) : std::runtime_error(msg) {}
};

// Thrown when an ensemble has no usable columns (all zero or rank 0 after
// dropping near-duplicates).
class DegenerateEnsemble : public std::runtime_error
{
public:
  explicit DegenerateEnsemble(const std::string &msg) : std::runtime_error(msg) {}
};

// Thrown when time integration produces non-finite state entries.
class IntegratorError : public std::runtime_error
{
public:
  IntegratorError(const std::string &msg, int step, double time)
    : std::runtime_error(msg), step(step), time(time)
  {
  }
  int step;
  double time;
};

}  // namespace sirm

#endif  // SIRM_TYPES_HPP
