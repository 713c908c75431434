// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_MODEL_HPP
#define SIRM_MODEL_HPP

#include <functional>
#include <memory>
#include <vector>

#include "sirm/types.hpp"

namespace sirm
{

// Factored solve of (I - alpha L) x = rhs for a fixed alpha.
class CnFactor
{
public:
  virtual ~CnFactor() = default;
  virtual void solve(const Vector &rhs, Vector &x) const = 0;
};

// Linear operator handled implicitly by the time integrator.
class StiffOperator
{
public:
  virtual ~StiffOperator() = default;
  virtual int dim() const = 0;
  virtual void apply(const Vector &x, Vector &out) const = 0;
  virtual std::unique_ptr<CnFactor> factor(double alpha) const = 0;
};

// Contiguous slice of the state vector holding one physical field. Models
// with a single field use one block covering the whole state.
struct FieldBlock
{
  int offset = 0;
  int length = 0;
};

// Structured reduced right-hand side attached to a basis; see
// build_reduced_model. explicit_part(t, z, out) evaluates out = Phi^T g(t, Phi z)
// without forming the full state.
struct ReducedRhs
{
  std::function<void(double, const Vector &, Vector &)> explicit_part;
};

// Semi-discrete system dx/dt = f(t, x) split as f = g + L x, with g handled
// explicitly and L implicitly. All callables must be pure with respect to
// externally visible state so that repeated evaluation is deterministic.
struct FullModel
{
  int dim = 0;
  Vector initial_state;

  // Full right-hand side f(t, x). Always present.
  std::function<void(double, const Vector &, Vector &)> eval_field;

  // Explicit remainder g(t, x) = f(t, x) - L x. Null means g = f (no stiff part).
  std::function<void(double, const Vector &, Vector &)> explicit_part;

  std::shared_ptr<const StiffOperator> stiff;  // null when fully explicit

  // Optional algebraic refresh applied after each accepted step (used to
  // re-enforce constraints such as a stream-function Poisson solve).
  std::function<void(double, Vector &)> post_step;

  // Ensemble column split; defaults to one block spanning the state.
  std::vector<FieldBlock> blocks;

  // Optional advective CFL estimate for diagnostics.
  std::function<double(double, const Vector &)> cfl_number;

  // Optional factory for a structured reduced right-hand side specialized to
  // a basis. Null means the generic lift-evaluate-project route is used.
  std::function<ReducedRhs(const Matrix &)> make_reduced_rhs;

  std::vector<FieldBlock> field_blocks() const
  {
    if (blocks.empty())
      return {FieldBlock{0, dim}};
    return blocks;
  }

  void eval(double t, const Vector &x, Vector &out) const { eval_field(t, x, out); }
};

}  // namespace sirm

#endif  // SIRM_MODEL_HPP
