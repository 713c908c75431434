// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_INTEGRATE_HPP
#define SIRM_INTEGRATE_HPP

#include "sirm/model.hpp"
#include "sirm/trajectory.hpp"

namespace sirm
{

// Second-order IMEX scheme: Adams-Bashforth 2 on the explicit part combined
// with Crank-Nicolson on the stiff operator,
//   x_{k+1} = x_k + dt (3/2 g_k - 1/2 g_{k-1}) + (dt/2) L (x_{k+1} + x_k).
// The first step uses forward Euler on g with Crank-Nicolson still applied.
struct IntegratorConfig
{
  double dt = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  int record_every = 1;  // keep every k-th step; start and end always kept

  int step_count() const;
  void validate() const;
};

struct IntegrationDiag
{
  double max_cfl = 0.0;
  bool cfl_warning = false;
  int steps = 0;
};

// Advances the full model from its initial state (or from x0 when given).
// Throws IntegratorError when a state stops being finite.
Trajectory integrate_full(const FullModel &model, const IntegratorConfig &cfg,
                          IntegrationDiag *diag = nullptr);
Trajectory integrate_full_from(const FullModel &model, const Vector &x0,
                               const IntegratorConfig &cfg, IntegrationDiag *diag = nullptr);

// Galerkin-reduced dynamics z' = Phi^T f(t, Phi z) restricted to the span of
// an orthonormal basis, advanced with the same scheme. The reduced stiff
// matrix Phi^T L Phi is treated by Crank-Nicolson with a dense factorization.
struct ReducedModel
{
  Matrix basis;              // n x k, orthonormal columns
  Matrix stiff_reduced;      // k x k, zero when the model has no stiff part
  bool has_stiff = false;
  std::function<void(double, const Vector &, Vector &)> explicit_reduced;

  int k() const { return static_cast<int>(basis.cols()); }
  Vector project(const Vector &x) const { return basis.transpose() * x; }
  Vector lift(const Vector &z) const { return basis * z; }
};

ReducedModel build_reduced_model(const Matrix &basis, const FullModel &model);

Trajectory integrate_reduced(const ReducedModel &reduced, const Vector &z0,
                             const IntegratorConfig &cfg, IntegrationDiag *diag = nullptr);

// Lifts every stride-th reduced sample (plus the final one) back to the full
// space.
Trajectory lift_trajectory(const Trajectory &ztraj, const Matrix &phi, int stride = 1);

// Stride on a reduced time grid of step reduced_dt that best matches the
// requested full-grid recording stride.
int matching_stride(const IntegratorConfig &cfg, double reduced_dt);

}  // namespace sirm

#endif  // SIRM_INTEGRATE_HPP
