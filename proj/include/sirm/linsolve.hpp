// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_LINSOLVE_HPP
#define SIRM_LINSOLVE_HPP

#include "sirm/types.hpp"

namespace sirm
{

struct LinearSolveStats
{
  int iterations = 0;
  double residual_norm = 0.0;  // relative to the right-hand side norm
};

// LU-style factorization of a cyclic tridiagonal matrix: tridiagonal bands
// plus the two periodic corner entries A(0,n-1) and A(n-1,0). The corners are
// folded in with a rank-one Sherman-Morrison correction, so each solve costs
// two Thomas back-substitutions. Factor once, solve many times.
class CyclicTridiagFactor
{
public:
  // sub has length n-1 (A(i,i-1) = sub(i-1)), diag length n, sup length n-1
  // (A(i,i+1) = sup(i)). Throws SolverError on a zero pivot.
  CyclicTridiagFactor(const Vector &sub, const Vector &diag, const Vector &sup,
                      double corner_top_right, double corner_bottom_left);

  void solve(const Vector &rhs, Vector &x) const;
  int dim() const { return n_; }

private:
  void thomas_solve(const Vector &rhs, Vector &x) const;

  int n_ = 0;
  bool plain_ = false;       // true when both corners vanish
  Vector sub_, sup_;
  Vector inv_pivot_;         // reciprocal diagonal after forward elimination
  Vector lower_;             // multipliers sub(i)/pivot(i-1)
  Vector q_;                 // A'^{-1} u for the rank-one correction
  Vector v_;                 // correction direction (two nonzeros)
  double denom_ = 1.0;       // 1 + v^T q
};

// One-shot convenience wrapper around CyclicTridiagFactor. On success stats
// (if given) reports the relative residual of the computed solution.
Vector solve_cyclic_tridiagonal(const Vector &sub, const Vector &diag, const Vector &sup,
                                double corner_top_right, double corner_bottom_left,
                                const Vector &rhs, LinearSolveStats *stats = nullptr);

// Preconditioned conjugate gradient solver for the 5-point Dirichlet Poisson
// problem  -lap(psi) = rhs  on the interior of an n_side x n_side unit-square
// grid, psi = 0 on the walls. Fields are passed as full n_side^2 vectors in
// row-major (j*n_side + i) order; wall entries of rhs are ignored and wall
// entries of the solution are zero.
class PoissonSolver5pt
{
public:
  PoissonSolver5pt(int n_side, double rel_tol = 1e-10, int max_iterations = 0);

  // Solves into psi, using the incoming psi interior as the initial guess
  // (pass zeros for a cold start). Throws SolverError when the iteration cap
  // is hit before the residual drops below rel_tol * |rhs|.
  void solve(const Vector &rhs, Vector &psi, LinearSolveStats *stats = nullptr) const;

  // out = -lap(psi) on interior nodes (zero on walls), h-scaled.
  void apply_operator(const Vector &psi, Vector &out) const;

  int n_side() const { return side_; }
  double spacing() const { return h_; }

private:
  int side_;
  double h_;
  double rel_tol_;
  int max_iterations_;
};

}  // namespace sirm

#endif  // SIRM_LINSOLVE_HPP
