// SPDX-License-Identifier: Apache-2.0

#include "sirm/linsolve.hpp"

#include <cmath>

namespace sirm
{

namespace
{

// Forward elimination of a plain tridiagonal matrix. Returns false on a zero
// (or denormal) pivot.
bool factor_tridiag(const Vector &sub, const Vector &diag, const Vector &sup,
                    Vector &inv_pivot, Vector &lower)
{
  const int n = static_cast<int>(diag.size());
  inv_pivot.resize(n);
  lower.resize(n > 1 ? n - 1 : 0);
  double pivot = diag(0);
  if (std::abs(pivot) < 1e-300)
    return false;
  inv_pivot(0) = 1.0 / pivot;
  for (int i = 1; i < n; ++i) {
    const double m = sub(i - 1) * inv_pivot(i - 1);
    lower(i - 1) = m;
    pivot = diag(i) - m * sup(i - 1);
    if (std::abs(pivot) < 1e-300)
      return false;
    inv_pivot(i) = 1.0 / pivot;
  }
  return true;
}

}  // namespace

CyclicTridiagFactor::CyclicTridiagFactor(const Vector &sub, const Vector &diag,
                                         const Vector &sup, double corner_top_right,
                                         double corner_bottom_left)
{
  n_ = static_cast<int>(diag.size());
  if (n_ < 3)
    throw std::invalid_argument("CyclicTridiagFactor: need dimension >= 3");
  if (sub.size() != n_ - 1 || sup.size() != n_ - 1)
    throw std::invalid_argument("CyclicTridiagFactor: band length mismatch");
  sub_ = sub;
  sup_ = sup;

  plain_ = (corner_top_right == 0.0 && corner_bottom_left == 0.0);
  if (plain_) {
    if (!factor_tridiag(sub_, diag, sup_, inv_pivot_, lower_))
      throw SolverError("CyclicTridiagFactor: zero pivot");
    return;
  }

  // A = A' + u v^T with u = (gamma, 0, ..., beta)^T, v = (1, 0, ..., alpha/gamma)^T
  // where alpha = A(0,n-1), beta = A(n-1,0). A' stays tridiagonal with
  // modified first and last diagonal entries.
  const double alpha = corner_top_right;
  const double beta = corner_bottom_left;
  const double gamma = -diag(0);  // any nonzero value away from making A' singular
  Vector d = diag;
  d(0) -= gamma;
  d(n_ - 1) -= alpha * beta / gamma;
  if (!factor_tridiag(sub_, d, sup_, inv_pivot_, lower_))
    throw SolverError("CyclicTridiagFactor: zero pivot");

  Vector u = Vector::Zero(n_);
  u(0) = gamma;
  u(n_ - 1) = beta;
  v_ = Vector::Zero(n_);
  v_(0) = 1.0;
  v_(n_ - 1) = alpha / gamma;
  q_.resize(n_);
  thomas_solve(u, q_);
  denom_ = 1.0 + v_.dot(q_);
  if (std::abs(denom_) < 1e-300)
    throw SolverError("CyclicTridiagFactor: singular rank-one correction");
}

void CyclicTridiagFactor::thomas_solve(const Vector &rhs, Vector &x) const
{
  x.resize(n_);
  x(0) = rhs(0);
  for (int i = 1; i < n_; ++i)
    x(i) = rhs(i) - lower_(i - 1) * x(i - 1);
  x(n_ - 1) *= inv_pivot_(n_ - 1);
  for (int i = n_ - 2; i >= 0; --i)
    x(i) = (x(i) - sup_(i) * x(i + 1)) * inv_pivot_(i);
}

void CyclicTridiagFactor::solve(const Vector &rhs, Vector &x) const
{
  if (rhs.size() != n_)
    throw std::invalid_argument("CyclicTridiagFactor::solve: size mismatch");
  thomas_solve(rhs, x);
  if (plain_)
    return;
  const double scale = v_.dot(x) / denom_;
  x.noalias() -= scale * q_;
}

Vector solve_cyclic_tridiagonal(const Vector &sub, const Vector &diag, const Vector &sup,
                                double corner_top_right, double corner_bottom_left,
                                const Vector &rhs, LinearSolveStats *stats)
{
  CyclicTridiagFactor factor(sub, diag, sup, corner_top_right, corner_bottom_left);
  Vector x;
  factor.solve(rhs, x);
  if (stats) {
    const int n = static_cast<int>(diag.size());
    Vector r = rhs - diag.cwiseProduct(x);
    for (int i = 1; i < n; ++i)
      r(i) -= sub(i - 1) * x(i - 1);
    for (int i = 0; i < n - 1; ++i)
      r(i) -= sup(i) * x(i + 1);
    r(0) -= corner_top_right * x(n - 1);
    r(n - 1) -= corner_bottom_left * x(0);
    const double scale = rhs.norm();
    stats->iterations = 1;
    stats->residual_norm = scale > 0.0 ? r.norm() / scale : r.norm();
  }
  if (!x.allFinite())
    throw SolverError("solve_cyclic_tridiagonal: non-finite solution");
  return x;
}

PoissonSolver5pt::PoissonSolver5pt(int n_side, double rel_tol, int max_iterations)
  : side_(n_side), h_(1.0 / (n_side - 1)), rel_tol_(rel_tol), max_iterations_(max_iterations)
{
  if (n_side < 5)
    throw std::invalid_argument("PoissonSolver5pt: need at least 5 points per side");
  if (max_iterations_ <= 0)
    max_iterations_ = 20 * n_side * n_side;
}

void PoissonSolver5pt::apply_operator(const Vector &psi, Vector &out) const
{
  const int s = side_;
  const double inv_h2 = 1.0 / (h_ * h_);
  out.setZero(s * s);
  for (int j = 1; j < s - 1; ++j) {
    const int row = j * s;
    for (int i = 1; i < s - 1; ++i) {
      const int c = row + i;
      out(c) = (4.0 * psi(c) - psi(c - 1) - psi(c + 1) - psi(c - s) - psi(c + s)) * inv_h2;
    }
  }
}

void PoissonSolver5pt::solve(const Vector &rhs, Vector &psi, LinearSolveStats *stats) const
{
  const int s = side_;
  const int n = s * s;
  if (rhs.size() != n || psi.size() != n)
    throw std::invalid_argument("PoissonSolver5pt::solve: size mismatch");

  // Zero the wall entries of the iterate; they are not unknowns.
  for (int i = 0; i < s; ++i) {
    psi(i) = 0.0;
    psi(n - s + i) = 0.0;
    psi(i * s) = 0.0;
    psi(i * s + s - 1) = 0.0;
  }

  double rhs_norm2 = 0.0;
  for (int j = 1; j < s - 1; ++j)
    for (int i = 1; i < s - 1; ++i)
      rhs_norm2 += rhs(j * s + i) * rhs(j * s + i);
  const double rhs_norm = std::sqrt(rhs_norm2);
  if (rhs_norm == 0.0) {
    psi.setZero();
    if (stats) {
      stats->iterations = 0;
      stats->residual_norm = 0.0;
    }
    return;
  }
  const double tol = rel_tol_ * rhs_norm;

  // The operator has constant diagonal 4/h^2, so Jacobi preconditioning is a
  // fixed scaling; kept explicit so the code matches the stated method.
  const double inv_diag = (h_ * h_) / 4.0;

  Vector ap(n);
  apply_operator(psi, ap);
  Vector r = Vector::Zero(n);
  for (int j = 1; j < s - 1; ++j)
    for (int i = 1; i < s - 1; ++i) {
      const int c = j * s + i;
      r(c) = rhs(c) - ap(c);
    }
  Vector z = r * inv_diag;
  Vector p = z;
  double rz = r.dot(z);
  double res_norm = r.norm();

  int it = 0;
  while (res_norm > tol && it < max_iterations_) {
    apply_operator(p, ap);
    const double p_ap = p.dot(ap);
    if (p_ap <= 0.0 || !std::isfinite(p_ap))
      throw SolverError("PoissonSolver5pt: lost positive definiteness");
    const double alpha = rz / p_ap;
    psi.noalias() += alpha * p;
    r.noalias() -= alpha * ap;
    z = r * inv_diag;
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
    res_norm = r.norm();
    ++it;
  }
  if (stats) {
    stats->iterations = it;
    stats->residual_norm = res_norm / rhs_norm;
  }
  if (res_norm > tol)
    throw SolverError("PoissonSolver5pt: no convergence after " + std::to_string(it) +
                      " iterations (residual " + std::to_string(res_norm / rhs_norm) + ")");
}

}  // namespace sirm
