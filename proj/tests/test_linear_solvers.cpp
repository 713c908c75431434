// SPDX-License-Identifier: Apache-2.0

// Direct cyclic tridiagonal solves and the 5-point Poisson CG solver,
// checked against dense factorizations and a manufactured solution.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sirm/linsolve.hpp"
#include "sirm/types.hpp"

namespace
{

// Assembles the full matrix A from its bands and periodic corners.
sirm::Matrix dense_cyclic(const sirm::Vector &sub, const sirm::Vector &diag,
                          const sirm::Vector &sup, double tr, double bl)
{
  const int n = static_cast<int>(diag.size());
  sirm::Matrix a = sirm::Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, i) = diag(i);
  for (int i = 1; i < n; ++i) a(i, i - 1) = sub(i - 1);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = sup(i);
  a(0, n - 1) += tr;
  a(n - 1, 0) += bl;
  return a;
}

}  // namespace

TEST_CASE("cyclic tridiagonal solve matches a dense factorization")
{
  std::mt19937 rng(1234);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int n : {3, 5, 17, 64}) {
    sirm::Vector sub(n - 1), diag(n), sup(n - 1), rhs(n);
    for (int i = 0; i < n; ++i) {
      diag(i) = 4.0 + unit(rng);  // diagonally dominant keeps pivots healthy
      rhs(i) = unit(rng);
    }
    for (int i = 0; i < n - 1; ++i) {
      sub(i) = unit(rng);
      sup(i) = unit(rng);
    }
    const double tr = unit(rng);
    const double bl = unit(rng);

    sirm::LinearSolveStats stats;
    sirm::Vector x = sirm::solve_cyclic_tridiagonal(sub, diag, sup, tr, bl, rhs, &stats);

    sirm::Matrix a = dense_cyclic(sub, diag, sup, tr, bl);
    sirm::Vector x_ref = a.partialPivLu().solve(rhs);
    CHECK((x - x_ref).norm() <= 1e-8 * x_ref.norm());
    CHECK(stats.residual_norm <= 1e-10);
  }
}

TEST_CASE("zero corners fall back to a plain tridiagonal solve")
{
  const int n = 12;
  sirm::Vector sub = sirm::Vector::Constant(n - 1, -1.0);
  sirm::Vector diag = sirm::Vector::Constant(n, 2.5);
  sirm::Vector sup = sirm::Vector::Constant(n - 1, -1.0);
  sirm::Vector rhs = sirm::Vector::LinSpaced(n, 0.0, 1.0);

  sirm::Vector x = sirm::solve_cyclic_tridiagonal(sub, diag, sup, 0.0, 0.0, rhs);
  sirm::Matrix a = dense_cyclic(sub, diag, sup, 0.0, 0.0);
  sirm::Vector x_ref = a.partialPivLu().solve(rhs);
  CHECK((x - x_ref).norm() <= 1e-10 * x_ref.norm());
}

TEST_CASE("one factorization serves many right-hand sides")
{
  const int n = 40;
  sirm::Vector sub = sirm::Vector::Constant(n - 1, 1.0);
  sirm::Vector diag = sirm::Vector::Constant(n, -4.0);
  sirm::Vector sup = sirm::Vector::Constant(n - 1, 1.0);
  sirm::CyclicTridiagFactor factor(sub, diag, sup, 1.0, 1.0);
  CHECK(factor.dim() == n);

  sirm::Matrix a = dense_cyclic(sub, diag, sup, 1.0, 1.0);
  Eigen::PartialPivLU<sirm::Matrix> lu(a);
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    sirm::Vector rhs(n), x(n);
    for (int i = 0; i < n; ++i) rhs(i) = unit(rng);
    factor.solve(rhs, x);
    sirm::Vector x_ref = lu.solve(rhs);
    CHECK((x - x_ref).norm() <= 1e-9 * x_ref.norm());
  }
}

TEST_CASE("a vanishing pivot is reported instead of dividing by zero")
{
  sirm::Vector sub = sirm::Vector::Zero(2);
  sirm::Vector diag(3);
  diag << 1.0, 0.0, 1.0;  // second pivot is exactly zero
  sirm::Vector sup = sirm::Vector::Zero(2);
  CHECK_THROWS_AS(sirm::CyclicTridiagFactor(sub, diag, sup, 0.0, 0.0), sirm::SolverError);
}

TEST_CASE("Poisson solve matches a dense interior factorization")
{
  const int side = 9;
  const double h = 1.0 / (side - 1);
  const int interior = side - 2;
  const int m = interior * interior;

  // Dense -lap on interior nodes, row-major interior index (jj*interior + ii).
  sirm::Matrix a = sirm::Matrix::Zero(m, m);
  for (int jj = 0; jj < interior; ++jj) {
    for (int ii = 0; ii < interior; ++ii) {
      const int row = jj * interior + ii;
      a(row, row) = 4.0 / (h * h);
      if (ii > 0) a(row, row - 1) = -1.0 / (h * h);
      if (ii < interior - 1) a(row, row + 1) = -1.0 / (h * h);
      if (jj > 0) a(row, row - interior) = -1.0 / (h * h);
      if (jj < interior - 1) a(row, row + interior) = -1.0 / (h * h);
    }
  }

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  sirm::Vector rhs_full = sirm::Vector::Zero(side * side);
  sirm::Vector rhs_int(m);
  for (int jj = 0; jj < interior; ++jj)
    for (int ii = 0; ii < interior; ++ii) {
      const double v = unit(rng);
      rhs_int(jj * interior + ii) = v;
      rhs_full((jj + 1) * side + (ii + 1)) = v;
    }

  sirm::PoissonSolver5pt solver(side, 1e-12);
  sirm::Vector psi = sirm::Vector::Zero(side * side);
  sirm::LinearSolveStats stats;
  solver.solve(rhs_full, psi, &stats);
  CHECK(stats.iterations > 0);

  sirm::Vector psi_ref = a.partialPivLu().solve(rhs_int);
  double max_dev = 0.0;
  for (int jj = 0; jj < interior; ++jj)
    for (int ii = 0; ii < interior; ++ii)
      max_dev = std::max(max_dev,
                         std::abs(psi((jj + 1) * side + (ii + 1)) - psi_ref(jj * interior + ii)));
  CHECK(max_dev <= 1e-9 * psi_ref.cwiseAbs().maxCoeff());

  // Walls stay exactly zero.
  for (int i = 0; i < side; ++i) {
    CHECK(psi(i) == 0.0);
    CHECK(psi((side - 1) * side + i) == 0.0);
    CHECK(psi(i * side) == 0.0);
    CHECK(psi(i * side + side - 1) == 0.0);
  }
}

TEST_CASE("applying the operator to a solve recovers the right-hand side")
{
  const int side = 17;
  sirm::PoissonSolver5pt solver(side, 1e-13);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  sirm::Vector rhs = sirm::Vector::Zero(side * side);
  for (int j = 1; j < side - 1; ++j)
    for (int i = 1; i < side - 1; ++i) rhs(j * side + i) = unit(rng);

  sirm::Vector psi = sirm::Vector::Zero(side * side);
  solver.solve(rhs, psi);
  sirm::Vector back(side * side);
  solver.apply_operator(psi, back);
  double max_dev = 0.0;
  for (int j = 1; j < side - 1; ++j)
    for (int i = 1; i < side - 1; ++i)
      max_dev = std::max(max_dev, std::abs(back(j * side + i) - rhs(j * side + i)));
  CHECK(max_dev <= 1e-9);
}

TEST_CASE("Poisson solve converges at second order on a smooth solution")
{
  // -lap(sin(pi x) sin(pi y)) = 2 pi^2 sin(pi x) sin(pi y), zero on the walls.
  auto max_error = [](int side) {
    const double h = 1.0 / (side - 1);
    sirm::Vector rhs(side * side), exact(side * side);
    for (int j = 0; j < side; ++j)
      for (int i = 0; i < side; ++i) {
        const double x = i * h, y = j * h;
        const double s = std::sin(M_PI * x) * std::sin(M_PI * y);
        exact(j * side + i) = s;
        rhs(j * side + i) = 2.0 * M_PI * M_PI * s;
      }
    sirm::PoissonSolver5pt solver(side, 1e-12);
    sirm::Vector psi = sirm::Vector::Zero(side * side);
    solver.solve(rhs, psi);
    return (psi - exact).cwiseAbs().maxCoeff();
  };

  const double e_coarse = max_error(17);
  const double e_fine = max_error(33);
  CHECK(e_coarse < 5e-3);
  // Halving h should shrink the error by about 4; allow slack for the
  // iterative tolerance.
  CHECK(e_coarse / e_fine > 3.3);
  CHECK(e_coarse / e_fine < 4.7);
}
