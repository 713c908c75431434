// SPDX-License-Identifier: Apache-2.0

// Ensemble assembly and basis extraction: orthonormality, energy bookkeeping
// against an eigensolver oracle, the mode-count criterion, Gram-Schmidt
// dropping, and principal angles.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sirm/basis.hpp"
#include "sirm/types.hpp"

namespace
{

sirm::Matrix random_matrix(int rows, int cols, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  sirm::Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

// Rank-r matrix with a prescribed singular spectrum.
sirm::Matrix matrix_with_spectrum(int rows, int cols, const sirm::Vector &sv, unsigned seed)
{
  const int r = static_cast<int>(sv.size());
  sirm::Matrix u = random_matrix(rows, r, seed);
  sirm::Matrix v = random_matrix(cols, r, seed + 1);
  u = Eigen::HouseholderQR<sirm::Matrix>(u).householderQ() * sirm::Matrix::Identity(rows, r);
  v = Eigen::HouseholderQR<sirm::Matrix>(v).householderQ() * sirm::Matrix::Identity(cols, r);
  return u * sv.asDiagonal() * v.transpose();
}

}  // namespace

TEST_CASE("ensemble assembly splits snapshots per field block and scales tangents")
{
  const int n = 6;
  sirm::Matrix states = random_matrix(n, 3, 10);
  sirm::Matrix tangents = random_matrix(n, 3, 11);
  std::vector<sirm::FieldBlock> blocks{{0, 2}, {2, 4}};
  const double gamma = 0.25;

  sirm::InformationMatrix info =
      sirm::assemble_information_matrix(states, tangents, blocks, gamma);
  CHECK(info.snapshot_count == 3);
  CHECK(info.block_count == 2);
  CHECK(info.gamma == gamma);
  REQUIRE(info.columns.rows() == n);
  REQUIRE(info.columns.cols() == 12);  // 3 snapshots * 2 blocks, states then tangents

  // State column for snapshot s and block b holds that block and zeros elsewhere.
  for (int s = 0; s < 3; ++s) {
    const sirm::Vector &x = states.col(s);
    sirm::Vector c0 = info.columns.col(2 * s);
    CHECK(c0.head(2) == x.head(2));
    CHECK(c0.tail(4).cwiseAbs().maxCoeff() == 0.0);
    sirm::Vector c1 = info.columns.col(2 * s + 1);
    CHECK(c1.head(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(c1.tail(4) == x.tail(4));
  }
  // Tangent columns follow, scaled by gamma.
  for (int s = 0; s < 3; ++s) {
    sirm::Vector c0 = info.columns.col(6 + 2 * s);
    CHECK((c0.head(2) - gamma * tangents.col(s).head(2)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(c0.tail(4).cwiseAbs().maxCoeff() == 0.0);
  }

  // A single spanning block reduces to plain [X, gamma F].
  sirm::InformationMatrix plain =
      sirm::assemble_information_matrix(states, tangents, {{0, n}}, 1.0);
  REQUIRE(plain.columns.cols() == 6);
  CHECK((plain.columns.leftCols(3) - states).cwiseAbs().maxCoeff() == 0.0);
  CHECK((plain.columns.rightCols(3) - tangents).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("orthonormal columns and the projector identities hold for both methods")
{
  sirm::Matrix ensemble = random_matrix(30, 8, 20);
  sirm::EnergyCriterion crit{0.0, 1, 0};  // eta = 0 keeps full numerical rank

  for (bool use_pod : {true, false}) {
    sirm::BasisInfo basis = use_pod ? sirm::pod_basis(ensemble, crit)
                                    : sirm::gram_schmidt_basis(ensemble);
    const sirm::Matrix &phi = basis.phi;
    REQUIRE(basis.k() == 8);
    REQUIRE(basis.dim() == 30);
    CHECK((phi.transpose() * phi - sirm::Matrix::Identity(8, 8)).cwiseAbs().maxCoeff() <=
          1e-10);

    // Projection P = Phi Phi^T is idempotent and obeys Pythagoras.
    sirm::Vector x = random_matrix(30, 1, 21).col(0);
    sirm::Vector px = phi * (phi.transpose() * x);
    sirm::Vector ppx = phi * (phi.transpose() * px);
    CHECK((ppx - px).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(px.squaredNorm() + (x - px).squaredNorm() ==
          doctest::Approx(x.squaredNorm()).epsilon(1e-12));

    // Both spans contain the ensemble columns exactly (full rank case).
    sirm::Matrix residual = ensemble - phi * (phi.transpose() * ensemble);
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("singular spectrum and energy fraction match an eigensolver oracle")
{
  sirm::Matrix ensemble = random_matrix(25, 10, 30);
  sirm::EnergyCriterion crit{1e-3, 1, 0};
  sirm::BasisInfo basis = sirm::pod_basis(ensemble, crit);

  // Oracle: eigenvalues of the Gram matrix are the squared singular values.
  Eigen::SelfAdjointEigenSolver<sirm::Matrix> eig(ensemble.transpose() * ensemble);
  sirm::Vector lambda = eig.eigenvalues().reverse();  // descending
  REQUIRE(basis.singular_values.size() == 10);
  for (int i = 0; i < 10; ++i) {
    const double expect = std::sqrt(std::max(0.0, lambda(i)));
    CHECK(basis.singular_values(i) == doctest::Approx(expect).epsilon(1e-8));
  }

  const double total = lambda.sum();
  double captured = 0.0;
  for (int i = 0; i < basis.k(); ++i) captured += lambda(i);
  CHECK(basis.energy_fraction == doctest::Approx(captured / total).epsilon(1e-10));
  CHECK(basis.energy_fraction > 1.0 - crit.eta);

  // The tail estimate is the part of the energy the basis left out.
  const double tail = sirm::truncation_error_estimate(basis.singular_values, basis.k());
  CHECK(tail == doctest::Approx(total - captured).epsilon(1e-8));
}

TEST_CASE("mode count selection obeys the energy threshold and the clamps")
{
  // Spectrum 8, 4, 2, 1, 0.5: cumulative energy fractions are easy to hand-check.
  sirm::Vector sv(5);
  sv << 8.0, 4.0, 2.0, 1.0, 0.5;
  sirm::Matrix ensemble = matrix_with_spectrum(40, 12, sv, 40);
  const double total = sv.squaredNorm();

  SUBCASE("threshold picks the smallest sufficient count")
  {
    // One mode captures 64/85.25 = 0.751..., two capture 0.938..., three 0.985...
    sirm::EnergyCriterion crit{1.0 - 0.9, 1, 0};
    CHECK(sirm::pod_basis(ensemble, crit).k() == 2);
    sirm::EnergyCriterion tight{1.0 - 0.95, 1, 0};
    CHECK(sirm::pod_basis(ensemble, tight).k() == 3);
    sirm::EnergyCriterion very_tight{1e-12, 1, 0};
    CHECK(sirm::pod_basis(ensemble, very_tight).k() == 5);
    (void)total;
  }

  SUBCASE("k_min raises and k_max caps the count")
  {
    sirm::EnergyCriterion floor_crit{1.0 - 0.5, 4, 0};  // threshold alone would pick 1
    CHECK(sirm::pod_basis(ensemble, floor_crit).k() == 4);
    sirm::EnergyCriterion cap_crit{1e-12, 1, 2};
    CHECK(sirm::pod_basis(ensemble, cap_crit).k() == 2);
  }

  SUBCASE("the count never exceeds the numerical rank")
  {
    sirm::EnergyCriterion crit{1e-15, 1, 0};
    sirm::BasisInfo basis = sirm::pod_basis(ensemble, crit);
    CHECK(basis.k() == 5);  // rank-5 ensemble in 12 columns
  }
}

TEST_CASE("a zero ensemble is rejected as degenerate")
{
  sirm::Matrix zeros = sirm::Matrix::Zero(10, 4);
  sirm::EnergyCriterion crit;
  CHECK_THROWS_AS(sirm::pod_basis(zeros, crit), sirm::DegenerateEnsemble);
  CHECK_THROWS_AS(sirm::gram_schmidt_basis(zeros), sirm::DegenerateEnsemble);
}

TEST_CASE("dominant-entry sign convention makes the basis reproducible")
{
  sirm::Matrix ensemble = random_matrix(20, 5, 50);
  sirm::EnergyCriterion crit{0.0, 1, 0};
  sirm::BasisInfo a = sirm::pod_basis(ensemble, crit);
  sirm::BasisInfo b = sirm::pod_basis(-ensemble, crit);  // flipped input, same span
  for (int j = 0; j < a.k(); ++j) {
    int imax;
    a.phi.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(a.phi(imax, j) > 0.0);
    CHECK((a.phi.col(j) - b.phi.col(j)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("Gram-Schmidt keeps the leading-column order and drops dependents")
{
  const int n = 15;
  sirm::Matrix base = random_matrix(n, 3, 60);
  sirm::Matrix ensemble(n, 5);
  ensemble.col(0) = base.col(0);
  ensemble.col(1) = 2.0 * base.col(0);              // exactly dependent, dropped
  ensemble.col(2) = base.col(1);
  ensemble.col(3) = base.col(0) - 0.5 * base.col(1);  // dependent, dropped
  ensemble.col(4) = base.col(2);

  sirm::BasisInfo basis = sirm::gram_schmidt_basis(ensemble, 1e-10);
  CHECK(basis.k() == 3);
  CHECK(basis.singular_values.size() == 0);
  // First column is the normalized first ensemble column.
  CHECK((basis.phi.col(0) - ensemble.col(0).normalized()).cwiseAbs().maxCoeff() <= 1e-12);
  // The span equals the span of the independent columns.
  sirm::Matrix residual = base - basis.phi * (basis.phi.transpose() * base);
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("Gram-Schmidt drop tolerance separates noise from signal")
{
  const int n = 12;
  sirm::Matrix base = random_matrix(n, 2, 70);
  sirm::Matrix ensemble(n, 3);
  ensemble.col(0) = base.col(0);
  // A nearly dependent column: tiny orthogonal component of relative size 1e-6.
  sirm::Vector noise = base.col(1) - base.col(0) * (base.col(0).dot(base.col(1)) /
                                                    base.col(0).squaredNorm());
  ensemble.col(1) = base.col(0) + 1e-6 * noise.normalized() * base.col(0).norm();
  ensemble.col(2) = base.col(1);

  CHECK(sirm::gram_schmidt_basis(ensemble, 1e-4).k() == 2);   // near-duplicate dropped
  CHECK(sirm::gram_schmidt_basis(ensemble, 1e-9).k() == 3);   // kept when tolerated
}

TEST_CASE("truncation tail sums the discarded squared singular values")
{
  sirm::Vector sv(4);
  sv << 3.0, 2.0, 1.0, 0.5;
  CHECK(sirm::truncation_error_estimate(sv, 0) == doctest::Approx(9.0 + 4.0 + 1.0 + 0.25));
  CHECK(sirm::truncation_error_estimate(sv, 2) == doctest::Approx(1.25));
  CHECK(sirm::truncation_error_estimate(sv, 4) == doctest::Approx(0.0));
}

TEST_CASE("principal angles recover known rotations between subspaces")
{
  const int n = 10;
  sirm::Matrix a = sirm::Matrix::Zero(n, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;

  SUBCASE("identical spans give zero angles")
  {
    // Same plane expressed in a rotated in-plane frame.
    sirm::Matrix b(n, 2);
    b.setZero();
    const double c = std::cos(0.7), s = std::sin(0.7);
    b(0, 0) = c;
    b(1, 0) = s;
    b(0, 1) = -s;
    b(1, 1) = c;
    sirm::Vector angles = sirm::principal_angles(a, b);
    REQUIRE(angles.size() == 2);
    CHECK(angles.cwiseAbs().maxCoeff() <= 1e-7);
  }

  SUBCASE("a plane tilted by theta reports one zero and one theta angle")
  {
    const double theta = 0.4;
    sirm::Matrix b = sirm::Matrix::Zero(n, 2);
    b(0, 0) = 1.0;                   // shared direction
    b(1, 1) = std::cos(theta);       // second direction tilted into axis 2
    b(2, 1) = std::sin(theta);
    sirm::Vector angles = sirm::principal_angles(a, b);
    REQUIRE(angles.size() == 2);
    CHECK(angles(0) <= 1e-7);
    CHECK(angles(1) == doctest::Approx(theta).epsilon(1e-8));
  }

  SUBCASE("orthogonal lines are a right angle apart")
  {
    sirm::Matrix u = sirm::Matrix::Zero(n, 1), v = sirm::Matrix::Zero(n, 1);
    u(0, 0) = 1.0;
    v(5, 0) = 1.0;
    sirm::Vector angles = sirm::principal_angles(u, v);
    REQUIRE(angles.size() == 1);
    CHECK(angles(0) == doctest::Approx(M_PI / 2).epsilon(1e-10));
  }
}
