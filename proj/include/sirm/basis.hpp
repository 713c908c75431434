// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_BASIS_HPP
#define SIRM_BASIS_HPP

#include <vector>

#include "sirm/model.hpp"

namespace sirm
{

// Mode-count selection for pod_basis: keep the smallest k whose captured
// energy fraction sum_{i<=k} s_i^2 / sum_i s_i^2 exceeds 1 - eta, then clamp
// to [k_min, k_max] (k_max = 0 disables the cap). k never exceeds the
// numerical rank of the ensemble.
struct EnergyCriterion
{
  double eta = 1e-8;
  int k_min = 1;
  int k_max = 0;
};

struct BasisInfo
{
  Matrix phi;               // n x k, orthonormal columns
  Vector singular_values;   // full ensemble spectrum; empty for Gram-Schmidt
  double energy_fraction = 1.0;

  int k() const { return static_cast<int>(phi.cols()); }
  int dim() const { return static_cast<int>(phi.rows()); }
};

// Snapshot/tangent ensemble [X, gamma F]. Multi-field models contribute one
// zero-padded column per field block per snapshot, so a state ensemble of m
// snapshots over b blocks has m*b state columns followed by m*b scaled
// tangent columns.
struct InformationMatrix
{
  Matrix columns;
  double gamma = 1.0;
  int snapshot_count = 0;
  int block_count = 1;
};

InformationMatrix assemble_information_matrix(const Matrix &states, const Matrix &tangents,
                                              const std::vector<FieldBlock> &blocks,
                                              double gamma);

// Left singular basis of the ensemble truncated by the energy criterion.
// Column signs are fixed so the entry of largest magnitude is positive.
// Throws DegenerateEnsemble when the ensemble has no energy.
BasisInfo pod_basis(const Matrix &ensemble, const EnergyCriterion &criterion);

// Modified Gram-Schmidt with one re-orthogonalization sweep. Columns whose
// residual drops below drop_tol times their original norm are discarded.
BasisInfo gram_schmidt_basis(const Matrix &ensemble, double drop_tol = 1e-10);

// Tail energy sum_{i>k} s_i^2 of a singular-value spectrum (k in modes, so
// k = spectrum size means zero).
double truncation_error_estimate(const Vector &singular_values, int k);

// Principal angles (radians, ascending) between the column spans of two
// orthonormal bases.
Vector principal_angles(const Matrix &a, const Matrix &b);

}  // namespace sirm

#endif  // SIRM_BASIS_HPP
