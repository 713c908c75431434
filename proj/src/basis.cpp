// SPDX-License-Identifier: Apache-2.0

#include "sirm/basis.hpp"

#include <algorithm>
#include <cmath>

namespace sirm
{

InformationMatrix assemble_information_matrix(const Matrix &states, const Matrix &tangents,
                                              const std::vector<FieldBlock> &blocks,
                                              double gamma)
{
  if (states.rows() != tangents.rows() || states.cols() != tangents.cols())
    throw std::invalid_argument("assemble_information_matrix: shape mismatch");
  if (states.cols() == 0)
    throw std::invalid_argument("assemble_information_matrix: no snapshots");
  if (gamma <= 0.0)
    throw std::invalid_argument("assemble_information_matrix: gamma must be positive");

  const int n = static_cast<int>(states.rows());
  const int m = static_cast<int>(states.cols());
  std::vector<FieldBlock> blk = blocks.empty() ? std::vector<FieldBlock>{{0, n}} : blocks;
  const int nb = static_cast<int>(blk.size());
  for (const auto &b : blk)
    if (b.offset < 0 || b.length <= 0 || b.offset + b.length > n)
      throw std::invalid_argument("assemble_information_matrix: bad field block");

  InformationMatrix im;
  im.gamma = gamma;
  im.snapshot_count = m;
  im.block_count = nb;
  im.columns = Matrix::Zero(n, 2 * m * nb);
  for (int i = 0; i < m; ++i) {
    for (int b = 0; b < nb; ++b) {
      const auto &fb = blk[b];
      im.columns.col(i * nb + b).segment(fb.offset, fb.length) =
          states.col(i).segment(fb.offset, fb.length);
      im.columns.col(m * nb + i * nb + b).segment(fb.offset, fb.length) =
          gamma * tangents.col(i).segment(fb.offset, fb.length);
    }
  }
  return im;
}

BasisInfo pod_basis(const Matrix &ensemble, const EnergyCriterion &criterion)
{
  if (ensemble.cols() == 0 || ensemble.rows() == 0)
    throw std::invalid_argument("pod_basis: empty ensemble");
  if (criterion.eta <= 0.0 || criterion.eta >= 1.0)
    throw std::invalid_argument("pod_basis: eta must lie in (0, 1)");
  if (criterion.k_min < 1)
    throw std::invalid_argument("pod_basis: k_min must be >= 1");

  // Divide-and-conquer SVD for large ensembles; Jacobi is more accurate on
  // small ones and both are deterministic.
  Matrix u;
  Vector sv;
  if (ensemble.rows() >= 256 && ensemble.cols() >= 64) {
    Eigen::BDCSVD<Matrix> svd(ensemble, Eigen::ComputeThinU);
    u = svd.matrixU();
    sv = svd.singularValues();
  } else {
    Eigen::JacobiSVD<Matrix> svd(ensemble, Eigen::ComputeThinU);
    u = svd.matrixU();
    sv = svd.singularValues();
  }
  const double total = sv.squaredNorm();
  if (!(total > 0.0))
    throw DegenerateEnsemble("pod_basis: ensemble has no energy");

  const int r = static_cast<int>(sv.size());
  int rank = 0;
  while (rank < r && sv(rank) > sv(0) * 1e-14)
    ++rank;

  int k = rank;
  double cum = 0.0;
  for (int i = 0; i < r; ++i) {
    cum += sv(i) * sv(i);
    if (cum / total > 1.0 - criterion.eta) {
      k = i + 1;
      break;
    }
  }
  k = std::max(k, criterion.k_min);
  if (criterion.k_max > 0)
    k = std::min(k, criterion.k_max);
  k = std::min(k, std::max(rank, 1));

  BasisInfo basis;
  basis.phi = u.leftCols(k);
  basis.singular_values = sv;
  basis.energy_fraction = sv.head(k).squaredNorm() / total;

  // Deterministic sign: largest-magnitude entry of each mode is positive.
  for (int q = 0; q < k; ++q) {
    int arg = 0;
    double best = std::abs(basis.phi(0, q));
    for (int i = 1; i < basis.dim(); ++i) {
      const double a = std::abs(basis.phi(i, q));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (basis.phi(arg, q) < 0.0)
      basis.phi.col(q) = -basis.phi.col(q);
  }
  return basis;
}

BasisInfo gram_schmidt_basis(const Matrix &ensemble, double drop_tol)
{
  if (ensemble.cols() == 0 || ensemble.rows() == 0)
    throw std::invalid_argument("gram_schmidt_basis: empty ensemble");

  const int n = static_cast<int>(ensemble.rows());
  const int m = static_cast<int>(ensemble.cols());
  Matrix kept(n, m);
  int nk = 0;
  for (int c = 0; c < m; ++c) {
    const double ref_norm = ensemble.col(c).norm();
    if (ref_norm == 0.0)
      continue;
    Vector v = ensemble.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (int q = 0; q < nk; ++q)
        v.noalias() -= kept.col(q).dot(v) * kept.col(q);
    const double res = v.norm();
    if (res <= drop_tol * ref_norm)
      continue;
    kept.col(nk++) = v / res;
  }
  if (nk == 0)
    throw DegenerateEnsemble("gram_schmidt_basis: all columns dropped");

  BasisInfo basis;
  basis.phi = kept.leftCols(nk);
  basis.energy_fraction = 1.0;
  return basis;
}

double truncation_error_estimate(const Vector &singular_values, int k)
{
  if (k < 0)
    throw std::invalid_argument("truncation_error_estimate: negative k");
  const int r = static_cast<int>(singular_values.size());
  double sum = 0.0;
  for (int i = k; i < r; ++i)
    sum += singular_values(i) * singular_values(i);
  return sum;
}

Vector principal_angles(const Matrix &a, const Matrix &b)
{
  if (a.rows() != b.rows())
    throw std::invalid_argument("principal_angles: dimension mismatch");
  Eigen::JacobiSVD<Matrix> svd(a.transpose() * b);
  Vector sv = svd.singularValues();
  Vector angles(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    angles(i) = std::acos(std::clamp(sv(i), -1.0, 1.0));
  std::sort(angles.data(), angles.data() + angles.size());
  return angles;
}

}  // namespace sirm
