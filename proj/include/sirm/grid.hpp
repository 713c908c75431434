// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_GRID_HPP
#define SIRM_GRID_HPP

#include <stdexcept>

namespace sirm
{

// Uniform periodic grid on [0, L). Node i sits at i * spacing; the point at
// x = L is identified with x = 0 and not stored.
struct GridSpec1D
{
  int n_points = 0;
  double domain_length = 1.0;

  double spacing() const { return domain_length / n_points; }
  double node(int i) const { return i * spacing(); }

  void validate() const
  {
    if (n_points < 4)
      throw std::invalid_argument("GridSpec1D: need at least 4 points");
    if (domain_length <= 0.0)
      throw std::invalid_argument("GridSpec1D: domain length must be positive");
  }
};

// Square (n_side x n_side) grid on the unit square, walls included. Node
// (i, j) sits at (i*h, j*h) with h = 1/(n_side-1); the lid is the j = n_side-1
// row and moves in +x with lid_speed.
struct CavitySpec
{
  int n_side = 0;
  double reynolds = 1000.0;
  double lid_speed = 1.0;

  double h() const { return 1.0 / (n_side - 1); }
  int field_size() const { return n_side * n_side; }
  int state_size() const { return 2 * n_side * n_side; }
  int idx(int i, int j) const { return j * n_side + i; }

  void validate() const
  {
    if (n_side < 5)
      throw std::invalid_argument("CavitySpec: need at least 5 points per side");
    if (reynolds <= 0.0)
      throw std::invalid_argument("CavitySpec: Reynolds number must be positive");
  }
};

}  // namespace sirm

#endif  // SIRM_GRID_HPP
