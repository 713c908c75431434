// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_MODELS_HPP
#define SIRM_MODELS_HPP

#include <variant>

#include "sirm/grid.hpp"
#include "sirm/model.hpp"

namespace sirm
{

// Periodic advection-diffusion u_t = -c u_x + nu u_xx with upwind advection
// and central diffusion.
struct AdvDiffSpec
{
  GridSpec1D grid;
  double speed = 0.5;
  double viscosity = 1e-3;
};

// Periodic viscous Burgers u_t = -u u_x + nu u_xx, advection upwinded with
// backward differences (rightward transport).
struct BurgersSpec
{
  GridSpec1D grid;
  double viscosity = 1e-3;
};

using ModelSpec = std::variant<AdvDiffSpec, BurgersSpec, CavitySpec>;

int model_dim(const ModelSpec &spec);
FullModel make_model(const ModelSpec &spec);

// Same family and parameters on a factor-times-coarser grid. 1D grids require
// n_points divisible by factor; cavity grids require (n_side - 1) divisible.
ModelSpec coarsen_spec(const ModelSpec &spec, int factor);
FullModel make_coarse_model(const ModelSpec &fine, int factor);

// Same family and parameters with the grid size set outright (1D point count
// or cavity side). Accepts sizes that do not divide the source grid.
ModelSpec spec_with_size(const ModelSpec &spec, int size);

// True when restrict_state's injection rule applies, i.e. the coarse nodes
// form a subset of the fine ones.
bool can_restrict(const ModelSpec &fine, const ModelSpec &coarse);

// Factor turning the Euclidean norm of a state vector into the discrete L2
// function norm sqrt(sum h |x_i|^2): sqrt(L/n) on periodic 1D grids, the mesh
// spacing h on the unit-square cavity grid.
double norm_weight(const ModelSpec &spec);

// Compactly supported cubic spline bump used as the 1D initial profile:
// with s = 10 |x - 1/3|, u = 1 - (3/2) s^2 + (3/4) s^3 on [0,1],
// u = (1/4) (2 - s)^3 on (1,2], u = 0 beyond.
double cubic_spline_value(double x);
Vector cubic_spline_ic(const GridSpec1D &grid);

// Discrete Fourier truncation: keeps wavenumbers 0..n_modes-1 (with their
// conjugates) and zeros the rest. Preserves the mean and is idempotent.
// Requires 1 <= n_modes <= n/2.
Vector fourier_filter(const Vector &u, int n_modes);

// Trigonometric interpolation of periodic samples onto a grid with at least
// as many points over the same domain. With equal grids it reproduces the
// input; on coinciding nodes of a nested refinement it is exact.
Vector trig_interpolate(const Vector &u_coarse, const GridSpec1D &coarse,
                        const GridSpec1D &fine);

// Bilinear interpolation of an n_side x n_side field onto a finer square grid
// with coinciding walls ((side_f - 1) divisible by (side_c - 1)).
Vector bilinear_interpolate_field(const Vector &f_coarse, int side_c, int side_f);

// Pointwise injection onto the coarser grid (inverse of the node embeddings
// above).
Vector restrict_injection_1d(const Vector &u_fine, int factor);
Vector restrict_injection_field(const Vector &f_fine, int side_f, int side_c);

// Family-aware state transfer between a coarse and fine instance of the same
// ModelSpec family. 1D states use the trigonometric rule, cavity states move
// both fields bilinearly.
Vector interpolate_state(const ModelSpec &coarse, const ModelSpec &fine, const Vector &x);
Vector restrict_state(const ModelSpec &fine, const ModelSpec &coarse, const Vector &x);

}  // namespace sirm

#endif  // SIRM_MODELS_HPP
