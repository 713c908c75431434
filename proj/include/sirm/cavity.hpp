// SPDX-License-Identifier: Apache-2.0

#ifndef SIRM_CAVITY_HPP
#define SIRM_CAVITY_HPP

#include "sirm/grid.hpp"
#include "sirm/linsolve.hpp"
#include "sirm/model.hpp"

namespace sirm
{

// Lid-driven cavity in stream-function / vorticity form. The state stacks the
// two fields as [psi; omega], each an n_side^2 row-major vector with walls
// included. The stream function is slaved to the interior vorticity through
// -lap(psi) = omega, psi = 0 on the walls, and wall vorticity follows Thom's
// closure  omega_B = -2 psi_{B-1} / h^2 - U / h  (U = lid speed on the moving
// wall, 0 elsewhere; psi_{B-1} is the node one inside the wall).
FullModel make_cavity(const CavitySpec &spec);

// Wall vorticity from a stream-function field: returns an n_side^2 vector
// with Thom values on the walls and zero interior. The lid row is filled
// last, so the top corners carry the lid value.
Vector thom_boundary(const Vector &psi, const CavitySpec &spec);

// Solves -lap(psi) = omega on the interior (psi = 0 on walls). When warm is
// given its interior is used as the initial guess.
Vector solve_cavity_poisson(const Vector &omega, const CavitySpec &spec,
                            const Vector *warm = nullptr,
                            LinearSolveStats *stats = nullptr);

// Velocity profiles through the cavity center: u = psi_y along the vertical
// centerline (one value per j, wall values from the boundary conditions) and
// v = -psi_x along the horizontal centerline.
Vector centerline_u(const Vector &state, const CavitySpec &spec);
Vector centerline_v(const Vector &state, const CavitySpec &spec);

}  // namespace sirm

#endif  // SIRM_CAVITY_HPP
