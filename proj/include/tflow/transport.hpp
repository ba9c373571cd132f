#pragma once

#include <vector>

#include "tflow/field.hpp"

namespace tflow {

/// One backward step along the characteristics: per-cell departure
/// coordinates (clamped to the closed domain) and the bilinear stencil
/// they fall into.
struct FlowMapStep {
    Grid2D grid;
    std::vector<double> xd, yd;  // departure coordinates
    std::vector<int> ix, iy;     // stencil base cell, in [-1, n-1]
    std::vector<double> tx, ty;  // stencil weights, in [0, 1]

    explicit FlowMapStep(const Grid2D& g)
        : grid(g),
          xd(static_cast<std::size_t>(g.ncell())),
          yd(static_cast<std::size_t>(g.ncell())),
          ix(static_cast<std::size_t>(g.ncell())),
          iy(static_cast<std::size_t>(g.ncell())),
          tx(static_cast<std::size_t>(g.ncell())),
          ty(static_cast<std::size_t>(g.ncell())) {}
};

/// Bilinear sample between cell centers; ghost centers by the rule `bc`.
/// (x, y) must lie in the closed domain.
double interp_bilinear(const ScalarField& f, double x, double y, Bc bc);

/// One backward second-order Runge-Kutta step of dX/ds = u(X).
FlowMapStep backtrack(const VectorField& u, double dt);

/// psi(x) <- psi(departure(x)), bilinear with extrapolation ghosts; the
/// sampled value is clamped to the range of the interior cells in its
/// stencil, so the max norm of each component never increases.
VectorField advect_psi(const VectorField& psi, const FlowMapStep& map);

/// First-order upwind cross-check; requires dt max(|u|/dx, |v|/dy) <= 1/2.
VectorField advect_psi_eulerian(const VectorField& psi, const VectorField& u,
                                double dt);

/// Determinant range of the departure-map Jacobian (central differences
/// of the departure lattice); a monitor, not an invariant.
struct MapJacobianRange {
    double min_det, max_det;
};
MapJacobianRange map_jacobian_range(const FlowMapStep& map);

}  // namespace tflow
