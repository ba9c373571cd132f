#pragma once

#include <stdexcept>
#include <vector>

#include "tflow/grid.hpp"

namespace tflow {

/// Boundary rule applied when a stencil reads across a wall.
///   neumann: mirror ghost (zero normal derivative); phase, chemical
///            potential, pressure, and viscous-stress rows.
///   noslip:  anti-mirror ghost (zero wall value); velocity components and
///            velocity-times-scalar flux products (a product of two
///            anti-mirror factors mirrors instead).
///   extrap:  linear extrapolation ghost (no boundary condition); the
///            transported vector potential.
enum class Bc { neumann, noslip, extrap };

struct ScalarField {
    Grid2D grid;
    std::vector<double> a;

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0)
        : grid(g), a(static_cast<std::size_t>(g.ncell()), fill) {}

    double& operator()(int i, int j) { return a[grid.idx(i, j)]; }
    double operator()(int i, int j) const { return a[grid.idx(i, j)]; }
    std::size_t size() const { return a.size(); }
};

struct VectorField {
    ScalarField x, y;

    VectorField() = default;
    explicit VectorField(const Grid2D& g, double fx = 0.0, double fy = 0.0)
        : x(g, fx), y(g, fy) {}
    const Grid2D& grid() const { return x.grid; }
};

inline void require_same_grid(const Grid2D& a, const Grid2D& b) {
    if (a != b) throw std::invalid_argument("fields live on different grids");
}

/// Ghost-aware read; exactly one index may lie one cell outside the grid.
inline double at_bc(const ScalarField& f, int i, int j, Bc bc) {
    const int nx = f.grid.nx, ny = f.grid.ny;
    if (i == -1) {
        if (bc == Bc::extrap) return 2.0 * f(0, j) - f(1, j);
        return (bc == Bc::neumann) ? f(0, j) : -f(0, j);
    }
    if (i == nx) {
        if (bc == Bc::extrap) return 2.0 * f(nx - 1, j) - f(nx - 2, j);
        return (bc == Bc::neumann) ? f(nx - 1, j) : -f(nx - 1, j);
    }
    if (j == -1) {
        if (bc == Bc::extrap) return 2.0 * f(i, 0) - f(i, 1);
        return (bc == Bc::neumann) ? f(i, 0) : -f(i, 0);
    }
    if (j == ny) {
        if (bc == Bc::extrap) return 2.0 * f(i, ny - 1) - f(i, ny - 2);
        return (bc == Bc::neumann) ? f(i, ny - 1) : -f(i, ny - 1);
    }
    return f(i, j);
}

}  // namespace tflow
