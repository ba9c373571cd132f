#pragma once

#include <cstddef>
#include <stdexcept>

namespace tflow {

/// Uniform cell-centered grid on [0,lx] x [0,ly].  Cell centers sit at
/// ((i+1/2)dx, (j+1/2)dy); stencils reach one logical ghost cell past each
/// wall, filled on the fly from the boundary rule of the field being read.
struct Grid2D {
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double dx = 0.0, dy = 0.0;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double lx_, double ly_)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
        if (nx < 8 || ny < 8) throw std::invalid_argument("Grid2D: nx, ny must be >= 8");
        if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("Grid2D: lx, ly must be > 0");
        dx = lx / nx;
        dy = ly / ny;
    }

    double x(int i) const { return (i + 0.5) * dx; }
    double y(int j) const { return (j + 0.5) * dy; }
    int ncell() const { return nx * ny; }
    double cell_area() const { return dx * dy; }
    double area() const { return lx * ly; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }

    bool operator==(const Grid2D& o) const {
        return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
    }
    bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

}  // namespace tflow
