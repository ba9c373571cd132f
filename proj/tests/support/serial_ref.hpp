#pragma once

// Single-threaded twins of the parallel kernels.  Each one repeats the
// accumulation order of its production counterpart, so agreement must be
// bitwise no matter how many threads the parallel build uses.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "tflow/field.hpp"

namespace serial_ref {

using tflow::Bc;
using tflow::Grid2D;
using tflow::ScalarField;
using tflow::VectorField;
using tflow::at_bc;

inline ScalarField laplace(const ScalarField& f, Bc bc) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = f(i, j);
            const double w = at_bc(f, i - 1, j, bc), e = at_bc(f, i + 1, j, bc);
            const double s = at_bc(f, i, j - 1, bc), n = at_bc(f, i, j + 1, bc);
            out(i, j) = ((w + e) - 2.0 * c) * ix2 + ((s + n) - 2.0 * c) * iy2;
        }
    return out;
}

inline ScalarField ddx(const ScalarField& f, Bc bc) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double h = 0.5 / g.dx;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (at_bc(f, i + 1, j, bc) - at_bc(f, i - 1, j, bc)) * h;
    return out;
}

inline ScalarField ddy(const ScalarField& f, Bc bc) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double h = 0.5 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (at_bc(f, i, j + 1, bc) - at_bc(f, i, j - 1, bc)) * h;
    return out;
}

inline VectorField grad(const ScalarField& f, Bc bc) {
    VectorField out(f.grid);
    out.x = ddx(f, bc);
    out.y = ddy(f, bc);
    return out;
}

inline ScalarField div(const VectorField& v, Bc bc) {
    const Grid2D& g = v.grid();
    ScalarField out(g);
    const double hx = 0.5 / g.dx, hy = 0.5 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (at_bc(v.x, i + 1, j, bc) - at_bc(v.x, i - 1, j, bc)) * hx +
                        (at_bc(v.y, i, j + 1, bc) - at_bc(v.y, i, j - 1, bc)) * hy;
    return out;
}

inline double sum_cells(const Grid2D& g, const ScalarField& f) {
    std::vector<double> row(static_cast<std::size_t>(g.ny), 0.0);
    for (int j = 0; j < g.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += f(i, j);
        row[j] = s;
    }
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j) total += row[j];
    return total;
}

inline double dot_raw(const std::vector<double>& a, const std::vector<double>& b) {
    constexpr std::size_t block = 4096;
    const std::size_t n = a.size();
    const std::size_t nb = (n + block - 1) / block;
    std::vector<double> partial(nb, 0.0);
    for (std::size_t ib = 0; ib < nb; ++ib) {
        const std::size_t hi = std::min(n, (ib + 1) * block);
        double s = 0.0;
        for (std::size_t k = ib * block; k < hi; ++k) s += a[k] * b[k];
        partial[ib] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace serial_ref
