#include "tflow/fd.hpp"

#include <cmath>

namespace tflow {

ScalarField laplace(const ScalarField& f, Bc bc) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = f(i, j);
            const double w = at_bc(f, i - 1, j, bc), e = at_bc(f, i + 1, j, bc);
            const double s = at_bc(f, i, j - 1, bc), n = at_bc(f, i, j + 1, bc);
            // symmetric grouping keeps mirrored states bitwise mirrored
            out(i, j) = ((w + e) - 2.0 * c) * ix2 + ((s + n) - 2.0 * c) * iy2;
        }
    return out;
}

ScalarField ddx(const ScalarField& f, Bc bc) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double h = 0.5 / g.dx;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (at_bc(f, i + 1, j, bc) - at_bc(f, i - 1, j, bc)) * h;
    return out;
}

ScalarField ddy(const ScalarField& f, Bc bc) {
    const Grid2D& g = f.grid;
    ScalarField out(g);
    const double h = 0.5 / g.dy;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (at_bc(f, i, j + 1, bc) - at_bc(f, i, j - 1, bc)) * h;
    return out;
}

VectorField grad(const ScalarField& f, Bc bc) {
    VectorField out(f.grid);
    out.x = ddx(f, bc);
    out.y = ddy(f, bc);
    return out;
}

ScalarField div(const VectorField& v, Bc bc) {
    require_same_grid(v.x.grid, v.y.grid);
    const Grid2D& g = v.grid();
    ScalarField out(g);
    const double hx = 0.5 / g.dx, hy = 0.5 / g.dy;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (at_bc(v.x, i + 1, j, bc) - at_bc(v.x, i - 1, j, bc)) * hx +
                        (at_bc(v.y, i, j + 1, bc) - at_bc(v.y, i, j - 1, bc)) * hy;
    return out;
}

double dot(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    return a.grid.cell_area() *
           det_sum_cells(a.grid, [&](int i, int j) { return a(i, j) * b(i, j); });
}

double dot(const VectorField& a, const VectorField& b) {
    return dot(a.x, b.x) + dot(a.y, b.y);
}

double norm_l2(const ScalarField& f) { return std::sqrt(dot(f, f)); }

double norm_l2(const VectorField& v) { return std::sqrt(dot(v, v)); }

double norm_linf(const ScalarField& f) {
    return det_max_cells(f.grid, [&](int i, int j) { return std::abs(f(i, j)); });
}

double norm_linf(const VectorField& v) {
    return std::max(norm_linf(v.x), norm_linf(v.y));
}

double integral(const ScalarField& f) {
    return f.grid.cell_area() * det_sum_cells(f.grid, [&](int i, int j) { return f(i, j); });
}

double mean(const ScalarField& f) { return integral(f) / f.grid.area(); }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    const std::size_t n = a.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) out.a[k] = a.a[k] * b.a[k];
    return out;
}

void add_scaled(ScalarField& y, double c, const ScalarField& x) {
    require_same_grid(y.grid, x.grid);
    const std::size_t n = y.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) y.a[k] += c * x.a[k];
}

void add_scaled(VectorField& y, double c, const VectorField& x) {
    add_scaled(y.x, c, x.x);
    add_scaled(y.y, c, x.y);
}

void scale(ScalarField& f, double c) {
    const std::size_t n = f.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) f.a[k] *= c;
}

void shift(ScalarField& f, double c) {
    const std::size_t n = f.size();
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < n; ++k) f.a[k] += c;
}

double det_dot_raw(const std::vector<double>& a, const std::vector<double>& b) {
    constexpr std::size_t block = 4096;
    const std::size_t n = a.size();
    const std::size_t nb = (n + block - 1) / block;
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
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

}  // namespace tflow
