#include "tflow/dct.hpp"

#include <cmath>
#include <stdexcept>

namespace tflow {

namespace {

void build_axis(int n, double dx, std::vector<double>& basis, std::vector<double>& eig) {
    basis.assign(static_cast<std::size_t>(n) * n, 0.0);
    eig.assign(static_cast<std::size_t>(n), 0.0);
    const double pi = std::acos(-1.0);
    for (int m = 0; m < n; ++m) {
        const double s = std::sin(0.5 * pi * m / n);
        eig[m] = 4.0 / (dx * dx) * s * s;
        for (int i = 0; i < n; ++i)
            basis[static_cast<std::size_t>(m) * n + i] = std::cos(pi * m * (i + 0.5) / n);
    }
}

}  // namespace

CosineSolver::CosineSolver(const Grid2D& g) : grid_(g) {
    build_axis(g.nx, g.dx, cx_, lx_);
    build_axis(g.ny, g.dy, cy_, ly_);
}

void CosineSolver::solve(double a, double b, double c, const ScalarField& rhs,
                         ScalarField& x) const {
    require_same_grid(rhs.grid, grid_);
    const int nx = grid_.nx, ny = grid_.ny;
    std::vector<double> t1(static_cast<std::size_t>(nx) * ny);
    std::vector<double> t2(static_cast<std::size_t>(nx) * ny);

    // forward along x: t1[m + nx j] = sum_i rhs(i,j) cos(m pi (i+1/2)/nx)
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
        for (int m = 0; m < nx; ++m) {
            double s = 0.0;
            const double* row = &cx_[static_cast<std::size_t>(m) * nx];
            for (int i = 0; i < nx; ++i) s += rhs(i, j) * row[i];
            t1[static_cast<std::size_t>(j) * nx + m] = s;
        }

    // forward along y, divide by the symbol, fold in the inverse-y weights
#pragma omp parallel for schedule(static)
    for (int m = 0; m < nx; ++m)
        for (int mm = 0; mm < ny; ++mm) {
            double s = 0.0;
            const double* col = &cy_[static_cast<std::size_t>(mm) * ny];
            for (int j = 0; j < ny; ++j) s += t1[static_cast<std::size_t>(j) * nx + m] * col[j];
            const double l = lx_[m] + ly_[mm];
            const double sym = a + b * l + c * l * l;
            if (sym == 0.0) throw std::invalid_argument("cosine solver: singular symbol");
            const double w = (mm == 0 ? 1.0 : 2.0) / ny;
            t2[static_cast<std::size_t>(mm) * nx + m] = s / sym * w;
        }

    // inverse along y: t1[m + nx j] = sum_mm t2 * cos(mm pi (j+1/2)/ny)
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
        for (int m = 0; m < nx; ++m) {
            double s = 0.0;
            for (int mm = 0; mm < ny; ++mm)
                s += t2[static_cast<std::size_t>(mm) * nx + m] *
                     cy_[static_cast<std::size_t>(mm) * ny + j];
            t1[static_cast<std::size_t>(j) * nx + m] = s;
        }

    // inverse along x with normalization
    if (x.grid != grid_) x = ScalarField(grid_);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            const double* row = &t1[static_cast<std::size_t>(j) * nx];
            for (int m = 0; m < nx; ++m) {
                const double w = (m == 0 ? 1.0 : 2.0) / nx;
                s += row[m] * w * cx_[static_cast<std::size_t>(m) * nx + i];
            }
            x(i, j) = s;
        }
}

}  // namespace tflow
