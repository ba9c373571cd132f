#pragma once

#include <cstddef>
#include <vector>

#include "tflow/field.hpp"

namespace tflow {

/// Deterministic sum of f(i,j) over all cells.  Each row is accumulated
/// left to right and the row partials are combined in row order, so the
/// result is independent of the number of threads.
template <class F>
double det_sum_cells(const Grid2D& g, F&& f) {
    std::vector<double> row(static_cast<std::size_t>(g.ny), 0.0);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j) {
        double s = 0.0;
        for (int i = 0; i < g.nx; ++i) s += f(i, j);
        row[j] = s;
    }
    double total = 0.0;
    for (int j = 0; j < g.ny; ++j) total += row[j];
    return total;
}

/// Deterministic dot product of raw vectors, fixed block size so the
/// summation order never depends on the thread count.
double det_dot_raw(const std::vector<double>& a, const std::vector<double>& b);

/// Max of |f(i,j)| over cells (max is order-independent).
template <class F>
double det_max_cells(const Grid2D& g, F&& f) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double v = f(i, j);
            if (v > m) m = v;
        }
    return m;
}

}  // namespace tflow
