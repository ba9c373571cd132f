#pragma once

#include <vector>

#include "tflow/field.hpp"

namespace tflow {

/// Exact solver for constant-coefficient operators
///   (a I + b L + c L^2) x = rhs,   L = -laplace with mirror ghosts,
/// via the cell-centered cosine eigenbasis of the five-point Laplacian.
/// Used as a preconditioner; a + b*l + c*l^2 must be positive for every
/// eigenvalue l of L (l >= 0).
class CosineSolver {
  public:
    explicit CosineSolver(const Grid2D& g);

    void solve(double a, double b, double c, const ScalarField& rhs,
               ScalarField& x) const;

    /// Eigenvalues of L per axis mode.
    const std::vector<double>& eig_x() const { return lx_; }
    const std::vector<double>& eig_y() const { return ly_; }

  private:
    Grid2D grid_;
    std::vector<double> cx_, cy_;  // cos(m pi (i+1/2)/n), row-major [mode][cell]
    std::vector<double> lx_, ly_;
};

}  // namespace tflow
