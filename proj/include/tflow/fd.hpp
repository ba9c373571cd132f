#pragma once

#include "tflow/field.hpp"
#include "tflow/reduce.hpp"

namespace tflow {

// Second-order central differences on the cell-centered grid.  Ghost
// values come from the boundary rule of the differentiated field; the
// mirror/anti-mirror pair makes grad and -div exact adjoints of each
// other, with no boundary remainder for any pair of fields.

ScalarField laplace(const ScalarField& f, Bc bc);
inline ScalarField laplace_neumann(const ScalarField& f) { return laplace(f, Bc::neumann); }
inline VectorField laplace_noslip(const VectorField& v) {
    VectorField out(v.grid());
    out.x = laplace(v.x, Bc::noslip);
    out.y = laplace(v.y, Bc::noslip);
    return out;
}

VectorField grad(const ScalarField& f, Bc bc);
ScalarField div(const VectorField& v, Bc bc);

/// d/dx and d/dy of a single scalar field.
ScalarField ddx(const ScalarField& f, Bc bc);
ScalarField ddy(const ScalarField& f, Bc bc);

// ---- integrals and norms (midpoint quadrature, dx dy weight) -----------

double dot(const ScalarField& a, const ScalarField& b);
double dot(const VectorField& a, const VectorField& b);
double norm_l2(const ScalarField& f);
double norm_l2(const VectorField& v);
double norm_linf(const ScalarField& f);
double norm_linf(const VectorField& v);
double mean(const ScalarField& f);       // (1/|Omega|) integral
double integral(const ScalarField& f);

// ---- pointwise helpers --------------------------------------------------

ScalarField multiply(const ScalarField& a, const ScalarField& b);
void add_scaled(ScalarField& y, double c, const ScalarField& x);  // y += c x
void add_scaled(VectorField& y, double c, const VectorField& x);
void scale(ScalarField& f, double c);
void shift(ScalarField& f, double c);  // f += c

}  // namespace tflow
