#pragma once

// Deterministic field generators shared by the test executables.  All
// randomness flows through seeded mt19937_64 with a fixed bit mapping,
// so every run of the suite sees identical data.

#include <cmath>
#include <cstdint>
#include <random>

#include "tflow/elliptic.hpp"
#include "tflow/field.hpp"

namespace testutil {

using tflow::Grid2D;
using tflow::ScalarField;
using tflow::VectorField;

inline double unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double symmetric(std::mt19937_64& eng) { return 2.0 * unit(eng) - 1.0; }

/// White-noise scalar field with entries in [-amp, amp].
inline ScalarField random_scalar(const Grid2D& g, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 eng(seed);
    ScalarField f(g);
    for (double& v : f.a) v = amp * symmetric(eng);
    return f;
}

/// White-noise vector field with entries in [-amp, amp].
inline VectorField random_vector(const Grid2D& g, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 eng(seed);
    VectorField v(g);
    for (double& e : v.x.a) e = amp * symmetric(eng);
    for (double& e : v.y.a) e = amp * symmetric(eng);
    return v;
}

/// Smooth scalar field built from a few random cosine modes, so both the
/// field and its discrete derivatives stay O(amp).
inline ScalarField smooth_scalar(const Grid2D& g, std::uint64_t seed, double amp,
                                 int kmax = 3) {
    std::mt19937_64 eng(seed);
    const double pi = std::acos(-1.0);
    ScalarField f(g);
    for (int mx = 0; mx <= kmax; ++mx)
        for (int my = 0; my <= kmax; ++my) {
            const double c = amp * symmetric(eng) / (1.0 + mx * mx + my * my);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    f(i, j) += c * std::cos(mx * pi * g.x(i) / g.lx) *
                               std::cos(my * pi * g.y(j) / g.ly);
        }
    return f;
}

/// Smooth vector field from cosine modes, no boundary or divergence
/// structure imposed.
inline VectorField smooth_vector(const Grid2D& g, std::uint64_t seed, double amp,
                                 int kmax = 3) {
    VectorField v(g);
    v.x = smooth_scalar(g, seed, amp, kmax);
    v.y = smooth_scalar(g, seed + 1, amp, kmax);
    return v;
}

/// Smooth velocity from random sin^2 stream functions, zero on the walls,
/// projected to the discrete divergence-free space.
inline VectorField smooth_velocity(const Grid2D& g, std::uint64_t seed, double amp,
                                   int kmax = 2) {
    std::mt19937_64 eng(seed);
    const double pi = std::acos(-1.0);
    ScalarField h(g);
    for (int mx = 1; mx <= kmax; ++mx)
        for (int my = 1; my <= kmax; ++my) {
            const double c = amp * symmetric(eng) / (mx * mx + my * my);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double sx = std::sin(mx * pi * g.x(i) / g.lx);
                    const double sy = std::sin(my * pi * g.y(j) / g.ly);
                    h(i, j) += c * sx * sx * sy * sy;
                }
        }
    VectorField u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int jm = j > 0 ? j - 1 : 0, jp = j < g.ny - 1 ? j + 1 : g.ny - 1;
            const int im = i > 0 ? i - 1 : 0, ip = i < g.nx - 1 ? i + 1 : g.nx - 1;
            u.x(i, j) = (h(i, jp) - h(i, jm)) / ((jp - jm) * g.dy);
            u.y(i, j) = -(h(ip, j) - h(im, j)) / ((ip - im) * g.dx);
        }
    return tflow::project(u, 1.0, 1e-12).u;
}

inline bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
    if (a.a.size() != b.a.size()) return false;
    for (std::size_t k = 0; k < a.a.size(); ++k)
        if (a.a[k] != b.a[k]) return false;
    return true;
}

inline bool bitwise_equal(const VectorField& a, const VectorField& b) {
    return bitwise_equal(a.x, b.x) && bitwise_equal(a.y, b.y);
}

}  // namespace testutil
