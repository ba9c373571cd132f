// Kernel benchmark: the OpenMP build against the single-threaded twins
// used by the test suite.  Prints one row per kernel with the best-of-R
// time for each side, the speedup, and a bitwise agreement check.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "support/serial_ref.hpp"
#include "support/testutil.hpp"
#include "tflow/fd.hpp"
#include "tflow/reduce.hpp"

using namespace tflow;

namespace {

volatile double sink = 0.0;

double best_of(int reps, const std::function<double()>& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        sink = sink + body();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void row(const std::string& name, double serial_ms, double parallel_ms, bool bitwise) {
    std::printf("%-14s %10.3f %12.3f %9.2fx   %s\n", name.c_str(), serial_ms,
                parallel_ms, serial_ms / parallel_ms, bitwise ? "bitwise" : "DIFFERS");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernel benchmark: serial twins vs the parallel build"};
    int n = 512;
    int reps = 20;
    app.add_option("-n,--size", n, "grid cells per side")->check(CLI::Range(8, 8192));
    app.add_option("-r,--reps", reps, "repetitions per kernel")->check(CLI::Range(1, 1000));
    CLI11_PARSE(app, argc, argv);

    const Grid2D g(n, n, 1.0, 1.0);
    const ScalarField f = testutil::random_scalar(g, 101);
    const ScalarField h = testutil::random_scalar(g, 102);
    const VectorField v = testutil::random_vector(g, 103);

#ifdef _OPENMP
    std::printf("grid %dx%d, %d reps, %d threads\n", n, n, reps, omp_get_max_threads());
#else
    std::printf("grid %dx%d, %d reps, single-threaded build\n", n, n, reps);
#endif
    std::printf("%-14s %10s %12s %9s\n", "kernel", "serial/ms", "parallel/ms", "speedup");

    {
        const ScalarField a = serial_ref::laplace(f, Bc::neumann);
        const ScalarField b = laplace(f, Bc::neumann);
        row("laplace", best_of(reps, [&] { return serial_ref::laplace(f, Bc::neumann).a[0]; }),
            best_of(reps, [&] { return laplace(f, Bc::neumann).a[0]; }),
            testutil::bitwise_equal(a, b));
    }
    {
        const VectorField a = serial_ref::grad(f, Bc::neumann);
        const VectorField b = grad(f, Bc::neumann);
        row("grad", best_of(reps, [&] { return serial_ref::grad(f, Bc::neumann).x.a[0]; }),
            best_of(reps, [&] { return grad(f, Bc::neumann).x.a[0]; }),
            testutil::bitwise_equal(a, b));
    }
    {
        const ScalarField a = serial_ref::div(v, Bc::noslip);
        const ScalarField b = div(v, Bc::noslip);
        row("div", best_of(reps, [&] { return serial_ref::div(v, Bc::noslip).a[0]; }),
            best_of(reps, [&] { return div(v, Bc::noslip).a[0]; }),
            testutil::bitwise_equal(a, b));
    }
    {
        const ScalarField prod = multiply(f, h);
        auto cell = [&](int i, int j) { return prod(i, j); };
        const double a = serial_ref::sum_cells(g, prod);
        const double b = det_sum_cells(g, cell);
        row("sum_cells", best_of(reps, [&] { return serial_ref::sum_cells(g, prod); }),
            best_of(reps, [&] { return det_sum_cells(g, cell); }), a == b);
    }
    {
        const double a = serial_ref::dot_raw(f.a, h.a);
        const double b = det_dot_raw(f.a, h.a);
        row("dot_raw", best_of(reps, [&] { return serial_ref::dot_raw(f.a, h.a); }),
            best_of(reps, [&] { return det_dot_raw(f.a, h.a); }), a == b);
    }
    return 0;
}
