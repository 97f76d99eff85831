// Timing comparison of the serial reference kernels against their OpenMP
// variants.  The parallel paths must agree bit for bit with the serial
// ones, so the check column doubles as a correctness audit.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numbers>

#include <omp.h>

#include "overwarp/analysis.hpp"
#include "overwarp/geodesics.hpp"
#include "overwarp/scenarios.hpp"

using namespace overwarp;

namespace {

WarpedManifold flat_chart() {
    return {2, WarpingFunction::linear(0.0, 1.0, Interval{0.0, 6.0, true}),
            Fiber{1, 1.0, FiberKind::round_sphere}, 0.0};
}

WarpedManifold hyperbolic_chart() {
    return {2, WarpingFunction::scaled_model(1.0, -1.0, Interval{0.0, 6.0, true}),
            Fiber{1, 1.0, FiberKind::round_sphere}, -1.0};
}

void row(const char* kernel, const char* size, double t_serial, double t_parallel, bool identical) {
    std::printf("%-22s %-18s %9.3f ms %9.3f ms %7.2fx   %s\n", kernel, size, 1e3 * t_serial,
                1e3 * t_parallel, t_serial / t_parallel, identical ? "bitwise equal" : "MISMATCH");
}

} // namespace

int main() {
    const int threads = omp_get_max_threads();
    std::printf("OpenMP max threads: %d\n", threads);
    std::printf("%-22s %-18s %12s %12s %9s   %s\n", "kernel", "size", "serial", "parallel", "speedup",
                "check");

    {
        auto m = flat_chart();
        auto mask = ellipse_mask(m, 1.0, 0.6, 3.0, 1.0 / 128);
        char size[64];
        std::snprintf(size, sizeof size, "%d nodes", mask->count_inside());

        SolveOptions serial;
        serial.partitions = 1;
        double t0 = omp_get_wtime();
        auto a = solve_dirichlet(m, 0.0, mask, serial);
        double t1 = omp_get_wtime();

        SolveOptions par;
        par.partitions = threads;
        double t2 = omp_get_wtime();
        auto b = solve_dirichlet(m, 0.0, mask, par);
        double t3 = omp_get_wtime();

        const bool same = a.sweeps == b.sweeps &&
                          std::memcmp(a.u.values.data(), b.u.values.data(),
                                      a.u.values.size() * sizeof(double)) == 0;
        row("dirichlet SOR solve", size, t1 - t0, t3 - t2, same);

        // quadrature over the solved field
        auto f = [&](int idx) { return b.u.values[idx] * b.u.values[idx]; };
        const int reps = 100;
        double s1 = 0.0, s2 = 0.0;
        t0 = omp_get_wtime();
        for (int rep = 0; rep < reps; ++rep)
            s1 += integrate_masked(m, *mask, f, 1);
        t1 = omp_get_wtime();
        t2 = omp_get_wtime();
        for (int rep = 0; rep < reps; ++rep)
            s2 += integrate_masked(m, *mask, f, threads);
        t3 = omp_get_wtime();
        char qsize[64];
        std::snprintf(qsize, sizeof qsize, "%d x %d evals", reps, mask->count_inside());
        row("cut-cell quadrature", qsize, (t1 - t0) / reps, (t3 - t2) / reps, s1 == s2);
    }

    {
        auto m = hyperbolic_chart();
        StarOptions o1;
        o1.grid_h = 0.4 / 128;
        o1.partitions = 1;
        StarOptions oN = o1;
        oN.partitions = threads;
        const int rays = 256;

        double t0 = omp_get_wtime();
        const double m1 = star_shapedness_check(m, 1.0, 0.0, 0.4, rays, o1);
        double t1 = omp_get_wtime();
        double t2 = omp_get_wtime();
        const double m2 = star_shapedness_check(m, 1.0, 0.0, 0.4, rays, oN);
        double t3 = omp_get_wtime();
        char size[64];
        std::snprintf(size, sizeof size, "%d rays", rays);
        row("geodesic ray batch", size, t1 - t0, t3 - t2, m1 == m2);
    }

    {
        auto m = hyperbolic_chart();
        ShootingOptions o1;
        o1.partitions = 1;
        ShootingOptions oN = o1;
        oN.partitions = threads;
        double t0 = omp_get_wtime();
        const double d1 = distance_by_shooting(m, 1.0, 0.0, 1.6, 2.0, 1e-3, o1);
        double t1 = omp_get_wtime();
        double t2 = omp_get_wtime();
        const double d2 = distance_by_shooting(m, 1.0, 0.0, 1.6, 2.0, 1e-3, oN);
        double t3 = omp_get_wtime();
        row("distance angle sweep", "256 angles", t1 - t0, t3 - t2, d1 == d2);
    }

    return 0;
}
