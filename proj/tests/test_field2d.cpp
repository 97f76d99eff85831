#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "overwarp/field2d.hpp"
#include "test_helpers.hpp"

using namespace overwarp;
using namespace overwarp::testing;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const DomainMask> shared_mask(DomainMask m) {
    return std::make_shared<const DomainMask>(std::move(m));
}

template <class F>
ScalarField2D field_from(std::shared_ptr<const DomainMask> mask, F f) {
    ScalarField2D u(mask, 0.0);
    const Grid2D& g = mask->grid;
    for (int idx : mask->nodes)
        u.values[idx] = f(g.r(g.node_i(idx)), g.theta(g.node_j(idx)));
    return u;
}

DomainMask annulus(const Grid2D& g, double r_in, double r_out) {
    return mask_from_implicit(g, [=](double r, double) { return std::max(r_in - r, r - r_out); });
}

} // namespace

TEST_CASE("effective_dimension_laplacian against calculus") {
    auto m = flat_polar(2);
    Grid2D g(1.0, 2.0, 64, 256);
    auto mask = shared_mask(annulus(g, 1.05, 1.95));

    SUBCASE("r^2 cos(theta) has Laplacian 3 cos(theta)") {
        auto u = field_from(mask, [](double r, double t) { return r * r * std::cos(t); });
        auto lap = effective_dimension_laplacian(m, u, CutPolicy::one_sided_interior);
        double worst = 0.0;
        int used = 0;
        for (int idx : mask->nodes) {
            if (!std::isfinite(lap.values[idx]))
                continue;
            const double t = g.theta(g.node_j(idx));
            worst = std::max(worst, std::abs(lap.values[idx] - 3.0 * std::cos(t)));
            ++used;
        }
        CHECK(used > 1000);
        CHECK(worst < 5e-3);
    }

    SUBCASE("constants vanish exactly") {
        auto u = field_from(mask, [](double, double) { return 2.5; });
        auto lap = effective_dimension_laplacian(m, u, CutPolicy::one_sided_interior);
        for (int idx : mask->nodes)
            if (std::isfinite(lap.values[idx]))
                CHECK(lap.values[idx] == 0.0);
    }

    SUBCASE("flat cylinder: sin(theta) is an eigenfunction") {
        auto mc = cylinder_chart(2);
        Grid2D gc(-1.0, 1.0, 64, 128);
        auto band = shared_mask(band_mask(gc, 0.5));
        auto u = field_from(band, [](double, double t) { return std::sin(t); });
        auto lap = effective_dimension_laplacian(mc, u, CutPolicy::one_sided_interior);
        double worst = 0.0;
        for (int idx : band->nodes)
            if (std::isfinite(lap.values[idx]))
                worst = std::max(worst,
                                 std::abs(lap.values[idx] + std::sin(gc.theta(gc.node_j(idx)))));
        CHECK(worst < 5e-3);
    }
}

TEST_CASE("geodesic ball masks and volumes") {
    SUBCASE("flat disk area pi/4") {
        auto m = flat_polar(2);
        Grid2D g(1.3, 2.7, 96, 1024);
        auto mask = geodesic_ball_mask(m, 2.0, 0.0, 0.5, g, DistanceSource::exact);
        CHECK(masked_volume(m, mask) == Approx(kPi / 4).epsilon(0.02));
    }
    SUBCASE("hyperbolic ball area 2 pi (cosh(0.3) - 1)") {
        auto m = hyperbolic_chart(2);
        Grid2D g(0.55, 1.45, 128, 2048);
        auto mask = geodesic_ball_mask(m, 1.0, 0.0, 0.3, g, DistanceSource::exact);
        CHECK(masked_volume(m, mask) == Approx(0.28487028582381028).epsilon(0.02));
    }
    SUBCASE("vanishing radius gives an empty or near-empty mask") {
        auto m = flat_polar(2);
        Grid2D g(1.3, 2.7, 32, 256);
        auto mask = geodesic_ball_mask(m, 2.0, 0.0, 1e-9, g, DistanceSource::exact);
        CHECK(mask.count_inside() <= 1);
    }
    SUBCASE("ball reaching the chart edge overflows") {
        auto m = flat_polar(2);
        Grid2D g(1.8, 2.2, 16, 256);
        CHECK_THROWS_AS(geodesic_ball_mask(m, 2.0, 0.0, 0.5, g, DistanceSource::exact),
                        chart_overflow_error);
    }
}

TEST_CASE("eikonal distance") {
    auto m = flat_polar(2);
    Grid2D g(1.0, 3.0, 128, 1206);
    auto d = eikonal_distance(m, 2.0, 0.0, g);
    const double h = g.hr();

    SUBCASE("radial probe") {
        const int i = static_cast<int>(std::lround((2.5 - g.r_lo) / g.hr()));
        CHECK(std::abs(d.values[g.node(i, 0)] - 0.5) < 2 * h);
    }
    SUBCASE("center value is zero") {
        const int ic = static_cast<int>(std::lround((2.0 - g.r_lo) / g.hr()));
        CHECK(std::abs(d.values[g.node(ic, 0)]) < 1e-12);
    }
    SUBCASE("agrees with the law of cosines at random nodes") {
        auto exact = closed_form_distance(m, 2.0, 0.0);
        Lcg rng(17);
        double worst = 0.0;
        for (int trial = 0; trial < 40; ++trial) {
            const int i = static_cast<int>(rng.uniform(5, g.nr - 5));
            const int j = static_cast<int>(rng.uniform(0, g.ntheta));
            const double ex = exact(g.r(i), g.theta(j));
            if (ex > 0.9)
                continue; // keep within a well-resolved neighborhood
            worst = std::max(worst, std::abs(d.values[g.node(i, j)] - ex));
        }
        CHECK(worst < 3 * h);
    }
    SUBCASE("flat cylinder quarter turn") {
        auto mc = cylinder_chart(2);
        Grid2D gc(-1.0, 1.0, 128, 256);
        auto dc = eikonal_distance(mc, 0.0, 0.0, gc);
        const int ic = 64;
        const int jq = 64; // theta = pi/2
        CHECK(dc.values[gc.node(ic, jq)] == Approx(kPi / 2).epsilon(0.02));
    }
}

TEST_CASE("solve_dirichlet on the flat disk") {
    auto m = flat_polar(2);
    Grid2D g(1.3, 2.7, 90, 1006);
    auto mask = shared_mask(geodesic_ball_mask(m, 2.0, 0.0, 0.5, g, DistanceSource::exact));
    auto res = solve_dirichlet(m, 0.0, mask);
    CHECK(res.positive_interior);
    CHECK(res.final_residual < 1e-10);

    double umax = 0.0;
    for (int idx : mask->nodes)
        umax = std::max(umax, res.u.values[idx]);
    CHECK(umax == Approx(0.0625).epsilon(5e-3));

    SUBCASE("interior values match (R^2 - d^2)/4") {
        auto dist = closed_form_distance(m, 2.0, 0.0);
        double worst = 0.0;
        for (int idx : mask->nodes) {
            const double r = g.r(g.node_i(idx)), t = g.theta(g.node_j(idx));
            const double dd = dist(r, t);
            worst = std::max(worst, std::abs(res.u.values[idx] - (0.25 - dd * dd) / 4.0));
        }
        CHECK(worst < 5e-4);
    }

    SUBCASE("boundary gradient statistics") {
        auto stats = boundary_gradient_stats(m, res.u);
        CHECK(stats.mean == Approx(0.25).epsilon(0.01));
        CHECK(stats.relative_defect() < 0.02);
        CHECK(stats.samples.size() > 100);
    }

    SUBCASE("P-type sanity: gradient norm at the center is small") {
        auto gn = gradient_norm(m, res.u, CutPolicy::dirichlet_cut);
        const int ic = static_cast<int>(std::lround((2.0 - g.r_lo) / g.hr()));
        CHECK(std::abs(gn.values[g.node(ic, 0)]) < 5e-3);
    }
}

TEST_CASE("solve_dirichlet on the flat ellipse keeps a large defect") {
    auto m = flat_polar(2);
    Grid2D g(1.8, 4.2, 154, 1690);
    auto mask = shared_mask(mask_from_implicit(g, [](double r, double t) {
        const double x = r * std::cos(t) - 3.0, y = r * std::sin(t);
        return x * x + y * y / 0.36 - 1.0;
    }));
    auto res = solve_dirichlet(m, 0.0, mask);
    CHECK(res.positive_interior);

    double umax = 0.0;
    for (int idx : mask->nodes)
        umax = std::max(umax, res.u.values[idx]);
    CHECK(umax == Approx(0.13235294117647059).epsilon(5e-3));

    auto stats = boundary_gradient_stats(m, res.u);
    CHECK(stats.relative_defect() > 0.05);
}

TEST_CASE("solve_dirichlet on the cylinder band is exact for quadratics") {
    auto m = cylinder_chart(2);
    Grid2D g(-1.0, 1.0, 128, 64);
    auto mask = shared_mask(band_mask(g, 0.5));
    auto res = solve_dirichlet(m, 0.0, mask);
    double worst = 0.0;
    for (int idx : mask->nodes) {
        const double r = g.r(g.node_i(idx));
        worst = std::max(worst, std::abs(res.u.values[idx] - (0.25 - r * r) / 2.0));
    }
    CHECK(worst < 1e-8);

    auto stats = boundary_gradient_stats(m, res.u);
    CHECK(stats.relative_defect() < 1e-6);
    CHECK(stats.mean == Approx(0.5).epsilon(1e-6));
}

TEST_CASE("k > 0 past the principal eigenvalue is caught") {
    // flat disk of radius 0.5 has lambda_1 = (j_{0,1}/0.5)^2 ~ 23.1;
    // nk = 30 makes the shifted operator indefinite
    auto m = flat_polar(2);
    Grid2D g(1.3, 2.7, 44, 504);
    auto mask = shared_mask(geodesic_ball_mask(m, 2.0, 0.0, 0.5, g, DistanceSource::exact));
    bool caught = false;
    try {
        auto res = solve_dirichlet(m, 15.0, mask, SolveOptions{1e-10, 40000, 0.0, 1, 8});
        caught = res.flagged_indefinite;
    } catch (const solver_error&) {
        caught = true;
    }
    CHECK(caught);
}

TEST_CASE("gradient_norm") {
    SUBCASE("u = r has unit metric gradient") {
        auto m = hyperbolic_chart(2);
        Grid2D g(0.5, 1.5, 64, 512);
        auto mask = shared_mask(annulus(g, 0.55, 1.45));
        auto u = field_from(mask, [](double r, double) { return r; });
        auto gn = gradient_norm(m, u, CutPolicy::one_sided_interior);
        for (int idx : mask->nodes)
            CHECK(gn.values[idx] == Approx(1.0).epsilon(1e-11));
    }
    SUBCASE("u = theta against sigma = 2") {
        WarpedManifold m{2, WarpingFunction::constant(2.0, Interval{-1.0, 1.0, false}),
                         Fiber{1, 0.0, FiberKind::circle}, 0.0};
        Grid2D g(-1.0, 1.0, 32, 256);
        auto mask = shared_mask(mask_from_implicit(g, [](double r, double t) {
            return std::max(std::abs(r) - 0.5, std::max(0.5 - t, t - 2.0));
        }));
        auto u = field_from(mask, [](double, double t) { return t; });
        auto gn = gradient_norm(m, u, CutPolicy::one_sided_interior);
        for (int idx : mask->nodes)
            CHECK(gn.values[idx] == Approx(0.5).epsilon(1e-11));
    }
}

TEST_CASE("boundary stats demand enough samples") {
    auto m = flat_polar(2);
    Grid2D g(1.3, 2.7, 16, 64);
    auto mask = shared_mask(geodesic_ball_mask(m, 2.0, 0.0, 0.04, g, DistanceSource::exact));
    ScalarField2D u(mask, 0.0);
    CHECK_THROWS_AS(boundary_gradient_stats(m, u), insufficient_resolution_error);
}

TEST_CASE("solve error converges at order >= 1.5 on the flat disk") {
    auto m = flat_polar(2);
    auto dist = closed_form_distance(m, 2.0, 0.0);
    double err[2];
    for (int level = 0; level < 2; ++level) {
        const double h = level == 0 ? 1.0 / 32 : 1.0 / 64;
        Grid2D g(1.3, 2.7, static_cast<int>(std::lround(1.4 / h)), 2 * static_cast<int>(kPi * 2.7 / h));
        auto mask = shared_mask(geodesic_ball_mask(m, 2.0, 0.0, 0.5, g, DistanceSource::exact));
        auto res = solve_dirichlet(m, 0.0, mask);
        double worst = 0.0;
        for (int idx : mask->nodes) {
            const double d = dist(g.r(g.node_i(idx)), g.theta(g.node_j(idx)));
            worst = std::max(worst, std::abs(res.u.values[idx] - (0.25 - d * d) / 4.0));
        }
        err[level] = worst;
    }
    CHECK(std::log2(err[0] / err[1]) >= 1.5);
}

TEST_CASE("n = 3 torus-fiber annulus matches its 1D closed form") {
    // u'' + (2/r) u' = -1 with u(1) = u(2) = 0: u = -r^2/6 + 7/6 - 1/r
    WarpedManifold m{3, WarpingFunction::linear(0.0, 1.0, Interval{0.0, 4.0, true}),
                     Fiber{2, 0.0, FiberKind::flat_torus}, 0.0};
    Grid2D g(0.8, 2.2, 112, 1130);
    auto mask = shared_mask(annulus(g, 1.0, 2.0));
    auto res = solve_dirichlet(m, 0.0, mask);
    CHECK(res.positive_interior);
    double worst = 0.0;
    for (int idx : mask->nodes) {
        const double r = g.r(g.node_i(idx));
        worst = std::max(worst, std::abs(res.u.values[idx] - (-r * r / 6.0 + 7.0 / 6.0 - 1.0 / r)));
    }
    CHECK(worst < 5e-4);
}

TEST_CASE("maximum principle: k <= 0 solves stay positive inside") {
    auto m = hyperbolic_chart(2);
    auto mask = shared_mask(geodesic_ball_mask(m, 1.0, 0.0, 0.4,
                                               Grid2D(0.5, 1.5, 64, 512), DistanceSource::exact));
    auto res = solve_dirichlet(m, -1.0, mask);
    CHECK(res.positive_interior);
    CHECK(!res.flagged_indefinite);
}

TEST_CASE("masks reject disconnected inside sets") {
    Grid2D g(-1.0, 1.0, 32, 64);
    CHECK_THROWS_AS(mask_from_implicit(g, [](double r, double) {
                        return std::min(std::abs(r - 0.5) - 0.1, std::abs(r + 0.5) - 0.1);
                    }),
                    construction_error);
}
