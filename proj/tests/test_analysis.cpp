#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "overwarp/analysis.hpp"
#include "overwarp/radial.hpp"
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

} // namespace

TEST_CASE("P-function is the squared boundary gradient on closed forms") {
    SUBCASE("flat disk about the pole, n = 2") {
        auto prof = closed_form_profile(0.0, 2, 1.0, 1e-3);
        auto P = p_function(prof, flat_polar(2), 0.0);
        for (double v : P)
            CHECK(v == Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("u = 0 gives P = 0") {
        auto zero = RadialProfile::from_functions(
            2, 0.0, 0.0, 1.0, 21, [](double) { return 0.0; }, [](double) { return 0.0; },
            [](double) { return 0.0; });
        for (double v : p_function(zero, flat_polar(2), 0.0))
            CHECK(v == 0.0);
    }
    SUBCASE("hyperbolic ball, n = 3") {
        const double c = closed_form_boundary_gradient(-1.0, 3, 1.0);
        auto prof = closed_form_profile(-1.0, 3, 1.0, 1e-3);
        auto P = p_function(prof, hyperbolic_chart(3), -1.0);
        double worst = 0.0;
        for (double v : P)
            worst = std::max(worst, std::abs(v - c * c));
        CHECK(worst < 1e-8);
    }
    SUBCASE("spherical cap, n = 2") {
        const double c = closed_form_boundary_gradient(1.0, 2, kPi / 4);
        auto prof = closed_form_profile(1.0, 2, kPi / 4, 1e-3);
        auto P = p_function(prof, spherical_chart(2), 1.0);
        double worst = 0.0;
        for (double v : P)
            worst = std::max(worst, std::abs(v - c * c));
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("radial subharmonicity margin on the equality cases") {
    struct Case {
        double k;
        int n;
        double rho;
    };
    const Case cases[] = {{0.0, 2, 1.0}, {1.0, 2, kPi / 4}, {-1.0, 3, 1.0}};
    for (const auto& c : cases) {
        WarpedManifold m = c.k == 0.0 ? flat_polar(c.n)
                           : c.k > 0.0 ? spherical_chart(c.n)
                                       : hyperbolic_chart(c.n);
        auto prof = closed_form_profile(c.k, c.n, c.rho, 1e-3);
        auto rep = p_subharmonicity_check(prof, m, c.k);
        CHECK(rep.min_lap >= -1e-6);
        CHECK(rep.max_abs_lap < 1e-6);
    }
}

TEST_CASE("2D subharmonicity: strict on the ellipse, flat for constants") {
    auto m = flat_polar(2);
    Grid2D g(1.8, 4.2, 154, 1690);
    auto mask = shared_mask(mask_from_implicit(g, [](double r, double t) {
        const double x = r * std::cos(t) - 3.0, y = r * std::sin(t);
        return x * x + y * y / 0.36 - 1.0;
    }));

    SUBCASE("solved ellipse field") {
        auto res = solve_dirichlet(m, 0.0, mask);
        auto rep = p_subharmonicity_check(m, res.u, 0.0);
        CHECK(rep.min_lap >= -10.0 * g.hr());
        CHECK(rep.max_abs_lap > 0.01);
        // exact Delta P = 8 A^2 (1/a^4 + 1/b^4) - 1 is constant ~ 0.2215
        CHECK(rep.max_abs_lap < 0.5);
    }

    SUBCASE("constant diagnostic field") {
        auto u = field_from(mask, [](double, double) { return 1.0; });
        auto rep = p_subharmonicity_check(m, u, 0.0, CutPolicy::one_sided_interior);
        CHECK(rep.min_lap == 0.0);
        CHECK(rep.max_abs_lap == 0.0);
    }
}

TEST_CASE("Pohozaev identity with exact closed-form inputs") {
    SUBCASE("flat disk, n = 2: both sides pi/4") {
        auto prof = closed_form_profile(0.0, 2, 1.0, 1e-3);
        auto rep = pohozaev_sides(prof, flat_polar(2), 0.0, 0.5);
        CHECK(rep.lhs == Approx(kPi / 4).epsilon(1e-8));
        CHECK(rep.rhs == Approx(kPi / 4).epsilon(1e-8));
        CHECK(rep.residual < 1e-6);
    }
    SUBCASE("flat ball, n = 3: both sides 4 pi / 27") {
        auto prof = closed_form_profile(0.0, 3, 1.0, 1e-3);
        auto rep = pohozaev_sides(prof, flat_polar(3), 0.0, 1.0 / 3.0);
        CHECK(rep.lhs == Approx(4.0 * kPi / 27.0).epsilon(1e-8));
        CHECK(rep.rhs == Approx(4.0 * kPi / 27.0).epsilon(1e-8));
        CHECK(rep.residual < 1e-6);
    }
    SUBCASE("hyperbolic and spherical closed forms balance too") {
        auto hyp = pohozaev_sides(closed_form_profile(-1.0, 3, 1.0, 1e-3), hyperbolic_chart(3), -1.0,
                                  closed_form_boundary_gradient(-1.0, 3, 1.0));
        CHECK(hyp.residual < 1e-6);
        auto sph = pohozaev_sides(closed_form_profile(1.0, 2, kPi / 4, 1e-3), spherical_chart(2), 1.0,
                                  closed_form_boundary_gradient(1.0, 2, kPi / 4));
        CHECK(sph.residual < 1e-6);
    }
    SUBCASE("fiber rescaling scales both sides together") {
        auto prof = closed_form_profile(-1.0, 3, 1.0, 1e-3);
        const double c = closed_form_boundary_gradient(-1.0, 3, 1.0);
        auto r1 = pohozaev_sides(prof, hyperbolic_chart(3), -1.0, c, 1.0);
        auto r7 = pohozaev_sides(prof, hyperbolic_chart(3), -1.0, c, 7.0);
        CHECK(r7.lhs == Approx(7.0 * r1.lhs).epsilon(1e-14));
        CHECK(r7.rhs == Approx(7.0 * r1.rhs).epsilon(1e-14));
        CHECK(r1.residual / std::abs(r1.lhs) < 1e-10);
        CHECK(r7.residual / std::abs(r7.lhs) < 1e-10);
    }
}

TEST_CASE("Pohozaev residual shrinks under refinement on 2D solves") {
    SUBCASE("off-pole spherical cap, n = 2, k = 1") {
        auto m = spherical_chart(2, 2.8);
        const double c = closed_form_boundary_gradient(1.0, 2, kPi / 4);
        double res_coarse = 0.0, res_fine = 0.0;
        for (int level = 0; level < 2; ++level) {
            const double h = level == 0 ? 1.0 / 48 : 1.0 / 96;
            const int nr = static_cast<int>(std::lround(1.8 / h));
            int ntheta = static_cast<int>(std::lround(2.0 * kPi / h));
            ntheta += ntheta % 2;
            Grid2D g(0.05, 1.85, nr, ntheta);
            auto mask = shared_mask(geodesic_ball_mask(m, 0.9, 0.0, kPi / 4, g, DistanceSource::exact));
            auto sol = solve_dirichlet(m, 1.0, mask);
            auto rep = pohozaev_sides(m, sol.u, 1.0, c);
            (level == 0 ? res_coarse : res_fine) = rep.residual;
        }
        CHECK(res_fine < res_coarse);
        CHECK(order_estimate(res_coarse, res_fine) > 0.8);
    }
}

TEST_CASE("compatibility integral vanishes where the theory says so") {
    SUBCASE("closed-form branches") {
        auto prof = closed_form_profile(-1.0, 2, 1.0, 1e-3);
        WarpedManifold m = hyperbolic_chart(2);
        CHECK(std::abs(compatibility_integral(prof, m, -1.0)) < 1e-12);
    }
    SUBCASE("u = 0") {
        auto zero = RadialProfile::from_functions(
            2, 0.0, 0.0, 1.0, 21, [](double) { return 0.0; }, [](double) { return 0.0; },
            [](double) { return 0.0; });
        CHECK(compatibility_integral(zero, flat_polar(2), 0.0) == 0.0);
    }
    SUBCASE("glued chart inside the Euclidean stretch") {
        WarpedManifold glued{2, WarpingFunction::glued(1.0, 2.0, 0.1),
                             Fiber{1, 1.0, FiberKind::round_sphere}, 0.0};
        Grid2D g(1.1, 1.9, 64, 512);
        auto mask = shared_mask(mask_from_implicit(g, [](double r, double t) {
            const double x = r * std::cos(t) - 1.5, y = r * std::sin(t);
            return x * x + y * y - 0.09;
        }));
        auto sol = solve_dirichlet(glued, 0.0, mask);
        CHECK(std::abs(compatibility_integral(glued, sol.u, 0.0)) < 1e-12);
    }
}

TEST_CASE("commutator identity residual is second order on warped charts") {
    // sigma = sinh keeps every term of the identity alive; on sigma = r the
    // test field r^2 cos(theta) happens to satisfy the discrete identity
    // exactly (see the flat subcase below)
    for (int n : {2, 3}) {
        double res_coarse = 0.0, res_fine = 0.0;
        for (int level = 0; level < 2; ++level) {
            const int nr = level == 0 ? 32 : 64;
            const int ntheta = level == 0 ? 192 : 384;
            auto m = hyperbolic_chart(n, 4.0);
            Grid2D g(0.8, 1.8, nr, ntheta);
            auto mask = shared_mask(mask_from_implicit(
                g, [](double r, double) { return std::max(0.85 - r, r - 1.75); }));
            auto u = field_from(mask, [](double r, double t) { return r * r * std::cos(t); });
            (level == 0 ? res_coarse : res_fine) = commutator_identity_residual(m, u);
        }
        const double order = order_estimate(res_coarse, res_fine);
        CHECK(order > 1.7);
        CHECK(order < 2.3);
    }

    SUBCASE("flat chart: discrete identity is exact for this field") {
        auto m = flat_polar(2, 4.0);
        Grid2D g(1.0, 2.0, 64, 256);
        auto mask = shared_mask(mask_from_implicit(
            g, [](double r, double) { return std::max(1.05 - r, r - 1.95); }));
        auto u = field_from(mask, [](double r, double t) { return r * r * std::cos(t); });
        CHECK(commutator_identity_residual(m, u) < 1e-9);
    }

    SUBCASE("constant fields annihilate both sides") {
        auto m = flat_polar(2);
        Grid2D g(1.0, 2.0, 32, 128);
        auto mask = shared_mask(mask_from_implicit(
            g, [](double r, double) { return std::max(1.05 - r, r - 1.95); }));
        auto u = field_from(mask, [](double, double) { return 4.2; });
        CHECK(commutator_identity_residual(m, u) == 0.0);
    }
}

TEST_CASE("Ricci quadratic-form identity on exact-eigenvalue charts") {
    SUBCASE("radial closed forms satisfy it at the matched constant") {
        struct Ref {
            double k;
            int n;
            double rho;
        };
        const Ref refs[] = {{0.0, 2, 1.0}, {1.0, 2, kPi / 4}, {-1.0, 3, 1.0}};
        for (const auto& r : refs) {
            WarpedManifold m = r.k == 0.0 ? flat_polar(r.n)
                               : r.k > 0.0 ? spherical_chart(r.n)
                                           : hyperbolic_chart(r.n);
            auto prof = closed_form_profile(r.k, r.n, r.rho, 1e-3);
            CHECK(ricci_identity_residual(prof, m, r.k) < 1e-12);
        }
    }
    SUBCASE("a mismatched constant is detected") {
        auto prof = closed_form_profile(-1.0, 2, 1.0, 1e-3);
        const double res = ricci_identity_residual(prof, hyperbolic_chart(2), 0.0);
        // residual = (n-1)|k_chart - k| |grad u|^2 somewhere > 0
        CHECK(res > 1e-3);
    }
    SUBCASE("2D solved ball on the hyperbolic chart") {
        auto m = hyperbolic_chart(2);
        auto mask = shared_mask(geodesic_ball_mask(m, 1.0, 0.0, 0.4,
                                                   Grid2D(0.5, 1.5, 64, 512), DistanceSource::exact));
        auto sol = solve_dirichlet(m, -1.0, mask);
        CHECK(ricci_identity_residual(m, sol.u, -1.0) < 1e-10);
    }
    SUBCASE("charts without exact eigenvalues are rejected") {
        WarpedManifold glued{2, WarpingFunction::glued(1.0, 2.0, 0.1),
                             Fiber{1, 1.0, FiberKind::round_sphere}, 0.0};
        auto prof = closed_form_profile(0.0, 2, 1.0, 1e-2);
        CHECK_THROWS_AS(ricci_identity_residual(prof, glued, 0.0), precondition_error);
    }
}

TEST_CASE("equality detection pairs DeltaP with the Hessian residual") {
    // the discretely testable direction: when max |DeltaP| is tiny, the
    // Hessian equation residual is tiny as well
    struct Ref {
        double k;
        int n;
        double rho;
    };
    const Ref refs[] = {{0.0, 2, 1.0}, {1.0, 2, kPi / 4}, {-1.0, 3, 1.0}};
    for (const auto& r : refs) {
        WarpedManifold m = r.k == 0.0 ? flat_polar(r.n)
                           : r.k > 0.0 ? spherical_chart(r.n)
                                       : hyperbolic_chart(r.n);
        auto prof = closed_form_profile(r.k, r.n, r.rho, 1e-3);
        auto rep = p_subharmonicity_check(prof, m, r.k);
        REQUIRE(rep.max_abs_lap < 1e-6);
        double hess = 0.0;
        for (std::size_t i = 0; i < prof.size(); ++i)
            hess = std::max(hess, std::abs(prof.d2u[i] + (1.0 / r.n + r.k * prof.u[i])));
        CHECK(hess < 1e-6);
    }
}

TEST_CASE("intermediate identities") {
    SUBCASE("flat disk exact: eq6 = -pi/4 on both sides, eq7 trivial") {
        auto prof = closed_form_profile(0.0, 2, 1.0, 1e-3);
        auto reps = intermediate_identity_checks(prof, flat_polar(2), 0.0);
        REQUIRE(reps.size() == 3);
        CHECK(reps[0].name == "eq6");
        CHECK(reps[0].lhs == Approx(-kPi / 4).epsilon(1e-8));
        CHECK(reps[0].rhs == Approx(-kPi / 4).epsilon(1e-8));
        CHECK(reps[0].residual < 1e-6);
        CHECK(reps[1].name == "eq7");
        CHECK(std::abs(reps[1].lhs) < 1e-12);
        CHECK(std::abs(reps[1].rhs) < 1e-12);
        CHECK(reps[2].name == "eq17");
        CHECK(reps[2].lhs == Approx(kPi / 8).epsilon(1e-8));
        CHECK(reps[2].residual < 1e-6);
    }
    SUBCASE("curved closed forms balance eq6/eq7/eq17 radially") {
        struct Ref {
            double k;
            int n;
            double rho;
        };
        const Ref refs[] = {{1.0, 2, kPi / 4}, {-1.0, 3, 1.0}};
        for (const auto& r : refs) {
            WarpedManifold m = r.k > 0.0 ? spherical_chart(r.n) : hyperbolic_chart(r.n);
            auto reps = intermediate_identity_checks(closed_form_profile(r.k, r.n, r.rho, 1e-3), m,
                                                     r.k);
            for (const auto& q : reps)
                CHECK(q.residual < 1e-6);
        }
    }
    SUBCASE("hyperbolic 2D solve: residuals fall at order >= 1") {
        auto m = hyperbolic_chart(2, 4.0);
        std::vector<std::vector<double>> residuals(3);
        for (int level = 0; level < 2; ++level) {
            const double h = level == 0 ? 1.0 / 48 : 1.0 / 96;
            const int nr = static_cast<int>(std::lround(1.0 / h));
            int ntheta = static_cast<int>(std::lround(2.0 * kPi * 1.5 / h));
            ntheta += ntheta % 2;
            Grid2D g(0.5, 1.5, nr, ntheta);
            auto mask = shared_mask(geodesic_ball_mask(m, 1.0, 0.0, 0.4, g, DistanceSource::exact));
            auto sol = solve_dirichlet(m, -1.0, mask);
            auto reps = intermediate_identity_checks(m, sol.u, -1.0);
            for (int i = 0; i < 3; ++i)
                residuals[i].push_back(reps[i].residual);
        }
        for (int i = 0; i < 3; ++i) {
            CHECK(residuals[i][1] < residuals[i][0]);
            CHECK(order_estimate(residuals[i][0], residuals[i][1]) > 0.8);
        }
    }
}
