#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "overwarp/geometry.hpp"
#include "overwarp/radial_profile.hpp"
#include "test_helpers.hpp"

using namespace overwarp;
using namespace overwarp::testing;
using doctest::Approx;

namespace {

std::vector<WarpingFunction> sample_families() {
    std::vector<WarpingFunction> fams;
    fams.push_back(WarpingFunction::linear(0.5, 2.0, Interval{0.0, 3.0, true}));
    fams.push_back(WarpingFunction::exponential(1.0, 0.5, -1.0, Interval{0.0, 2.0, false}));
    fams.push_back(WarpingFunction::exponential(2.0, 0.0, -0.25, Interval{-1.0, 2.0, false}));
    fams.push_back(WarpingFunction::trigonometric(1.0, 0.7, 2.0, Interval{0.01, 0.5, false}));
    fams.push_back(WarpingFunction::scaled_model(2.0, -1.0, Interval{0.0, 3.0, false}));
    fams.push_back(WarpingFunction::scaled_model(1.0, 1.0, Interval{0.0, 1.5, false}));
    fams.push_back(WarpingFunction::glued(1.0, 2.0, 0.1));
    fams.push_back(WarpingFunction::constant(1.5, Interval{-1.0, 1.0, false}));
    return fams;
}

} // namespace

TEST_CASE("sigma_eval closed-form families") {
    auto id = WarpingFunction::linear(0.0, 1.0, Interval{0.0, 4.0, true});
    CHECK(sigma_eval(id, 2.0, 0) == 2.0);
    CHECK(sigma_eval(id, 2.0, 1) == 1.0);
    CHECK(sigma_eval(id, 2.0, 2) == 0.0);

    auto sh = WarpingFunction::scaled_model(1.0, -1.0, Interval{0.0, 4.0, true});
    CHECK(sigma_eval(sh, 1.0, 2) == Approx(1.1752011936438014).epsilon(1e-15));

    auto gl = WarpingFunction::glued(1.0, 2.0, 0.5);
    CHECK(sigma_eval(gl, 1.5, 0) == 1.5);
    CHECK(sigma_eval(gl, 1.5, 1) == 1.0);

    CHECK_THROWS_AS(sigma_eval(id, -0.5, 0), domain_error);
    CHECK_THROWS_AS(sigma_eval(id, 5.0, 0), domain_error);
    CHECK_THROWS_AS(sh.eval(1.0, 4), precondition_error);

    // open interval excludes its left endpoint
    auto sm = WarpingFunction::scaled_model(1.0, -1.0, Interval{0.0, 3.0, false});
    CHECK_THROWS_AS(sigma_eval(sm, 0.0, 0), domain_error);
}

TEST_CASE("analytic derivatives agree with centered differences") {
    const double h1 = 1e-6, h2 = 1e-4, h3 = 1e-3;
    for (const auto& w : sample_families()) {
        const Interval dom = w.domain();
        Lcg rng(7);
        for (int trial = 0; trial < 12; ++trial) {
            const double r = rng.uniform(dom.lo + 0.05 * dom.length(), dom.hi - 0.05 * dom.length());
            const double fd1 = (w.eval(r + h1, 0) - w.eval(r - h1, 0)) / (2 * h1);
            const double fd2 = (w.eval(r + h2, 0) - 2 * w.eval(r, 0) + w.eval(r - h2, 0)) / (h2 * h2);
            const double fd3 = (w.eval(r + 2 * h3, 0) - 2 * w.eval(r + h3, 0) +
                                2 * w.eval(r - h3, 0) - w.eval(r - 2 * h3, 0)) /
                               (2 * h3 * h3 * h3);
            CHECK(w.eval(r, 1) == Approx(fd1).epsilon(1e-7).scale(1.0));
            CHECK(w.eval(r, 2) == Approx(fd2).epsilon(1e-4).scale(1.0));
            CHECK(w.eval(r, 3) == Approx(fd3).epsilon(5e-2).scale(0.1));
        }
    }
}

TEST_CASE("tabulated interpolation tracks the sampled function") {
    const int npts = 2001;
    const double h = 3.0 / (npts - 1);
    std::vector<double> vals(npts);
    for (int i = 0; i < npts; ++i)
        vals[i] = std::sinh(i * h);
    auto tab = WarpingFunction::tabulated(0.0, h, vals, Interval{0.0, 3.0, true});
    CHECK(tab.third_derivative_reduced_accuracy());

    Lcg rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const double r = rng.uniform(0.1, 2.9);
        CHECK(tab.eval(r, 0) == Approx(std::sinh(r)).epsilon(1e-10));
        CHECK(tab.eval(r, 1) == Approx(std::cosh(r)).epsilon(1e-7));
        CHECK(tab.eval(r, 2) == Approx(std::sinh(r)).epsilon(1e-4).scale(1.0));
        CHECK(tab.eval(r, 3) == Approx(std::cosh(r)).epsilon(5e-2).scale(1.0));
    }
}

TEST_CASE("ricci_eigenvalue_bounds on reference charts") {
    SUBCASE("flat R^3 in polar form") {
        auto m = flat_polar(3);
        const auto ev = ricci_eigenvalue_bounds(m, 2.0);
        CHECK(ev.radial == 0.0);
        CHECK(ev.tangential_lower == 0.0);
    }
    SUBCASE("hyperbolic 3-space") {
        auto m = hyperbolic_chart(3);
        const auto ev = ricci_eigenvalue_bounds(m, 1.0);
        CHECK(ev.radial == Approx(-2.0).epsilon(1e-15));
        CHECK(ev.tangential_lower == Approx(-2.0).epsilon(1e-15));
    }
    SUBCASE("exponential warp, flat fiber, n = 2") {
        WarpedManifold m{2, WarpingFunction::exponential(1.0, 0.0, -1.0, Interval{-1.0, 1.0, false}),
                         Fiber{1, 0.0, FiberKind::circle}, -1.0};
        const auto ev = ricci_eigenvalue_bounds(m, 0.0);
        CHECK(ev.radial == Approx(-1.0).epsilon(1e-15));
        CHECK(ev.tangential_lower == Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("first-integral route matches the direct formula") {
        // tabulated sinh has no exact first integral, so it exercises the
        // direct expression
        const int npts = 4001;
        const double h = 3.0 / (npts - 1);
        std::vector<double> vals(npts);
        for (int i = 0; i < npts; ++i)
            vals[i] = std::sinh(i * h);
        WarpedManifold tab{3, WarpingFunction::tabulated(0.0, h, vals, Interval{0.0, 3.0, true}),
                           Fiber{2, 1.0, FiberKind::round_sphere}, -1.0};
        auto exact = hyperbolic_chart(3);
        for (double r : {0.5, 1.0, 2.0}) {
            const auto a = ricci_eigenvalue_bounds(tab, r);
            const auto b = ricci_eigenvalue_bounds(exact, r);
            CHECK(a.radial == Approx(b.radial).epsilon(1e-4));
            CHECK(a.tangential_lower == Approx(b.tangential_lower).epsilon(1e-4));
        }
    }
}

TEST_CASE("check_ricci_bound margins on equality cases") {
    CHECK(std::abs(check_ricci_bound(hyperbolic_chart(3), -1.0, 1000)) <= 1e-12);
    CHECK(std::abs(check_ricci_bound(flat_polar(3), 0.0, 1000)) <= 1e-12);
    CHECK(std::abs(check_ricci_bound(spherical_chart(3), 1.0, 1000)) <= 1e-12);
    CHECK_THROWS_AS(check_ricci_bound(flat_polar(2), 0.0, 1), precondition_error);
}

TEST_CASE("scaled models certify their bound for sampled (rho, k)") {
    Lcg rng(19);
    for (int n : {2, 3, 4}) {
        for (int trial = 0; trial < 10; ++trial) {
            const double rho = rng.uniform(0.3, 3.0);
            const double k = rng.uniform(-2.0, 2.0);
            const double hi = k > 0.0 ? 0.5 * std::numbers::pi / std::sqrt(k) : 3.0;
            WarpedManifold m{n, WarpingFunction::scaled_model(rho, k, Interval{0.0, hi, false}),
                             Fiber{n - 1, rho, FiberKind::abstract_bound}, k};
            CHECK(check_ricci_bound(m, k, 1000) >= -1e-12);
        }
    }
}

TEST_CASE("serrin coefficient on the closed-form families") {
    auto flat2 = flat_polar(2);
    CHECK(serrin_coefficient(flat2, 0.0, 1.0) == 0.0);

    WarpedManifold hyp2{2, WarpingFunction::scaled_model(1.0, -1.0, Interval{0.0, 4.0, true}),
                        Fiber{1, 1.0, FiberKind::round_sphere}, -1.0};
    CHECK(serrin_coefficient(hyp2, -1.0, 1.0) == Approx(0.0).scale(1.0).epsilon(1e-14));

    auto flat3 = flat_polar(3);
    CHECK(serrin_coefficient(flat3, 1.0, 1.0) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("serrin coefficient vanishes identically for matched constants") {
    // the identity k sigma' + (sigma'' sigma^{n-1})'/(n sigma^{n-1}) = 0
    // for the three constant-curvature branches, swept over coefficients
    Lcg rng(11);
    for (int n = 2; n <= 4; ++n) {
        for (int trial = 0; trial < 8; ++trial) {
            const double c1 = rng.uniform(0.2, 2.0);
            const double c2 = rng.uniform(0.1, c1);
            const double k = -rng.uniform(0.2, 2.0);
            WarpedManifold m{n, WarpingFunction::exponential(c1, c2, k, Interval{0.0, 3.0, false}),
                             Fiber{n - 1, 4.0 * k * c1 * c2, FiberKind::abstract_bound}, k};
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double r = 3.0 * (i + 0.5) / 1000;
                worst = std::max(worst, std::abs(serrin_coefficient(m, k, r)));
            }
            CHECK(worst < 1e-10);
        }
        {
            const double k = 1.7;
            const double hi = 0.4; // keep sigma' >= 0
            WarpedManifold m{n, WarpingFunction::trigonometric(0.4, 1.0, k, Interval{0.01, hi, false}),
                             Fiber{n - 1, 1.0, FiberKind::abstract_bound}, k};
            double worst = 0.0;
            for (int i = 0; i < 1000; ++i) {
                const double r = 0.01 + (hi - 0.01) * (i + 0.5) / 1000;
                worst = std::max(worst, std::abs(serrin_coefficient(m, k, r)));
            }
            CHECK(worst < 1e-10);
        }
    }
}

TEST_CASE("laplacian_radial") {
    auto m2 = flat_polar(2, 2.0);
    auto prof = RadialProfile::from_functions(
        2, 0.0, 0.0, 1.0, 101, [](double r) { return (1.0 - r * r) / 4.0; },
        [](double r) { return -r / 2.0; }, [](double) { return -0.5; });

    CHECK(laplacian_radial(m2, prof, 0.5) == Approx(-1.0).epsilon(1e-14));
    // pole limit n u''(0)
    CHECK(laplacian_radial(m2, prof, 0.0) == Approx(-1.0).epsilon(1e-14));

    SUBCASE("constants are annihilated") {
        auto c = RadialProfile::from_functions(
            2, 0.0, 0.0, 1.0, 11, [](double) { return 3.25; }, [](double) { return 0.0; },
            [](double) { return 0.0; });
        CHECK(laplacian_radial(m2, c, 0.4) == 0.0);
    }

    SUBCASE("r = 0 outside a model chart") {
        WarpedManifold ann{2, WarpingFunction::linear(0.0, 1.0, Interval{0.5, 2.0, false}),
                           Fiber{1, 1.0, FiberKind::round_sphere}, 0.0};
        CHECK_THROWS_AS(laplacian_radial(ann, prof, 0.0), domain_error);
    }

    SUBCASE("spherical closed form satisfies Delta u = -1 - nku") {
        auto msin = spherical_chart(2);
        const double rho = std::numbers::pi / 4.0;
        const double denom = 2.0 * std::cos(rho);
        auto u = RadialProfile::from_functions(
            2, 1.0, 0.0, rho, 101, [&](double r) { return std::cos(r) / denom - 0.5; },
            [&](double r) { return -std::sin(r) / denom; },
            [&](double r) { return -std::cos(r) / denom; });
        const double lap = laplacian_radial(msin, u, 0.3);
        CHECK(lap == Approx(-1.0 - 2.0 * u.value(0.3)).epsilon(1e-13));
    }

    SUBCASE("linearity in u") {
        auto v = RadialProfile::from_functions(
            2, 0.0, 0.0, 1.0, 101, [](double r) { return std::cos(r); },
            [](double r) { return -std::sin(r); }, [](double r) { return -std::cos(r); });
        Lcg rng(5);
        for (int t = 0; t < 8; ++t) {
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), r = rng.uniform(0.1, 0.9);
            auto combo = RadialProfile::from_functions(
                2, 0.0, 0.0, 1.0, 101,
                [&](double x) { return a * (1.0 - x * x) / 4.0 + b * std::cos(x); },
                [&](double x) { return a * (-x / 2.0) + b * (-std::sin(x)); },
                [&](double x) { return a * (-0.5) + b * (-std::cos(x)); });
            const double lhs = laplacian_radial(m2, combo, r);
            const double rhs = a * laplacian_radial(m2, prof, r) + b * laplacian_radial(m2, v, r);
            CHECK(lhs == Approx(rhs).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("radial_hessian_components") {
    auto m2 = flat_polar(2, 2.0);
    auto prof = RadialProfile::from_functions(
        2, 0.0, 0.0, 1.0, 101, [](double r) { return (1.0 - r * r) / 4.0; },
        [](double r) { return -r / 2.0; }, [](double) { return -0.5; });
    const auto hc = radial_hessian_components(m2, prof, 0.7);
    CHECK(hc.rr == Approx(-0.5).epsilon(1e-15));
    CHECK(hc.tangential == Approx(-0.5).epsilon(1e-14));

    auto c = RadialProfile::from_functions(
        2, 0.0, 0.0, 1.0, 11, [](double) { return 1.0; }, [](double) { return 0.0; },
        [](double) { return 0.0; });
    const auto h0 = radial_hessian_components(m2, c, 0.3);
    CHECK(h0.rr == 0.0);
    CHECK(h0.tangential == 0.0);

    SUBCASE("hyperbolic closed form is proportional to the metric") {
        auto m3 = hyperbolic_chart(3);
        const double ch1 = std::cosh(1.0);
        auto u = RadialProfile::from_functions(
            3, -1.0, 0.0, 1.0, 101,
            [&](double r) { return 1.0 / 3.0 - std::cosh(r) / (3.0 * ch1); },
            [&](double r) { return -std::sinh(r) / (3.0 * ch1); },
            [&](double r) { return -std::cosh(r) / (3.0 * ch1); });
        const auto h = radial_hessian_components(m3, u, 0.5);
        const double expected = -(1.0 / 3.0 - u.value(0.5));
        CHECK(h.rr == Approx(expected).epsilon(1e-14));
        CHECK(h.tangential == Approx(expected).epsilon(1e-14));
    }

    SUBCASE("sigma = 0 is singular") {
        WarpedManifold m{2, WarpingFunction::linear(0.0, 1.0, Interval{0.0, 2.0, true}),
                         Fiber{1, 1.0, FiberKind::round_sphere}, 0.0};
        CHECK_THROWS_AS(radial_hessian_components(m, prof, 0.0), domain_error);
    }
}

TEST_CASE("construction invariants") {
    CHECK_THROWS_AS(Interval({2.0, 1.0, false}).validate(), construction_error);
    CHECK_THROWS_AS(Interval({1.0, 2.0, true}).validate(), construction_error);
    CHECK_THROWS_AS(Fiber({1, 0.5, FiberKind::round_sphere}).validate(), construction_error);
    CHECK_THROWS_AS(Fiber({2, 1.0, FiberKind::flat_torus}).validate(), construction_error);
    // sigma must stay positive on the interval
    CHECK_THROWS_AS(WarpingFunction::trigonometric(1.0, 0.0, 1.0, Interval{0.0, 3.0, true})
                        .check_positive(),
                    construction_error);
    // fiber dimension mismatch
    CHECK_THROWS_AS(WarpedManifold(3, WarpingFunction::linear(0.0, 1.0, Interval{0.0, 1.0, true}),
                                   Fiber{1, 1.0, FiberKind::round_sphere}, 0.0),
                    construction_error);
}
