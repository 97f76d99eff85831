#include "overwarp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace overwarp {

double order_estimate(double res_coarse, double res_fine) {
    if (!(res_fine > 0.0) || !(res_coarse > 0.0))
        return std::numeric_limits<double>::quiet_NaN();
    return std::log2(res_coarse / res_fine);
}

double unit_fiber_area(int n) {
    // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double integrate_radial(const RadialProfile& u, const WarpedManifold& m,
                        const std::function<double(double, double, double)>& f, double fiber_scale) {
    const std::size_t npts = u.size();
    if (npts < 2)
        throw precondition_error("integrate_radial: profile too short");
    double acc = 0.0;
    auto weighted = [&](double r) {
        // at a pole the volume weight vanishes and integrands built from
        // sigma ratios may be 0/0 there; the integral contribution is 0
        const double sig = m.sigma.eval(r, 0);
        if (sig == 0.0)
            return 0.0;
        return f(r, u.value(r), u.deriv(r)) * std::pow(sig, m.n - 1);
    };
    for (std::size_t i = 0; i + 1 < npts; ++i) {
        const double h = u.r[i + 1] - u.r[i];
        const double rm = 0.5 * (u.r[i] + u.r[i + 1]);
        acc += h / 6.0 * (weighted(u.r[i]) + 4.0 * weighted(rm) + weighted(u.r[i + 1]));
    }
    return acc * unit_fiber_area(m.n) * fiber_scale;
}

std::vector<double> p_function(const RadialProfile& u, const WarpedManifold& m, double k) {
    (void)m;
    std::vector<double> P(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        P[i] = u.du[i] * u.du[i] + (2.0 / u.n) * u.u[i] + k * u.u[i] * u.u[i];
    return P;
}

ScalarField2D p_function(const WarpedManifold& m, const ScalarField2D& u, double k, CutPolicy policy) {
    ScalarField2D gn = gradient_norm(m, u, policy);
    ScalarField2D out(u.mask, std::numeric_limits<double>::quiet_NaN());
    for (int idx : u.mask->nodes) {
        const double g = gn.values[idx];
        const double val = u.values[idx];
        out.values[idx] = g * g + (2.0 / m.n) * val + k * val * val;
    }
    return out;
}

SubharmonicityReport p_subharmonicity_check(const RadialProfile& u, const WarpedManifold& m, double k) {
    const std::vector<double> P = p_function(u, m, k);
    SubharmonicityReport rep;
    rep.min_lap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double h = u.r[i + 1] - u.r[i];
        const double d2 = (P[i + 1] - 2.0 * P[i] + P[i - 1]) / (h * h);
        const double d1 = (P[i + 1] - P[i - 1]) / (2.0 * h);
        const double r = u.r[i];
        const double lap = d2 + (m.n - 1) * (m.sigma.eval(r, 1) / m.sigma.eval(r, 0)) * d1;
        rep.min_lap = std::min(rep.min_lap, lap);
        rep.max_abs_lap = std::max(rep.max_abs_lap, std::abs(lap));
        ++rep.evaluated_nodes;
    }
    return rep;
}

SubharmonicityReport p_subharmonicity_check(const WarpedManifold& m, const ScalarField2D& u, double k,
                                            CutPolicy policy) {
    ScalarField2D P = p_function(m, u, k, policy);
    ScalarField2D lap = effective_dimension_laplacian(m, P, CutPolicy::one_sided_interior);
    const DomainMask& mask = *u.mask;
    SubharmonicityReport rep;
    rep.min_lap = std::numeric_limits<double>::infinity();
    for (int idx : mask.nodes) {
        const double v = lap.values[idx];
        if (!std::isfinite(v))
            continue;
        // P at cut-adjacent nodes mixes one-sided solution derivatives;
        // second differences are only meaningful one ring further in
        bool stencil_clean = mask.cut_dirs[idx] == 0;
        for (int d = 0; d < 4 && stencil_clean; ++d) {
            const int nb = mask.neighbor(idx, d);
            stencil_clean = nb >= 0 && mask.is_inside(nb) && mask.cut_dirs[nb] == 0;
        }
        if (!stencil_clean)
            continue;
        rep.min_lap = std::min(rep.min_lap, v);
        rep.max_abs_lap = std::max(rep.max_abs_lap, std::abs(v));
        ++rep.evaluated_nodes;
    }
    if (rep.evaluated_nodes == 0)
        throw insufficient_resolution_error("p_subharmonicity_check: no full-stencil interior nodes");
    return rep;
}

namespace {

// (sigma'' sigma^{n-1})' / sigma^{n-1} expanded analytically.
double hessian_weight(const WarpedManifold& m, double r) {
    const double sig = m.sigma.eval(r, 0);
    return m.sigma.eval(r, 3) + (m.n - 1) * m.sigma.eval(r, 2) * m.sigma.eval(r, 1) / sig;
}

} // namespace

QuadratureReport pohozaev_sides(const RadialProfile& u, const WarpedManifold& m, double k, double c,
                                double fiber_scale) {
    const int n = m.n;
    const double su = integrate_radial(
        u, m, [&](double r, double uu, double) { return m.sigma.eval(r, 1) * uu; }, fiber_scale);
    const double s1 = integrate_radial(
        u, m, [&](double r, double, double) { return m.sigma.eval(r, 1); }, fiber_scale);
    const double su2 = integrate_radial(
        u, m, [&](double r, double uu, double) { return m.sigma.eval(r, 1) * uu * uu; }, fiber_scale);
    const double hw = integrate_radial(
        u, m, [&](double r, double uu, double) { return hessian_weight(m, r) * uu * uu; }, fiber_scale);

    QuadratureReport rep;
    rep.name = "pre2";
    rep.lhs = (n + 2.0) / n * su;
    rep.rhs = c * c * s1 + (n - 2.0) / (2.0 * n) * hw - 2.0 * k * su2;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.grid_spacing = u.spacing();
    return rep;
}

QuadratureReport pohozaev_sides(const WarpedManifold& m, const ScalarField2D& u, double k, double c,
                                double fiber_scale, int partitions) {
    const Grid2D& g = u.mask->grid;
    const int n = m.n;
    auto r_of = [&](int idx) { return g.r(g.node_i(idx)); };
    const double su = integrate_masked(
        m, *u.mask, [&](int idx) { return m.sigma.eval(r_of(idx), 1) * u.values[idx]; }, partitions);
    const double s1 = integrate_masked(
        m, *u.mask, [&](int idx) { return m.sigma.eval(r_of(idx), 1); }, partitions);
    const double su2 = integrate_masked(
        m, *u.mask,
        [&](int idx) { return m.sigma.eval(r_of(idx), 1) * u.values[idx] * u.values[idx]; }, partitions);
    const double hw = integrate_masked(
        m, *u.mask, [&](int idx) { return hessian_weight(m, r_of(idx)) * u.values[idx] * u.values[idx]; },
        partitions);

    QuadratureReport rep;
    rep.name = "pre2";
    rep.lhs = (n + 2.0) / n * su * fiber_scale;
    rep.rhs = (c * c * s1 + (n - 2.0) / (2.0 * n) * hw - 2.0 * k * su2) * fiber_scale;
    rep.residual = std::abs(rep.lhs - rep.rhs);
    rep.grid_spacing = g.hr();
    return rep;
}

double compatibility_integral(const RadialProfile& u, const WarpedManifold& m, double k) {
    return integrate_radial(u, m, [&](double r, double uu, double) {
        return serrin_coefficient(m, k, r) * uu * uu;
    });
}

double compatibility_integral(const WarpedManifold& m, const ScalarField2D& u, double k, int partitions) {
    const Grid2D& g = u.mask->grid;
    return integrate_masked(
        m, *u.mask,
        [&](int idx) {
            const double uu = u.values[idx];
            return serrin_coefficient(m, k, g.r(g.node_i(idx))) * uu * uu;
        },
        partitions);
}

namespace {

void require_exact_ricci(const WarpedManifold& m) {
    const auto knat = m.sigma.natural_curvature();
    const auto kappa = m.sigma.first_integral();
    if (!knat || !kappa || std::abs(m.fiber.ricci_lower_bound - *kappa) > 1e-14)
        throw precondition_error("ricci_identity_residual: Ricci eigenvalues are only exact for "
                                 "constant-curvature families with an Einstein fiber");
}

} // namespace

double ricci_identity_residual(const RadialProfile& u, const WarpedManifold& m, double k) {
    require_exact_ricci(m);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.r[i];
        if (m.sigma.eval(r, 0) == 0.0)
            continue;
        const RicciEigenvalues ev = ricci_eigenvalue_bounds(m, r);
        const double g2 = u.du[i] * u.du[i]; // gradient is purely radial
        worst = std::max(worst, std::abs(g2 * ev.radial - (m.n - 1) * k * g2));
    }
    return worst;
}

double ricci_identity_residual(const WarpedManifold& m, const ScalarField2D& u, double k) {
    require_exact_ricci(m);
    GradientFields gf = discrete_gradient(u, CutPolicy::dirichlet_cut);
    const Grid2D& g = u.mask->grid;
    double worst = 0.0;
    for (int idx : u.mask->nodes) {
        const double r = g.r(g.node_i(idx));
        const double sig = m.sigma.eval(r, 0);
        const double ur = gf.d_r.values[idx];
        const double ut = gf.d_theta.values[idx];
        if (!std::isfinite(ur) || !std::isfinite(ut))
            continue;
        const double g2 = ur * ur + ut * ut / (sig * sig);
        const RicciEigenvalues ev = ricci_eigenvalue_bounds(m, r);
        const double ric = ur * ur * ev.radial + (g2 - ur * ur) * ev.tangential_lower;
        worst = std::max(worst, std::abs(ric - (m.n - 1) * k * g2));
    }
    return worst;
}

double commutator_identity_residual(const WarpedManifold& m, const ScalarField2D& u) {
    const DomainMask& mask = *u.mask;
    const Grid2D& g = mask.grid;

    GradientFields du = discrete_gradient(u, CutPolicy::one_sided_interior);
    ScalarField2D v(u.mask, std::numeric_limits<double>::quiet_NaN());
    for (int idx : mask.nodes)
        v.values[idx] = m.sigma.eval(g.r(g.node_i(idx)), 0) * du.d_r.values[idx];

    ScalarField2D lap_v = effective_dimension_laplacian(m, v, CutPolicy::one_sided_interior);
    ScalarField2D lap_u = effective_dimension_laplacian(m, u, CutPolicy::one_sided_interior);
    GradientFields dlap = discrete_gradient(lap_u, CutPolicy::one_sided_interior);

    double worst = 0.0;
    int used = 0;
    for (int idx : mask.nodes) {
        const double r = g.r(g.node_i(idx));
        const double lhs = lap_v.values[idx];
        const double rhs = m.sigma.eval(r, 0) * dlap.d_r.values[idx] +
                           2.0 * m.sigma.eval(r, 1) * lap_u.values[idx] +
                           (2.0 - m.n) * m.sigma.eval(r, 2) * du.d_r.values[idx];
        if (!std::isfinite(lhs) || !std::isfinite(rhs))
            continue;
        worst = std::max(worst, std::abs(lhs - rhs));
        ++used;
    }
    if (used == 0)
        throw insufficient_resolution_error("commutator_identity_residual: no interior nodes deep "
                                            "enough for both discrete sides");
    return worst;
}

namespace {

std::vector<QuadratureReport> assemble_intermediate(double s_du, double s_usig1, double s_sig2udu,
                                                    double s_hw_u2, double s_grad2, double s_u,
                                                    double s_u2, int n, double k, double h) {
    std::vector<QuadratureReport> out;
    {
        QuadratureReport r;
        r.name = "eq6";
        r.lhs = s_du;
        r.rhs = -n * s_usig1;
        r.residual = std::abs(r.lhs - r.rhs);
        r.grid_spacing = h;
        out.push_back(r);
    }
    {
        QuadratureReport r;
        r.name = "eq7";
        r.lhs = s_sig2udu;
        r.rhs = -0.5 * s_hw_u2;
        r.residual = std::abs(r.lhs - r.rhs);
        r.grid_spacing = h;
        out.push_back(r);
    }
    {
        QuadratureReport r;
        r.name = "eq17";
        r.lhs = s_grad2;
        r.rhs = s_u + n * k * s_u2 - s_sig2udu;
        r.residual = std::abs(r.lhs - r.rhs);
        r.grid_spacing = h;
        out.push_back(r);
    }
    return out;
}

} // namespace

std::vector<QuadratureReport> intermediate_identity_checks(const RadialProfile& u,
                                                           const WarpedManifold& m, double k,
                                                           double fiber_scale) {
    auto I = [&](const std::function<double(double, double, double)>& f) {
        return integrate_radial(u, m, f, fiber_scale);
    };
    const double s_du = I([&](double r, double, double du) { return m.sigma.eval(r, 0) * du; });
    const double s_usig1 = I([&](double r, double uu, double) { return m.sigma.eval(r, 1) * uu; });
    const double s_sig2udu =
        I([&](double r, double uu, double du) { return m.sigma.eval(r, 2) * uu * du; });
    const double s_hw_u2 = I([&](double r, double uu, double) { return hessian_weight(m, r) * uu * uu; });
    const double s_grad2 = I([&](double r, double, double du) { return m.sigma.eval(r, 1) * du * du; });
    const double s_u = s_usig1;
    const double s_u2 = I([&](double r, double uu, double) { return m.sigma.eval(r, 1) * uu * uu; });
    return assemble_intermediate(s_du, s_usig1, s_sig2udu, s_hw_u2, s_grad2, s_u, s_u2, m.n, k,
                                 u.spacing());
}

std::vector<QuadratureReport> intermediate_identity_checks(const WarpedManifold& m,
                                                           const ScalarField2D& u, double k,
                                                           double fiber_scale, int partitions) {
    const Grid2D& g = u.mask->grid;
    GradientFields du = discrete_gradient(u, CutPolicy::dirichlet_cut);
    ScalarField2D gn = gradient_norm(m, u, CutPolicy::dirichlet_cut);
    auto r_of = [&](int idx) { return g.r(g.node_i(idx)); };
    auto I = [&](const std::function<double(int)>& f) {
        return integrate_masked(m, *u.mask, f, partitions) * fiber_scale;
    };
    const double s_du = I([&](int idx) { return m.sigma.eval(r_of(idx), 0) * du.d_r.values[idx]; });
    const double s_usig1 = I([&](int idx) { return m.sigma.eval(r_of(idx), 1) * u.values[idx]; });
    const double s_sig2udu = I([&](int idx) {
        return m.sigma.eval(r_of(idx), 2) * u.values[idx] * du.d_r.values[idx];
    });
    const double s_hw_u2 =
        I([&](int idx) { return hessian_weight(m, r_of(idx)) * u.values[idx] * u.values[idx]; });
    const double s_grad2 = I([&](int idx) {
        return m.sigma.eval(r_of(idx), 1) * gn.values[idx] * gn.values[idx];
    });
    const double s_u2 =
        I([&](int idx) { return m.sigma.eval(r_of(idx), 1) * u.values[idx] * u.values[idx]; });
    return assemble_intermediate(s_du, s_usig1, s_sig2udu, s_hw_u2, s_grad2, s_usig1, s_u2, m.n, k,
                                 g.hr());
}

} // namespace overwarp
