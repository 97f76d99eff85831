#ifndef OVERWARP_ANALYSIS_HPP
#define OVERWARP_ANALYSIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "overwarp/field2d.hpp"
#include "overwarp/geometry.hpp"
#include "overwarp/radial_profile.hpp"

namespace overwarp {

/// Two sides of an integral identity with their quadrature residual.
struct QuadratureReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; // |lhs - rhs|
    double grid_spacing = 0.0;
    std::optional<double> convergence_order_estimate;
};

/// Richardson order estimate from residuals at spacing h and h/2.
double order_estimate(double res_coarse, double res_fine);

/// Area of the unit (n-1)-sphere; the fiber normalization for radial
/// quadratures (2 pi for n = 2, 4 pi for n = 3, ...).
double unit_fiber_area(int n);

/// P(u) = |grad u|^2 + (2/n) u + k u^2, sampled on the profile grid.
std::vector<double> p_function(const RadialProfile& u, const WarpedManifold& m, double k);

/// Same on a 2D field; the gradient policy must match how the field was
/// produced (dirichlet_cut for PDE solutions).
ScalarField2D p_function(const WarpedManifold& m, const ScalarField2D& u, double k,
                         CutPolicy policy = CutPolicy::dirichlet_cut);

struct SubharmonicityReport {
    double min_lap = 0.0;
    double max_abs_lap = 0.0;
    int evaluated_nodes = 0;
};

/// Discrete Laplace-Beltrami of P over the interior; min certifies
/// subharmonicity, max |.| detects the equality case.
SubharmonicityReport p_subharmonicity_check(const RadialProfile& u, const WarpedManifold& m, double k);
SubharmonicityReport p_subharmonicity_check(const WarpedManifold& m, const ScalarField2D& u, double k,
                                            CutPolicy policy = CutPolicy::dirichlet_cut);

/// (n+2)/n Int sigma' u  vs  c^2 Int sigma'
///   + (n-2)/(2n) Int (sigma'' sigma^{n-1})'/sigma^{n-1} u^2 - 2k Int sigma' u^2.
QuadratureReport pohozaev_sides(const RadialProfile& u, const WarpedManifold& m, double k, double c,
                                double fiber_scale = 1.0);
QuadratureReport pohozaev_sides(const WarpedManifold& m, const ScalarField2D& u, double k, double c,
                                double fiber_scale = 1.0, int partitions = 1);

/// Int (k sigma' + (sigma'' sigma^{n-1})'/(n sigma^{n-1})) u^2.
double compatibility_integral(const RadialProfile& u, const WarpedManifold& m, double k);
double compatibility_integral(const WarpedManifold& m, const ScalarField2D& u, double k,
                              int partitions = 1);

/// Max |Ric(grad u, grad u) - (n-1) k |grad u|^2| with the Ricci quadratic
/// form composed from the eigenvalue weighting
///   u_r^2 radial + (|grad u|^2 - u_r^2) tangential.
/// Only meaningful where the eigenvalues are exact, i.e. the
/// constant-curvature families with an Einstein fiber; throws
/// precondition_error otherwise.
double ricci_identity_residual(const RadialProfile& u, const WarpedManifold& m, double k);
double ricci_identity_residual(const WarpedManifold& m, const ScalarField2D& u, double k);

/// Max interior residual of
///   Lap(sigma d_r u) = sigma d_r Lap u + 2 sigma' Lap u + (2-n) sigma'' d_r u
/// with every operator discretized; for a smooth test field the residual
/// is O(h^2).
double commutator_identity_residual(const WarpedManifold& m, const ScalarField2D& u);

/// eq6:  Int sigma d_r u            = -n Int u sigma'
/// eq7:  Int sigma'' u d_r u        = -1/2 Int (sigma'' sigma^{n-1})'/sigma^{n-1} u^2
/// eq17: Int sigma' |grad u|^2      = Int sigma' u + nk Int sigma' u^2 - Int sigma'' u d_r u
std::vector<QuadratureReport> intermediate_identity_checks(const RadialProfile& u,
                                                           const WarpedManifold& m, double k,
                                                           double fiber_scale = 1.0);
std::vector<QuadratureReport> intermediate_identity_checks(const WarpedManifold& m,
                                                           const ScalarField2D& u, double k,
                                                           double fiber_scale = 1.0,
                                                           int partitions = 1);

/// Simpson quadrature of f(r, u, u') sigma^{n-1} against the radial grid,
/// times the unit fiber area (scaled by fiber_scale).
double integrate_radial(const RadialProfile& u, const WarpedManifold& m,
                        const std::function<double(double, double, double)>& f,
                        double fiber_scale = 1.0);

} // namespace overwarp

#endif
