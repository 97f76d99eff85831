#ifndef OVERWARP_FIELD2D_HPP
#define OVERWARP_FIELD2D_HPP

#include <functional>
#include <memory>

#include "overwarp/geometry.hpp"
#include "overwarp/grid.hpp"

namespace overwarp {

/// How stencils treat edges crossing the domain boundary.
///   dirichlet_cut       : the field vanishes at the cut point (PDE solutions)
///   one_sided_interior  : fall back to one-sided interior stencils
///                         (analytic test fields with no boundary data)
enum class CutPolicy { dirichlet_cut, one_sided_interior };

/// Discrete u_rr + (n-1)(sigma'/sigma) u_r + u_theta_theta / sigma^2.
/// Nodes whose stencil cannot be formed under `policy` get NaN.
ScalarField2D effective_dimension_laplacian(const WarpedManifold& m, const ScalarField2D& field,
                                            CutPolicy policy = CutPolicy::dirichlet_cut);

struct SolveOptions {
    double tol = 1e-10;    // relative residual target
    int max_sweeps = 400000;
    double omega = 0.0;    // 0 = choose from the mask extent
    int partitions = 1;    // <= 1: serial reference sweeps; > 1: OpenMP row blocks
    int check_every = 8;
};

struct SolveResult {
    ScalarField2D u;
    int sweeps = 0;
    double final_residual = 0.0;
    bool positive_interior = false;
    bool flagged_indefinite = false; // some interior value <= 0 (k > 0 resonance guard)
};

/// Second-order finite-difference solve of
///   u_rr + (n-1)(sigma'/sigma) u_r + u_tt/sigma^2 + n k u = -1,  u = 0 on the cut boundary,
/// by red-black SOR.  Bit-deterministic for any partition count: updates
/// within a color are independent and residual reductions run in fixed row
/// order.
SolveResult solve_dirichlet(const WarpedManifold& m, double k, std::shared_ptr<const DomainMask> mask,
                            const SolveOptions& opts = {});

struct GradientFields {
    ScalarField2D d_r;     // chart derivative u_r
    ScalarField2D d_theta; // chart derivative u_theta (not metric-scaled)
};

/// Cut-aware second-order first derivatives per inside node.
GradientFields discrete_gradient(const ScalarField2D& u, CutPolicy policy);

/// Metric norm sqrt(u_r^2 + u_theta^2 / sigma^2) per inside node.
ScalarField2D gradient_norm(const WarpedManifold& m, const ScalarField2D& u,
                            CutPolicy policy = CutPolicy::one_sided_interior);

/// |grad u| sampled at every boundary cut point, linearly extrapolated from
/// the interior.  Throws insufficient_resolution_error below 8 samples.
BoundaryGradientStats boundary_gradient_stats(const WarpedManifold& m, const ScalarField2D& u);

/// Fast-marching solution of (d_r)^2 + (d_theta)^2/sigma^2 = 1 with
/// d(center) = 0, over the whole grid (trivial all-inside mask).
/// First-order accurate.
ScalarField2D eikonal_distance(const WarpedManifold& m, double r0, double theta0, const Grid2D& grid);

/// Closed-form geodesic distance from (r0, theta0) for charts that are
/// space forms (sigma = r, sin/ sinh scaled models with rho = 1) or flat
/// cylinders (sigma constant).  Throws construction_error otherwise.
std::function<double(double, double)> closed_form_distance(const WarpedManifold& m, double r0,
                                                           double theta0);

enum class DistanceSource { eikonal, exact };

/// Sublevel set {d < radius} of the distance from (r0, theta0), with cut
/// fractions interpolated along edges.  Throws chart_overflow_error when
/// the ball touches the chart edge.
DomainMask geodesic_ball_mask(const WarpedManifold& m, double r0, double theta0, double radius,
                              const Grid2D& grid, DistanceSource source = DistanceSource::eikonal);

/// Integral of the cut-cell weights against the volume element
/// sigma^{n-1} dr dtheta.
double masked_volume(const WarpedManifold& m, const DomainMask& mask);

/// Cut-cell quadrature of a nodal integrand against sigma^{n-1} dr dtheta.
/// Partial row sums are combined in fixed row order, so the result is
/// independent of the partition count.
double integrate_masked(const WarpedManifold& m, const DomainMask& mask,
                        const std::function<double(int)>& integrand, int partitions = 1);

} // namespace overwarp

#endif
