#ifndef OVERWARP_GEODESICS_HPP
#define OVERWARP_GEODESICS_HPP

#include <vector>

#include "overwarp/field2d.hpp"
#include "overwarp/geometry.hpp"

namespace overwarp {

/// Unit-speed geodesic of dr^2 + sigma^2 dtheta^2 sampled along arclength.
/// Integrates r'' = sigma sigma' theta'^2, theta'' = -2 (sigma'/sigma) r' theta'.
struct GeodesicPath {
    std::vector<double> t, r, theta;
    double clairaut_constant = 0.0; // sigma^2 theta' at launch
    double speed = 1.0;
    double max_speed_drift = 0.0;    // max |sqrt(r'^2 + sigma^2 theta'^2) - 1|
    double max_clairaut_drift = 0.0; // max |sigma^2 theta' - clairaut_constant|
    bool exited_chart = false;

    double end_r() const { return r.back(); }
    double end_theta() const { return theta.back(); }
    double length() const { return t.back(); }
};

/// Launch angle alpha measured in the orthonormal frame (d_r, sigma d_theta):
/// alpha = 0 is radially outward, alpha = pi/2 tangential.
GeodesicPath geodesic_shoot(const WarpedManifold& m, double r0, double theta0, double alpha,
                            double length, double step);

struct ShootingOptions {
    int sweep_angles = 256;
    double step = 1e-3;
    double sweep_step = 4e-3;
    int refine_iters = 40;
    int partitions = 1; // parallel angle sweep; reduction in index order
};

/// Intrinsic distance by shooting: angle sweep plus golden-section
/// refinement until the shot passes within tol of the target (chart-local
/// metric norm).  On model manifolds the two-leg radial route through the
/// pole competes as an extra candidate.  Throws not_found_error when no
/// candidate hits within tol.
double distance_by_shooting(const WarpedManifold& m, double pr, double pt, double qr, double qt,
                            double tol, const ShootingOptions& opts = {});

struct StarOptions {
    double step = 1e-3;
    double grid_h = 0.0; // 0: radius / 64
    DistanceSource source = DistanceSource::eikonal;
    int partitions = 1;
};

/// Shoots n_rays unit-speed geodesics of the given length from the center
/// and returns min over rays and samples of (radius - d(center, sample)),
/// with d from the eikonal field (or the closed form when available).
double star_shapedness_check(const WarpedManifold& m, double r0, double theta0, double radius,
                             int n_rays, const StarOptions& opts = {});

} // namespace overwarp

#endif
