#ifndef OVERWARP_SCENARIOS_HPP
#define OVERWARP_SCENARIOS_HPP

#include <memory>

#include "overwarp/field2d.hpp"

namespace overwarp {

/// Grid framing a geodesic ball of the given radius about (r0, *): the
/// r-extent is padded, the theta resolution matches sigma_max h_theta ~ h.
Grid2D frame_ball_grid(const WarpedManifold& m, double r0, double radius, double h);

/// Grid covering r in [r_lo, r_hi] with theta spacing matched to h.
Grid2D frame_grid(const WarpedManifold& m, double r_lo, double r_hi, double h);

std::shared_ptr<const DomainMask> ball_mask(const WarpedManifold& m, double r0, double theta0,
                                            double radius, double h, DistanceSource source);

/// Cartesian-overlay ellipse (x/a)^2 + (y/b)^2 < 1 centered at (x0, 0),
/// meaningful on flat polar charts.
std::shared_ptr<const DomainMask> ellipse_mask(const WarpedManifold& m, double a, double b, double x0,
                                               double h);

/// Symmetric band |r| < w on a cylinder chart.
std::shared_ptr<const DomainMask> band_mask_for(const WarpedManifold& m, double w, double h,
                                                int ntheta = 64);

} // namespace overwarp

#endif
