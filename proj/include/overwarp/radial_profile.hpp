#ifndef OVERWARP_RADIAL_PROFILE_HPP
#define OVERWARP_RADIAL_PROFILE_HPP

#include <functional>
#include <vector>

namespace overwarp {

/// Sampled radial function u(r) with first and second derivatives on an
/// increasing grid.  Profiles built from closed forms keep their analytic
/// evaluators; off-node queries otherwise use cubic Hermite interpolation
/// of the stored arrays (O(h^4) for u and u', O(h^2) for u'').
struct RadialProfile {
    int n = 2;
    double k = 0.0;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    std::vector<double> d2u;
    double boundary_gradient_c = 0.0;

    std::function<double(double)> analytic_u;
    std::function<double(double)> analytic_du;
    std::function<double(double)> analytic_d2u;

    std::size_t size() const { return r.size(); }
    double r_max() const { return r.empty() ? 0.0 : r.back(); }
    double spacing() const;

    double value(double at) const;
    double deriv(double at) const;
    double second_deriv(double at) const;

    static RadialProfile from_functions(int n, double k, double r_lo, double r_hi, int samples,
                                        std::function<double(double)> u,
                                        std::function<double(double)> du,
                                        std::function<double(double)> d2u);

  private:
    std::size_t cell(double at) const;
};

} // namespace overwarp

#endif
