#include "overwarp/radial_profile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "overwarp/errors.hpp"

namespace overwarp {

double RadialProfile::spacing() const {
    if (r.size() < 2)
        throw precondition_error("RadialProfile: need at least 2 samples");
    return r[1] - r[0];
}

std::size_t RadialProfile::cell(double at) const {
    if (r.empty() || at < r.front() - 1e-12 || at > r.back() + 1e-12)
        throw domain_error("RadialProfile: query outside sampled range");
    auto it = std::upper_bound(r.begin(), r.end(), at);
    std::size_t i = (it == r.begin()) ? 0 : static_cast<std::size_t>(it - r.begin() - 1);
    return std::min(i, r.size() - 2);
}

namespace {

double hermite(double s, double h, double f0, double g0, double f1, double g1) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * g0 +
           (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * h * g1;
}

} // namespace

double RadialProfile::value(double at) const {
    if (analytic_u)
        return analytic_u(at);
    const std::size_t i = cell(at);
    const double h = r[i + 1] - r[i];
    const double s = (at - r[i]) / h;
    if (s == 0.0)
        return u[i];
    return hermite(s, h, u[i], du[i], u[i + 1], du[i + 1]);
}

double RadialProfile::deriv(double at) const {
    if (analytic_du)
        return analytic_du(at);
    const std::size_t i = cell(at);
    const double h = r[i + 1] - r[i];
    const double s = (at - r[i]) / h;
    if (s == 0.0)
        return du[i];
    return hermite(s, h, du[i], d2u[i], du[i + 1], d2u[i + 1]);
}

double RadialProfile::second_deriv(double at) const {
    if (analytic_d2u)
        return analytic_d2u(at);
    std::size_t i = cell(at);
    // cubic Lagrange through four second-derivative samples
    const std::size_t n = r.size();
    std::size_t i0 = (i == 0) ? 0 : i - 1;
    i0 = std::min(i0, n - 4);
    const double h = r[i0 + 1] - r[i0];
    const double s = (at - r[i0 + 1]) / h;
    const double y0 = d2u[i0], y1 = d2u[i0 + 1], y2 = d2u[i0 + 2], y3 = d2u[i0 + 3];
    const double l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return y0 * l0 + y1 * l1 + y2 * l2 + y3 * l3;
}

RadialProfile RadialProfile::from_functions(int n, double k, double r_lo, double r_hi, int samples,
                                            std::function<double(double)> u,
                                            std::function<double(double)> du,
                                            std::function<double(double)> d2u) {
    if (samples < 4 || !(r_hi > r_lo))
        throw precondition_error("RadialProfile::from_functions: need samples >= 4 and r_hi > r_lo");
    RadialProfile p;
    p.n = n;
    p.k = k;
    p.r.resize(samples);
    p.u.resize(samples);
    p.du.resize(samples);
    p.d2u.resize(samples);
    const double h = (r_hi - r_lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double ri = (i == samples - 1) ? r_hi : r_lo + i * h;
        p.r[i] = ri;
        p.u[i] = u(ri);
        p.du[i] = du(ri);
        p.d2u[i] = d2u(ri);
    }
    p.boundary_gradient_c = std::abs(du(r_hi));
    p.analytic_u = std::move(u);
    p.analytic_du = std::move(du);
    p.analytic_d2u = std::move(d2u);
    return p;
}

} // namespace overwarp
