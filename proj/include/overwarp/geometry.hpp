#ifndef OVERWARP_GEOMETRY_HPP
#define OVERWARP_GEOMETRY_HPP

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "overwarp/errors.hpp"

namespace overwarp {

/// Radial coordinate interval of a warped product chart.  `closed_at_lo`
/// marks model manifolds, whose pole sits at r = 0.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool closed_at_lo = false;

    double length() const { return hi - lo; }
    bool contains(double r) const;
    void validate() const;
};

enum class FiberKind { round_sphere, circle, flat_torus, abstract_bound };

/// Fiber of the warped product, represented only through its dimension and
/// the constant lower bound rho with Ric_N >= (n-2) rho g_N.
struct Fiber {
    int dim = 1;
    double ricci_lower_bound = 0.0;
    FiberKind kind = FiberKind::abstract_bound;

    void validate() const;
};

namespace family {

struct Linear {
    double c1, c2; // c1 + c2 r
};
struct Exponential {
    double c1, c2, k; // c1 e^{sr} + c2 e^{-sr}, s = sqrt(-k), k < 0
};
struct Trigonometric {
    double c1, c2, k; // c1 cos(sr) + c2 sin(sr), s = sqrt(k), k > 0
};
struct ScaledModel {
    double rho, k; // sqrt(rho) * { sinh(sr)/s | r | sin(sr)/s }
};
struct Glued {
    double a, b, eps; // r on (a,b], r(1 - e^{-1/(r-b)}) on (b, b+eps)
};
struct Constant {
    double c;
};
struct Tabulated {
    double r0 = 0.0;   // first sample abscissa
    double h = 0.0;    // uniform sample spacing
    std::vector<double> values;
};

using Any = std::variant<Linear, Exponential, Trigonometric, ScaledModel, Glued, Constant, Tabulated>;

} // namespace family

/// Warping function sigma with analytic derivatives up to third order for
/// the closed-form families.  Tabulated data uses cubic Lagrange
/// interpolation on a uniform grid: order 0 is O(h^4), order 1 O(h^3),
/// order 2 O(h^2); the third derivative falls back to a centered
/// difference of sigma'' and is flagged as reduced accuracy.
class WarpingFunction {
  public:
    WarpingFunction(family::Any fam, Interval domain);

    static WarpingFunction linear(double c1, double c2, Interval domain);
    static WarpingFunction exponential(double c1, double c2, double k, Interval domain);
    static WarpingFunction trigonometric(double c1, double c2, double k, Interval domain);
    static WarpingFunction scaled_model(double rho, double k, Interval domain);
    static WarpingFunction glued(double a, double b, double eps);
    static WarpingFunction constant(double c, Interval domain);
    static WarpingFunction tabulated(double r0, double h, std::vector<double> values, Interval domain);

    /// sigma and derivatives; order in {0,1,2,3}.  Throws domain_error for
    /// r outside the interval.
    double eval(double r, int order) const;

    const Interval& domain() const { return domain_; }
    const family::Any& fam() const { return family_; }
    std::string family_name() const;

    /// For constant-curvature families (sigma'' = -k sigma): that k.
    std::optional<double> natural_curvature() const;
    /// Exact value of sigma'^2 + k_nat sigma^2, constant along the family.
    std::optional<double> first_integral() const;
    /// True when eval(r, 3) uses a finite difference of sigma''.
    bool third_derivative_reduced_accuracy() const;

    /// Samples sigma over the interval and throws construction_error if it
    /// is not strictly positive.
    void check_positive(int n_samples = 512) const;

  private:
    family::Any family_;
    Interval domain_;
    double eval_unchecked(double r, int order) const;
};

/// Warped product manifold I x_sigma N with Ric_M >= (n-1) k g asserted.
struct WarpedManifold {
    int n = 2;
    WarpingFunction sigma;
    Fiber fiber;
    double k = 0.0;

    WarpedManifold(int n_, WarpingFunction sigma_, Fiber fiber_, double k_);

    bool is_model() const { return sigma.domain().closed_at_lo; }
};

/// sigma(r), sigma'(r) or sigma''(r); exact for analytic families.
double sigma_eval(const WarpingFunction& w, double r, int order);

struct RicciEigenvalues {
    double radial;           // -(n-1) sigma''/sigma
    double tangential_lower; // ((n-2)rho - sigma sigma'' - (n-2) sigma'^2)/sigma^2
};

/// Eigenvalue data of Ric_M at radius r, g-normalized.  The tangential
/// value is a lower bound under Ric_N >= (n-2) rho g_N.  For the
/// constant-curvature families this routine evaluates through the exact
/// first integral sigma'^2 + k sigma^2 so that Einstein cases come out to
/// machine precision even near sigma -> 0.
RicciEigenvalues ricci_eigenvalue_bounds(const WarpedManifold& m, double r);

/// min over sampled radii of min(radial, tangential_lower) - (n-1)k.
/// A nonnegative value certifies Ric_M >= (n-1) k g on the sample set.
double check_ricci_bound(const WarpedManifold& m, double k, int n_samples);

/// k sigma' + (sigma''' sigma + (n-1) sigma'' sigma')/(n sigma).
/// Vanishes identically for the constant-curvature warping families.
double serrin_coefficient(const WarpedManifold& m, double k, double r);

struct RadialProfile; // see radial_profile.hpp

/// u''(r) + (n-1)(sigma'/sigma) u'(r); at the pole of a model manifold the
/// limit n u''(0).
double laplacian_radial(const WarpedManifold& m, const RadialProfile& u, double r);

struct HessianComponents {
    double rr;         // u''
    double tangential; // u' sigma'/sigma
};

/// g-normalized Hessian eigenvalues of a radial function.
HessianComponents radial_hessian_components(const WarpedManifold& m, const RadialProfile& u, double r);

} // namespace overwarp

#endif
