#ifndef OVERWARP_REPORT_HPP
#define OVERWARP_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "overwarp/analysis.hpp"
#include "overwarp/geodesics.hpp"
#include "overwarp/grid.hpp"
#include "overwarp/radial_profile.hpp"

namespace overwarp {

/// One named check: an identity's two sides, the witness value, tolerance
/// and verdict.  `name` carries the identity tag (pre2, eq6, harm1, ...).
struct CheckRow {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double h = 0.0;
    std::optional<double> order_estimate;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

struct VerificationReport {
    std::string suite;
    std::string config_echo; // flags that produced the report, for reproducibility
    std::vector<CheckRow> rows;

    bool all_pass() const;
    void add(CheckRow row);
    CheckRow& add_quadrature(const QuadratureReport& q, double tolerance, std::string note = {});

    /// Deterministic JSON text (fixed key order, shortest round-trip floats).
    std::string to_json() const;
};

/// Writes text to path atomically (temp file + rename).
void atomic_write(const std::string& path, const std::string& text);

std::string profile_to_csv(const RadialProfile& p);
std::string mask_to_csv(const DomainMask& m);
std::string field_to_csv(const ScalarField2D& f);
std::string path_to_csv(const GeodesicPath& p);

} // namespace overwarp

#endif
