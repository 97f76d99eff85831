#ifndef OVERWARP_ERRORS_HPP
#define OVERWARP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace overwarp {

// Thrown when a requested point lies outside a warping function's interval
// or outside the chart covered by a grid.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// A construction parameter violates a stated constraint (the message names it).
struct construction_error : std::invalid_argument {
    explicit construction_error(const std::string& what) : std::invalid_argument(what) {}
};

// An operation's precondition does not hold for the supplied inputs.
struct precondition_error : std::invalid_argument {
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// A mask or geodesic ball reaches the edge of the (r, theta) chart.
struct chart_overflow_error : std::runtime_error {
    explicit chart_overflow_error(const std::string& what) : std::runtime_error(what) {}
};

// The shooting/bracketing stage of a boundary value solve failed.
struct no_solution_error : std::runtime_error {
    explicit no_solution_error(const std::string& what) : std::runtime_error(what) {}
};

// No connecting geodesic found within the angle sweep.
struct not_found_error : std::runtime_error {
    explicit not_found_error(const std::string& what) : std::runtime_error(what) {}
};

// Fewer boundary samples than needed for meaningful statistics.
struct insufficient_resolution_error : std::runtime_error {
    explicit insufficient_resolution_error(const std::string& what) : std::runtime_error(what) {}
};

// Metric recovery hit a vanishing radial derivative away from the pole.
struct degenerate_recovery_error : std::runtime_error {
    explicit degenerate_recovery_error(const std::string& what) : std::runtime_error(what) {}
};

// The iterative linear solver stalled or diverged.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace overwarp

#endif
