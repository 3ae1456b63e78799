#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gelfand {

// Evaluation outside a nonlinearity's domain, saturation, or non-finite results.
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shooting or Newton failed to produce a solution.
struct NoSolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested bracket (extremal parameter, root) does not exist in the data.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative method exhausted its budget without meeting its tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unreadable, corrupt, or checksum-mismatched artifact.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Too few regular levels (or samples) to evaluate a quantity.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A filter left no nodes to evaluate on.
struct DegenerateFieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data contradicts a structural assumption (e.g. h2 = 0 at a regular level).
struct ContradictionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration; message lists every offending field.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg, std::vector<std::string> fields = {})
        : std::runtime_error(msg), bad_fields(std::move(fields)) {}
    std::vector<std::string> bad_fields;
};

// Surface measure of the unit sphere S^{n-1} in R^n, exact via the half-integer
// gamma recursion (no lgamma roundoff).
double unit_sphere_area(int n);

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

// Piecewise cubic Hermite interpolant on a strictly increasing grid.
// Slopes are supplied by the caller (exact derivatives or PCHIP estimates).
class HermiteSpline {
  public:
    HermiteSpline() = default;
    HermiteSpline(std::vector<double> x, std::vector<double> f, std::vector<double> df);

    double value(double x) const;
    double slope(double x) const;
    // Exact integral of the piecewise cubic over [a, b] within the grid span.
    double integral(double a, double b) const;
    const std::vector<double>& nodes() const { return x_; }

  private:
    std::size_t locate(double x) const;
    std::vector<double> x_, f_, df_;
};

// Monotonicity-preserving slopes (Fritsch-Carlson) for tabulated data.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& f);

// Composite trapezoid over sampled data; x strictly increasing.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

// Runs fn(i) for i in [0, count). threads <= 1 runs inline. Work is split into
// contiguous blocks so results are index-addressed and order-independent.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

// FNV-1a 64-bit over a byte buffer, rendered as 16 hex digits.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& s);

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace gelfand
