#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gelfand/common.hpp"
#include "gelfand/nonlinearity.hpp"

namespace gelfand {

// Radial profile of -\Delta u = \lambda g(u) on the unit ball in R^n:
// u(1) = 0, u'(0) = 0, u > 0 and strictly decreasing on (0, 1).
struct RadialSolution {
    int n = 2;
    std::vector<double> r_nodes;  // increasing grid on [0, 1]
    std::vector<double> u;
    std::vector<double> du;
    double lambda = 0.0;

    double center() const { return u.empty() ? 0.0 : u.front(); }
    double sup_norm() const { return center(); }

    // Cubic Hermite interpolation through (u, du).
    double value_at(double r) const;
    double slope_at(double r) const;

    // Monotone inversion of u; s must lie in (0, u(0)).
    double level_radius(double s) const;

    // \int_{B_1} u dx by per-segment Gauss quadrature on the Hermite profile.
    double l1_norm() const;
};

// Max-norm residual of u'' + ((n-1)/r) u' + lambda g(u) on interior nodes,
// with u'' from 3-point differencing of the stored du.
double radial_residual(const RadialSolution& sol, const Nonlinearity& g);

struct ShootingControl {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double r_max = 50.0;      // no zero before this radius -> NoSolutionError
    double root_tol = 1e-10;  // bisection width for the first zero
    int uniform_nodes = 4096; // output intervals on [0, 1]
};

// Integrates v'' + ((n-1)/r) v' + g(v) = 0, v(0) = m, v'(0) = 0 to its first
// zero R, then rescales to the unit ball: lambda = R^2, u(r) = v(R r).
// Output nodes are the uniform grid plus any finer accepted steps (stiff
// center values add nodes where the integrator needed them).
std::pair<double, RadialSolution> solve_shooting(int n, const Nonlinearity& g, double m,
                                                 const ShootingControl& ctrl = {});

struct EigenControl {
    int max_iter = 100;
    double rayleigh_tol = 1e-9;
    // Optional grid override; empty uses the solution's own nodes (the default
    // solve_shooting output is the uniform 4096-interval grid).
    std::vector<double> nodes;
};

// Smallest eigenvalue of -phi'' - ((n-1)/r) phi' - lambda g'(u) phi with
// phi'(0) = 0, phi(1) = 0: symmetric finite-volume discretization, Sturm
// bisection for a certified shift, then shifted inverse power iteration until
// successive Rayleigh quotients differ by less than rayleigh_tol.
double linearized_eigenvalue(const RadialSolution& sol, const Nonlinearity& g,
                             const EigenControl& ctrl = {});

struct BranchPoint {
    double m;
    double lambda;
    double sup_norm;
    double lambda1;
    double l1_norm;
};

struct BranchGap {
    double m;
    std::string reason;
};

// Solution diagram parameterized by the center value m = u(0); lambda(m) is
// single-valued, so turning points appear as interior maxima of lambda(m).
struct Branch {
    int n = 2;
    std::string g_id;
    std::vector<BranchPoint> points;  // ordered by m
    std::vector<BranchGap> gaps;      // failed m values with reasons
};

struct BranchControl {
    ShootingControl shooting;
    EigenControl eigen;
    int threads = 1;
};

Branch trace_branch(int n, const Nonlinearity& g, const std::vector<double>& m_grid,
                    const BranchControl& ctrl = {});

struct ExtremalEstimate {
    double lambda_star;
    double m_at_max;
    double m_lo;  // bracketing interval around m_at_max
    double m_hi;
};

// Max of lambda over the branch refined by parabolic interpolation through the
// three bracketing points. The max at an endpoint of the m-grid means the
// bracket was not captured: BracketError (widen the grid).
ExtremalEstimate extremal_parameter(const Branch& b);

// Index of the first interior maximum of lambda(m), or npos when the branch is
// monotone (no turning point seen).
std::size_t first_turning_index(const Branch& b);
inline constexpr std::size_t branch_npos = std::numeric_limits<std::size_t>::max();

struct RadialLevelQuantities {
    double h1;
    double h2;
    double area;              // |Gamma_s| = omega_{n-1} r_s^{n-1}
    double second_form_norm;  // |A| = sqrt(n-1)/r_s
    double level_radius;
    double slope;             // |u'(r_s)|
};

// Closed forms on the sphere Gamma_s = {r = r_s}: the tangential gradient of
// |grad u| vanishes and |A|^2 = (n-1)/r_s^2, so
//   h2 = omega r^{n-1} |u'|^3,  h1 = (n-1) omega r^{n-3} |u'|.
RadialLevelQuantities radial_level_quantities(const RadialSolution& sol, double s);

// omega_{n-1} * \int_{r_lo}^{r_hi} |u'|^4 r^{n-1} dr (per-segment Gauss on the
// Hermite profile); the |grad u|^4 mass of the shell.
double radial_quartic_energy(const RadialSolution& sol, double r_lo, double r_hi);

}  // namespace gelfand
