#pragma once

#include <vector>

#include "gelfand/planar.hpp"
#include "gelfand/radial.hpp"

namespace gelfand {

// One closed polyline of {u = s} with per-vertex fields sampled from the grid.
// The vertex list is closed: front() == back().
struct LevelComponent {
    std::vector<double> x, y;
    std::vector<double> grad_norm;     // |grad u|
    std::vector<double> curvature;     // signed; positive where the superlevel set is convex
    std::vector<double> dt_sqrt_grad;  // d/dl of |grad u|^{1/2} along the curve
    double length() const;
    double total_turning() const;  // integral of curvature; +-2pi on simple loops
};

struct LevelCurve {
    double s = 0.0;
    std::vector<LevelComponent> components;  // ordered by descending length
    double total_length() const;
};

struct LevelProfile {
    double s = 0.0;
    double length = 0.0;
    double h1 = 0.0;  // integral of 4 |d/dl sqrt|grad u||^2 + kappa^2 |grad u|
    double h2 = 0.0;  // integral of |grad u|^3
    double V = 0.0;   // |{u > s}|
    double min_grad = 0.0;
    // min_grad above regularity_fraction times a gradient scale: max |grad u|
    // for planar fields, the mean slope (center value / radius) for radial ones.
    bool regular = false;
};

inline constexpr double regularity_fraction = 0.05;

// pre: 0 < s < max u. Marching squares with linear interpolation along edges;
// the saddle ambiguity connects the side the cell-center average lies on.
LevelCurve extract_level(const ScalarField2D& u, double s);

LevelProfile level_quantities(const ScalarField2D& u, double s);

// |{u > s}| by per-cell clipping, linear along edges.
double superlevel_area(const ScalarField2D& u, double s);

// B_t = (1/t^2) * integral over {u < t} of |grad u|^4. pre: 0 < t <= max u.
double sublevel_energy(const ScalarField2D& u, double t);

// Uniform levels on [0.01 T, 0.99 T], T = max u; ordered by s.
std::vector<LevelProfile> profile_family(const ScalarField2D& u, int n_levels = 64,
                                         int threads = 1);

struct CoareaResult {
    double lhs = 0.0;                // integral of h2 over s, closed out to [0, T]
    double rhs = 0.0;                // integral of |grad u|^4 over the domain
    double gap = 0.0;                // |lhs - rhs| / rhs
    double excluded_fraction = 0.0;  // non-regular levels dropped from the trapezoid
};

// pre: n_levels >= 16; fewer than 4 regular levels -> InsufficientDataError.
CoareaResult coarea_check(const ScalarField2D& u, int n_levels);

// Radial counterparts on the closed-form sphere levels {r = r_s}.
LevelProfile radial_level_profile(const RadialSolution& sol, double s);
std::vector<LevelProfile> radial_profile_family(const RadialSolution& sol, int n_levels = 64);
double radial_sublevel_energy(const RadialSolution& sol, double t);
CoareaResult radial_coarea_check(const RadialSolution& sol, int n_levels);

}  // namespace gelfand
