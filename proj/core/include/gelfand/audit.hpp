#pragma once

#include <string>
#include <vector>

#include "gelfand/levelgeom.hpp"
#include "gelfand/nonlinearity.hpp"
#include "gelfand/planar.hpp"
#include "gelfand/radial.hpp"

namespace gelfand {

// One measured inequality: lhs <= rhs up to the audit tolerance, plus the
// empirical constant where the estimate has one.
struct AuditRecord {
    std::string check_id;
    std::string solution;
    double param = 0.0;  // the distinguishing parameter: t, rho, k, or level s
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool holds = false;
    double constant = 0.0;           // empirical constant (0 when not applicable)
    bool vacuous = false;            // rhs identically zero; nothing to measure
    double excluded_fraction = 0.0;  // non-regular levels dropped from s-integrals
};

// slack = rhs - lhs; holds iff slack >= -1e-8 * max(|lhs|, |rhs|, 1).
AuditRecord make_record(std::string check_id, std::string solution, double param, double lhs,
                        double rhs, double constant = 0.0);

// Piecewise-linear test-function profile phi(s) on [0, T]; phi(0) = 0. The
// derivative is the exact slope of the stored linear pieces, so quadrature on
// the level grid and the construction of phi share one discretization.
struct PhiFunction {
    enum class Kind { RampThenOne, PhiK };
    Kind kind = Kind::RampThenOne;
    double t = 0.0;
    double T = 0.0;  // last breakpoint
    int k = 0;       // clamp constant for PhiK
    std::vector<double> s_grid;  // strictly increasing, starts at 0
    std::vector<double> values;

    double value(double s) const;       // linear interpolation, linear extension beyond T
    double derivative(double s) const;  // piecewise-constant slope
    double lipschitz() const;           // max |slope|
};

// phi = s/t on [0, t], 1 afterwards.
PhiFunction make_ramp(double t, double T);

// phi_k: s/t on [0, t], then exp((1/sqrt(2)) * integral of sqrt(g_k)) with
// g_k = min{k, h1/h2} interpolated over the regular levels above t.
// pre: k >= 1, 0 < t < top regular level. h2 = 0 at a regular level ->
// ContradictionError.
PhiFunction build_phik(const std::vector<LevelProfile>& profiles, double t, int k);

// lhs = integral of h1 phi^2, rhs = integral of h2 phi'^2, both over [0, T]
// through the regular levels (trapezoid, ends closed by linear extension).
// Fewer than 4 regular levels -> InsufficientDataError.
AuditRecord check_stability_inequality(const std::vector<LevelProfile>& profiles,
                                       const PhiFunction& phi, const std::string& solution_id);

// lhs = integral over [t, T] of h1 phi^2, rhs = 2 * b_t. pre: phi.kind == PhiK.
AuditRecord check_chain_bound(const std::vector<LevelProfile>& profiles, const PhiFunction& phi,
                              double b_t, const std::string& solution_id);

// n = 4 overload: per regular level lhs = h2^{1/3}, rhs = h1; the record holds
// the extremal level and constant = max lhs/rhs.
AuditRecord check_michael_simon(const std::vector<LevelProfile>& profiles, int n,
                                const std::string& solution_id);
// n = 2 overload: per closed component lhs = 1, rhs = total |curvature|;
// constant = max over components of 1/rhs.
AuditRecord check_michael_simon(const LevelCurve& curve, int n, const std::string& solution_id);

// Per t: lhs = max u, rhs = t + (1/t) |Omega|^{(4-n)/(2n)} W(t) with
// W(t) = (integral over {u < t} of |grad u|^4)^{1/2}; constant
// C_emp = (max u - t) t / (|Omega|^{(4-n)/(2n)} W(t)). The returned family is
// ordered by t and ends with a copy of the best record under
// check_id "main_estimate_min".
std::vector<AuditRecord> check_main_estimate(const RadialSolution& sol,
                                             const std::vector<double>& t_grid,
                                             const std::string& solution_id);
std::vector<AuditRecord> check_main_estimate(const ScalarField2D& u,
                                             const std::vector<double>& t_grid,
                                             const std::string& solution_id);

// lhs = sup of u on the boundary strip {delta < rho}, rhs = L1 norm of u;
// constant gamma = rhs/lhs. pre: convex domain, 0 < rho < inradius.
AuditRecord check_boundary_bound(const ScalarField2D& u, double rho,
                                 const std::string& solution_id);
AuditRecord check_boundary_bound(const RadialSolution& sol, double rho,
                                 const std::string& solution_id);

// lhs = min over nodes with delta >= h of u/delta, rhs = integral of
// lambda f(u) delta; constant c = lhs/rhs. f identically 0 -> vacuous record.
AuditRecord check_lower_bound(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                              const std::string& solution_id);
AuditRecord check_lower_bound(const RadialSolution& sol, const Nonlinearity& f, double lambda,
                              const std::string& solution_id);

}  // namespace gelfand
