#include "gelfand/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gelfand/common.hpp"

namespace gelfand {

AuditRecord make_record(std::string check_id, std::string solution, double param, double lhs,
                        double rhs, double constant) {
    AuditRecord r;
    r.check_id = std::move(check_id);
    r.solution = std::move(solution);
    r.param = param;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = rhs - lhs;
    r.holds = r.slack >= -1e-8 * std::max({std::abs(lhs), std::abs(rhs), 1.0});
    r.constant = constant;
    return r;
}

double PhiFunction::value(double s) const {
    if (s_grid.empty()) return 0.0;
    if (s <= s_grid.front()) return values.front();
    std::size_t n = s_grid.size();
    if (s >= s_grid[n - 1]) {
        if (n < 2) return values.back();
        double slope = (values[n - 1] - values[n - 2]) / (s_grid[n - 1] - s_grid[n - 2]);
        return values[n - 1] + slope * (s - s_grid[n - 1]);
    }
    auto it = std::upper_bound(s_grid.begin(), s_grid.end(), s);
    std::size_t j = static_cast<std::size_t>(it - s_grid.begin());
    double w = (s - s_grid[j - 1]) / (s_grid[j] - s_grid[j - 1]);
    return values[j - 1] + w * (values[j] - values[j - 1]);
}

double PhiFunction::derivative(double s) const {
    std::size_t n = s_grid.size();
    if (n < 2) return 0.0;
    std::size_t j;
    if (s <= s_grid.front())
        j = 1;
    else if (s >= s_grid[n - 1])
        j = n - 1;
    else
        j = static_cast<std::size_t>(std::upper_bound(s_grid.begin(), s_grid.end(), s) -
                                     s_grid.begin());
    return (values[j] - values[j - 1]) / (s_grid[j] - s_grid[j - 1]);
}

double PhiFunction::lipschitz() const {
    double m = 0;
    for (std::size_t j = 1; j < s_grid.size(); ++j)
        m = std::max(m, std::abs(values[j] - values[j - 1]) / (s_grid[j] - s_grid[j - 1]));
    return m;
}

PhiFunction make_ramp(double t, double T) {
    if (!(t > 0) || !(t < T)) throw std::invalid_argument("make_ramp: need 0 < t < T");
    PhiFunction phi;
    phi.kind = PhiFunction::Kind::RampThenOne;
    phi.t = t;
    phi.T = T;
    phi.s_grid = {0.0, t, T};
    phi.values = {0.0, 1.0, 1.0};
    return phi;
}

namespace {

// Regular levels of a profile family, with linear interpolation/extension of
// h1 and h2 (clamped at 0 outside the sampled band).
struct LevelTable {
    std::vector<double> s, h1, h2;
    double excluded = 0.0;

    static LevelTable from(const std::vector<LevelProfile>& profiles, std::size_t min_regular) {
        LevelTable t;
        for (const auto& p : profiles)
            if (p.regular) {
                t.s.push_back(p.s);
                t.h1.push_back(p.h1);
                t.h2.push_back(p.h2);
            }
        if (!profiles.empty())
            t.excluded = 1.0 - static_cast<double>(t.s.size()) / profiles.size();
        if (t.s.size() < min_regular)
            throw InsufficientDataError("audit: fewer regular levels than required");
        return t;
    }

    double interp(const std::vector<double>& f, double x) const {
        std::size_t n = s.size();
        std::size_t j;
        if (x <= s.front())
            j = 1;
        else if (x >= s[n - 1])
            j = n - 1;
        else
            j = static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), x) - s.begin());
        double w = (x - s[j - 1]) / (s[j] - s[j - 1]);
        return std::max(0.0, f[j - 1] + w * (f[j] - f[j - 1]));
    }
    double h1_at(double x) const { return interp(h1, x); }
    double h2_at(double x) const { return interp(h2, x); }

    // Trapezoid of node(x) with a piecewise-constant segment factor evaluated
    // at midpoints; breakpoints are a, b and the levels between them.
    template <class NodeFn, class SegFn>
    double seg_trapz(double a, double b, NodeFn node, SegFn seg) const {
        if (!(b > a)) return 0.0;
        std::vector<double> xs = {a};
        for (double x : s)
            if (x > a && x < b) xs.push_back(x);
        xs.push_back(b);
        double total = 0;
        for (std::size_t j = 1; j < xs.size(); ++j) {
            double mid = 0.5 * (xs[j - 1] + xs[j]);
            total += 0.5 * (node(xs[j - 1]) + node(xs[j])) * seg(mid) * (xs[j] - xs[j - 1]);
        }
        return total;
    }
};

}  // namespace

PhiFunction build_phik(const std::vector<LevelProfile>& profiles, double t, int k) {
    if (profiles.empty()) throw std::invalid_argument("build_phik: empty profile family");
    if (k < 1) throw std::invalid_argument("build_phik: k >= 1 required");
    LevelTable tab = LevelTable::from(profiles, 2);
    for (std::size_t j = 0; j < tab.s.size(); ++j)
        if (!(tab.h2[j] > 0))
            throw ContradictionError("build_phik: h2 = 0 at a regular level");
    double top = tab.s.back();
    if (!(t > 0) || !(t < top))
        throw std::invalid_argument("build_phik: t must lie below the top regular level");

    std::vector<double> g(tab.s.size());
    for (std::size_t j = 0; j < tab.s.size(); ++j)
        g[j] = std::min(static_cast<double>(k), tab.h1[j] / tab.h2[j]);
    auto g_at = [&](double x) {
        std::size_t n = tab.s.size();
        std::size_t j;
        if (x <= tab.s.front())
            j = 1;
        else if (x >= tab.s[n - 1])
            j = n - 1;
        else
            j = static_cast<std::size_t>(
                std::upper_bound(tab.s.begin(), tab.s.end(), x) - tab.s.begin());
        double w = (x - tab.s[j - 1]) / (tab.s[j] - tab.s[j - 1]);
        return std::max(0.0, g[j - 1] + w * (g[j] - g[j - 1]));
    };

    PhiFunction phi;
    phi.kind = PhiFunction::Kind::PhiK;
    phi.t = t;
    phi.k = k;
    phi.s_grid = {0.0, t};
    phi.values = {0.0, 1.0};
    double acc = 0.0;  // (1/sqrt 2) * integral of sqrt(g_k) from t
    double prev = t;
    for (std::size_t j = 0; j < tab.s.size(); ++j) {
        if (tab.s[j] <= t) continue;
        acc += 0.5 * (std::sqrt(g_at(prev)) + std::sqrt(g_at(tab.s[j]))) * (tab.s[j] - prev) /
               std::sqrt(2.0);
        phi.s_grid.push_back(tab.s[j]);
        phi.values.push_back(std::exp(acc));
        prev = tab.s[j];
    }
    phi.T = phi.s_grid.back();
    return phi;
}

AuditRecord check_stability_inequality(const std::vector<LevelProfile>& profiles,
                                       const PhiFunction& phi, const std::string& solution_id) {
    LevelTable tab = LevelTable::from(profiles, 4);
    double top = std::max(phi.T, tab.s.back());
    auto h1phi2 = [&](double x) {
        double v = phi.value(x);
        return tab.h1_at(x) * v * v;
    };
    auto h2 = [&](double x) { return tab.h2_at(x); };
    auto dphi2 = [&](double x) {
        double d = phi.derivative(x);
        return d * d;
    };
    auto one = [](double) { return 1.0; };
    double lhs = tab.seg_trapz(0.0, phi.t, h1phi2, one) + tab.seg_trapz(phi.t, top, h1phi2, one);
    double rhs = tab.seg_trapz(0.0, phi.t, h2, dphi2) + tab.seg_trapz(phi.t, top, h2, dphi2);
    AuditRecord r = make_record("stability", solution_id, phi.t, lhs, rhs);
    r.excluded_fraction = tab.excluded;
    return r;
}

AuditRecord check_chain_bound(const std::vector<LevelProfile>& profiles, const PhiFunction& phi,
                              double b_t, const std::string& solution_id) {
    if (phi.kind != PhiFunction::Kind::PhiK)
        throw std::invalid_argument("check_chain_bound: phi_k family required");
    LevelTable tab = LevelTable::from(profiles, 4);
    auto h1phi2 = [&](double x) {
        double v = phi.value(x);
        return tab.h1_at(x) * v * v;
    };
    auto one = [](double) { return 1.0; };
    double lhs = tab.seg_trapz(phi.t, tab.s.back(), h1phi2, one);
    AuditRecord r = make_record("chain_bound", solution_id, static_cast<double>(phi.k), lhs,
                                2.0 * b_t);
    r.excluded_fraction = tab.excluded;
    return r;
}

AuditRecord check_michael_simon(const std::vector<LevelProfile>& profiles, int n,
                                const std::string& solution_id) {
    if (n != 4)
        throw std::invalid_argument("check_michael_simon: profile overload requires n = 4");
    LevelTable tab = LevelTable::from(profiles, 1);
    double best = -1, lhs = 0, rhs = 0, s_at = 0;
    for (std::size_t j = 0; j < tab.s.size(); ++j) {
        if (!(tab.h1[j] > 0)) continue;
        double l = std::cbrt(tab.h2[j]);
        double ratio = l / tab.h1[j];
        if (ratio > best) {
            best = ratio;
            lhs = l;
            rhs = tab.h1[j];
            s_at = tab.s[j];
        }
    }
    if (best < 0) throw InsufficientDataError("check_michael_simon: no usable levels");
    AuditRecord r = make_record("michael_simon", solution_id, s_at, lhs, rhs, best);
    r.excluded_fraction = tab.excluded;
    return r;
}

AuditRecord check_michael_simon(const LevelCurve& curve, int n, const std::string& solution_id) {
    if (n != 2) throw std::invalid_argument("check_michael_simon: curve overload requires n = 2");
    if (curve.components.empty())
        throw InsufficientDataError("check_michael_simon: level has no components");
    double min_tv = std::numeric_limits<double>::infinity();
    for (const auto& c : curve.components) {
        double tv = 0;
        for (std::size_t q = 0; q + 1 < c.x.size(); ++q) {
            double dl = std::hypot(c.x[q + 1] - c.x[q], c.y[q + 1] - c.y[q]);
            tv += 0.5 * (std::abs(c.curvature[q]) + std::abs(c.curvature[q + 1])) * dl;
        }
        min_tv = std::min(min_tv, tv);
    }
    return make_record("michael_simon", solution_id, curve.s, 1.0, min_tv,
                       min_tv > 0 ? 1.0 / min_tv : 0.0);
}

namespace {

std::vector<AuditRecord> main_estimate_family(double T, double omega_factor,
                                              const std::vector<double>& t_grid,
                                              const std::function<double(double)>& quartic_below,
                                              const std::string& solution_id) {
    if (t_grid.empty()) throw std::invalid_argument("check_main_estimate: empty t grid");
    std::vector<AuditRecord> out;
    std::size_t best = 0;
    for (double t : t_grid) {
        if (!(t > 0) || t > T * (1 + 1e-12))
            throw std::out_of_range("check_main_estimate: t outside (0, max u]");
        double W = std::sqrt(quartic_below(t));
        if (!(W > 0)) throw std::out_of_range("check_main_estimate: empty sublevel set");
        double rhs = t + omega_factor * W / t;
        double C = (T - t) * t / (omega_factor * W);
        out.push_back(make_record("main_estimate", solution_id, t, T, rhs, C));
        if (out.back().constant < out[best].constant) best = out.size() - 1;
    }
    AuditRecord min_rec = out[best];
    min_rec.check_id = "main_estimate_min";
    out.push_back(min_rec);
    return out;
}

}  // namespace

std::vector<AuditRecord> check_main_estimate(const RadialSolution& sol,
                                             const std::vector<double>& t_grid,
                                             const std::string& solution_id) {
    double T = sol.center();
    double expo = (4.0 - sol.n) / (2.0 * sol.n);
    double omega_factor = std::pow(unit_ball_volume(sol.n), expo);
    auto quartic_below = [&](double t) {
        double r_t = t >= T * (1.0 - 1e-14) ? 0.0 : sol.level_radius(t);
        return radial_quartic_energy(sol, r_t, 1.0);
    };
    return main_estimate_family(T, omega_factor, t_grid, quartic_below, solution_id);
}

std::vector<AuditRecord> check_main_estimate(const ScalarField2D& u,
                                             const std::vector<double>& t_grid,
                                             const std::string& solution_id) {
    double T = u.max_value();
    double omega_factor = std::sqrt(u.mask().area());  // (4-n)/(2n) = 1/2 for n = 2
    auto quartic_below = [&](double t) { return t * t * sublevel_energy(u, t); };
    return main_estimate_family(T, omega_factor, t_grid, quartic_below, solution_id);
}

AuditRecord check_boundary_bound(const ScalarField2D& u, double rho,
                                 const std::string& solution_id) {
    const DomainMask& m = u.mask();
    if (!m.convex()) throw std::invalid_argument("check_boundary_bound: convex domain required");
    if (!(rho > 0) || !(rho < m.inradius()))
        throw std::invalid_argument("check_boundary_bound: need 0 < rho < inradius");
    double sup = 0;
    for (std::size_t p : m.interior_list()) {
        int i = static_cast<int>(p % m.nx());
        int j = static_cast<int>(p / m.nx());
        if (m.delta(i, j) < rho) sup = std::max(sup, u.values()[p]);
    }
    double l1 = u.l1_norm();
    AuditRecord r = make_record("boundary_bound", solution_id, rho, sup, l1,
                                sup > 0 ? l1 / sup : 0.0);
    r.vacuous = !(sup > 0);
    return r;
}

AuditRecord check_boundary_bound(const RadialSolution& sol, double rho,
                                 const std::string& solution_id) {
    if (!(rho > 0) || !(rho < 1.0))
        throw std::invalid_argument("check_boundary_bound: need 0 < rho < inradius (= 1)");
    double sup = sol.value_at(1.0 - rho);  // u decreases radially
    double l1 = sol.l1_norm();
    AuditRecord r = make_record("boundary_bound", solution_id, rho, sup, l1,
                                sup > 0 ? l1 / sup : 0.0);
    r.vacuous = !(sup > 0);
    return r;
}

AuditRecord check_lower_bound(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                              const std::string& solution_id) {
    const DomainMask& m = u.mask();
    double lhs = std::numeric_limits<double>::infinity();
    double rhs = 0;
    for (std::size_t p : m.interior_list()) {
        int i = static_cast<int>(p % m.nx());
        int j = static_cast<int>(p / m.nx());
        double fv = f.eval(u.values()[p]);
        if (fv < 0) throw std::invalid_argument("check_lower_bound: f(u) must be nonnegative");
        double d = m.delta(i, j);
        rhs += m.node_weights()[p] * lambda * fv * d;
        if (d >= m.h()) lhs = std::min(lhs, u.values()[p] / d);
    }
    if (!std::isfinite(lhs))
        throw DegenerateFieldError("check_lower_bound: no nodes with delta >= h");
    if (!(rhs > 0)) {
        AuditRecord r = make_record("lower_bound", solution_id, lambda, 0.0, 0.0, 0.0);
        r.vacuous = true;
        return r;
    }
    return make_record("lower_bound", solution_id, lambda, lhs, rhs, lhs / rhs);
}

AuditRecord check_lower_bound(const RadialSolution& sol, const Nonlinearity& f, double lambda,
                              const std::string& solution_id) {
    double hmax = 0;
    for (std::size_t i = 1; i < sol.r_nodes.size(); ++i)
        hmax = std::max(hmax, sol.r_nodes[i] - sol.r_nodes[i - 1]);
    double omega = unit_sphere_area(sol.n);
    double lhs = std::numeric_limits<double>::infinity();
    std::vector<double> integrand(sol.r_nodes.size());
    for (std::size_t i = 0; i < sol.r_nodes.size(); ++i) {
        double r = sol.r_nodes[i];
        double fv = f.eval(sol.u[i]);
        if (fv < 0) throw std::invalid_argument("check_lower_bound: f(u) must be nonnegative");
        double d = 1.0 - r;
        integrand[i] = lambda * fv * d * std::pow(r, sol.n - 1) * omega;
        if (d >= hmax) lhs = std::min(lhs, sol.u[i] / d);
    }
    double rhs = trapezoid(sol.r_nodes, integrand);
    if (!(rhs > 0)) {
        AuditRecord r = make_record("lower_bound", solution_id, lambda, 0.0, 0.0, 0.0);
        r.vacuous = true;
        return r;
    }
    return make_record("lower_bound", solution_id, lambda, lhs, rhs, lhs / rhs);
}

}  // namespace gelfand
