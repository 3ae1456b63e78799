#include "gelfand/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace gelfand {

namespace {

using Vec2 = std::array<double, 2>;

struct RadialRhs {
    int n;
    const Nonlinearity* g;
    Vec2 operator()(double r, const Vec2& y) const {
        return {y[1], -((n - 1) / r) * y[1] - g->eval(y[0])};
    }
};

// Dormand-Prince 5(4) tableau.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
// b - bhat (error weights, including the k7 stage).
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200,
                 E6 = 22.0 / 525, E7 = -1.0 / 40;

struct Attempt {
    Vec2 y1;
    double err;  // scaled error norm; accept when <= 1
};

Attempt dp5_attempt(const RadialRhs& f, double r, const Vec2& y, double h, double rel_tol,
                    double abs_tol) {
    Vec2 k1 = f(r, y);
    Vec2 k2 = f(r + C2 * h, {y[0] + h * A21 * k1[0], y[1] + h * A21 * k1[1]});
    Vec2 k3 = f(r + C3 * h, {y[0] + h * (A31 * k1[0] + A32 * k2[0]),
                             y[1] + h * (A31 * k1[1] + A32 * k2[1])});
    Vec2 k4 = f(r + C4 * h, {y[0] + h * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
                             y[1] + h * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1])});
    Vec2 k5 = f(r + C5 * h,
                {y[0] + h * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
                 y[1] + h * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1])});
    Vec2 k6 = f(r + h,
                {y[0] + h * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]),
                 y[1] + h * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1])});
    Vec2 y1 = {y[0] + h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0]),
               y[1] + h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1])};
    Vec2 k7 = f(r + h, y1);
    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
        double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                        E7 * k7[i]);
        double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err += (e / sc) * (e / sc);
    }
    return {y1, std::sqrt(0.5 * err)};
}

// One accepted adaptive step; h is updated in place. Evaluation failures of g
// (overshoot past its domain) shrink the step before giving up.
void dp5_advance(const RadialRhs& f, double& r, Vec2& y, double& h, double rel_tol,
                 double abs_tol) {
    for (int tries = 0; tries < 200; ++tries) {
        if (h < 1e-14 * std::max(1.0, std::abs(r)))
            throw ConvergenceError("radial integrator: step size underflow at r = " +
                                   format_double(r));
        bool eval_failed = false;
        Attempt a{};
        try {
            a = dp5_attempt(f, r, y, h, rel_tol, abs_tol);
        } catch (const EvalError&) {
            eval_failed = true;
        }
        if (eval_failed || !std::isfinite(a.err)) {
            h *= 0.25;
            continue;
        }
        if (a.err <= 1.0) {
            r += h;
            y = a.y1;
            double grow = (a.err <= 1e-30) ? 5.0 : 0.9 * std::pow(a.err, -0.2);
            h *= std::clamp(grow, 0.2, 5.0);
            return;
        }
        h *= std::clamp(0.9 * std::pow(a.err, -0.2), 0.1, 0.9);
    }
    throw ConvergenceError("radial integrator: repeated step rejection at r = " +
                           format_double(r));
}

// Integrates from (r, y) to exactly r_target; visit(r, y) runs after each
// accepted interior step (not at the landing point).
template <typename Visitor>
void integrate_to(const RadialRhs& f, double& r, Vec2& y, double& h, double r_target,
                  double rel_tol, double abs_tol, Visitor&& visit) {
    while (r < r_target * (1.0 - 1e-15)) {
        double h_step = std::min(h, r_target - r);
        bool capped = h_step < h;
        dp5_advance(f, r, y, h_step, rel_tol, abs_tol);
        if (r < r_target * (1.0 - 1e-15)) visit(r, y);
        // Keep the controller's momentum when the step was only target-capped.
        h = capped ? std::max(h, h_step) : h_step;
    }
    r = r_target;
}

struct NoVisit {
    void operator()(double, const Vec2&) const {}
};

struct SeriesStart {
    double r0;
    double c2;  // u = m - c2 r^2 + c4 r^4
    double c4;
    double m;
    double value(double r) const { return m - c2 * r * r + c4 * r * r * r * r; }
    double slope(double r) const { return -2.0 * c2 * r + 4.0 * c4 * r * r * r; }
};

SeriesStart make_series(int n, const Nonlinearity& g, double m) {
    double gm = g.eval(m);
    double dgm = g.deriv(m);
    double c2 = gm / (2.0 * n);
    double c4 = gm * dgm / (8.0 * n * (n + 2.0));
    double r0 = 1e-4;
    if (std::abs(c4) > 0.0) {
        double cap = std::pow(1e-13 * std::max(1.0, m) / std::abs(c4), 0.25);
        r0 = std::min(r0, cap);
    }
    return {r0, c2, c4, m};
}

double hermite_value(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
    double h = x1 - x0;
    double t = (x - x0) / h;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * f1 +
           (t3 - t2) * h * d1;
}

double hermite_slope(double x0, double x1, double f0, double f1, double d0, double d1, double x) {
    double h = x1 - x0;
    double t = (x - x0) / h;
    double t2 = t * t;
    return ((6 * t2 - 6 * t) / h) * f0 + (3 * t2 - 4 * t + 1) * d0 + ((-6 * t2 + 6 * t) / h) * f1 +
           (3 * t2 - 2 * t) * d1;
}

}  // namespace

double RadialSolution::value_at(double r) const {
    double x = std::clamp(r, r_nodes.front(), r_nodes.back());
    auto it = std::upper_bound(r_nodes.begin(), r_nodes.end(), x);
    std::size_t i = (it == r_nodes.begin()) ? 0 : static_cast<std::size_t>(it - r_nodes.begin()) - 1;
    i = std::min(i, r_nodes.size() - 2);
    return hermite_value(r_nodes[i], r_nodes[i + 1], u[i], u[i + 1], du[i], du[i + 1], x);
}

double RadialSolution::slope_at(double r) const {
    double x = std::clamp(r, r_nodes.front(), r_nodes.back());
    auto it = std::upper_bound(r_nodes.begin(), r_nodes.end(), x);
    std::size_t i = (it == r_nodes.begin()) ? 0 : static_cast<std::size_t>(it - r_nodes.begin()) - 1;
    i = std::min(i, r_nodes.size() - 2);
    return hermite_slope(r_nodes[i], r_nodes[i + 1], u[i], u[i + 1], du[i], du[i + 1], x);
}

double RadialSolution::level_radius(double s) const {
    if (!(s > 0.0) || !(s < center()))
        throw std::out_of_range("level_radius: level " + format_double(s) +
                                " outside (0, " + format_double(center()) + ")");
    // u is strictly decreasing: find the segment with u[i] >= s >= u[i+1].
    std::size_t lo = 0, hi = u.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (u[mid] >= s)
            lo = mid;
        else
            hi = mid;
    }
    double a = r_nodes[lo], b = r_nodes[hi];
    for (int it = 0; it < 200 && (b - a) > 1e-15 * std::max(1.0, b); ++it) {
        double c = 0.5 * (a + b);
        double v = hermite_value(r_nodes[lo], r_nodes[hi], u[lo], u[hi], du[lo], du[hi], c);
        if (v >= s)
            a = c;
        else
            b = c;
    }
    return 0.5 * (a + b);
}

double RadialSolution::l1_norm() const {
    double omega = unit_sphere_area(n);
    // 3-point Gauss per segment on u(r) r^{n-1}.
    static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < r_nodes.size(); ++i) {
        double a = r_nodes[i], b = r_nodes[i + 1];
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int k = 0; k < 3; ++k) {
            double x = mid + half * gx[k];
            double val = hermite_value(a, b, u[i], u[i + 1], du[i], du[i + 1], x);
            total += gw[k] * half * val * std::pow(x, n - 1);
        }
    }
    return omega * total;
}

double radial_residual(const RadialSolution& sol, const Nonlinearity& g) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < sol.r_nodes.size(); ++i) {
        double hm = sol.r_nodes[i] - sol.r_nodes[i - 1];
        double hp = sol.r_nodes[i + 1] - sol.r_nodes[i];
        // 3-point nonuniform first derivative of du -> u''.
        double upp = -hp / (hm * (hm + hp)) * sol.du[i - 1] +
                     (hp - hm) / (hm * hp) * sol.du[i] +
                     hm / (hp * (hm + hp)) * sol.du[i + 1];
        double res = upp + (sol.n - 1) / sol.r_nodes[i] * sol.du[i] +
                     sol.lambda * g.eval(sol.u[i]);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

std::pair<double, RadialSolution> solve_shooting(int n, const Nonlinearity& g, double m,
                                                 const ShootingControl& ctrl) {
    if (n < 2) throw std::invalid_argument("solve_shooting: dimension must be >= 2");
    if (!(m > 0.0)) throw std::invalid_argument("solve_shooting: center value must be > 0");
    for (double s : {0.0, 0.5 * m, m})
        if (!(g.eval(s) > 0.0))
            throw std::invalid_argument("solve_shooting: g must be positive on [0, m]");

    RadialRhs rhs{n, &g};
    SeriesStart series = make_series(n, g, m);

    // Pass 1: march outward to the first sign change of v.
    double r = series.r0;
    Vec2 y = {series.value(r), series.slope(r)};
    double h = series.r0;
    double ra = r, rb = 0.0;
    Vec2 ya = y;
    bool bracketed = false;
    while (r < ctrl.r_max) {
        double r_prev = r;
        Vec2 y_prev = y;
        double h_cap = std::min(h, ctrl.r_max - r);
        dp5_advance(rhs, r, y, h_cap, ctrl.rel_tol, ctrl.abs_tol);
        h = h_cap;
        if (y[0] <= 0.0) {
            ra = r_prev;
            ya = y_prev;
            rb = r;
            bracketed = true;
            break;
        }
    }
    if (!bracketed)
        throw NoSolutionError("solve_shooting: no zero of the profile before r_max = " +
                              format_double(ctrl.r_max) + " (n = " + std::to_string(n) +
                              ", m = " + format_double(m) + ")");

    // First-zero refinement: bisection, each probe re-integrated from (ra, ya).
    auto reintegrate = [&](double from_r, const Vec2& from_y, double to_r) {
        double rr = from_r;
        Vec2 yy = from_y;
        double hh = std::max((to_r - from_r) / 4.0, 1e-13 * to_r);
        integrate_to(rhs, rr, yy, hh, to_r, ctrl.rel_tol, ctrl.abs_tol, NoVisit{});
        return yy;
    };
    while (rb - ra > ctrl.root_tol * std::max(1.0, rb)) {
        double rm = 0.5 * (ra + rb);
        Vec2 ym = reintegrate(ra, ya, rm);
        if (ym[0] > 0.0) {
            ra = rm;
            ya = ym;
        } else {
            rb = rm;
        }
    }
    double R = rb;
    double lambda = R * R;

    // Pass 2: re-run the profile, landing exactly on the uniform output grid.
    int N = std::max(ctrl.uniform_nodes, 16);
    std::vector<double> rho{0.0}, uu{m}, dd{0.0};
    auto push_node = [&](double rho_i, double ui, double di) {
        if (rho_i <= rho.back() + 1e-14) return;
        if (rho_i >= 1.0 - 1e-14) return;  // the terminal node is pushed explicitly
        rho.push_back(rho_i);
        uu.push_back(ui);
        dd.push_back(di);
    };

    struct Stop {
        double r;
        double rho;
    };
    std::vector<Stop> stops;
    stops.reserve(static_cast<std::size_t>(N) + 1);
    for (int i = 1; i <= N; ++i) stops.push_back({R * i / N, static_cast<double>(i) / N});
    if (series.r0 < R * (1.0 - 1e-12)) stops.push_back({series.r0, series.r0 / R});
    std::sort(stops.begin(), stops.end(), [](const Stop& a, const Stop& b) { return a.r < b.r; });

    double rr = series.r0;
    Vec2 yy = {series.value(rr), series.slope(rr)};
    double hh = series.r0;
    for (const Stop& st : stops) {
        if (st.r <= series.r0 * (1.0 + 1e-12)) {
            push_node(st.rho, series.value(st.r), R * series.slope(st.r));
            continue;
        }
        integrate_to(rhs, rr, yy, hh, st.r, ctrl.rel_tol, ctrl.abs_tol,
                     [&](double rmid, const Vec2& ymid) {
                         push_node(rmid / R, ymid[0], R * ymid[1]);
                     });
        if (st.rho < 1.0 - 1e-14)
            push_node(st.rho, yy[0], R * yy[1]);
        else {
            rho.push_back(1.0);
            uu.push_back(yy[0]);
            dd.push_back(R * yy[1]);
        }
    }

    RadialSolution sol;
    sol.n = n;
    sol.lambda = lambda;
    sol.r_nodes = std::move(rho);
    sol.u = std::move(uu);
    sol.du = std::move(dd);
    return {lambda, std::move(sol)};
}

double linearized_eigenvalue(const RadialSolution& sol, const Nonlinearity& g,
                             const EigenControl& ctrl) {
    const std::vector<double>* nodes = &sol.r_nodes;
    std::vector<double> override_nodes;
    if (!ctrl.nodes.empty()) {
        override_nodes = ctrl.nodes;
        if (override_nodes.front() != 0.0 || std::abs(override_nodes.back() - 1.0) > 1e-12)
            throw std::invalid_argument("linearized_eigenvalue: override grid must span [0, 1]");
        nodes = &override_nodes;
    }
    std::size_t M = nodes->size();
    if (M < 8) throw std::invalid_argument("linearized_eigenvalue: grid too small");
    std::size_t N = M - 1;  // unknowns at nodes 0..N-1; Dirichlet at node N

    const int n = sol.n;
    auto face_area = [&](double r) { return std::pow(r, n - 1); };
    auto cell_vol = [&](double r_lo, double r_hi) {
        return (std::pow(r_hi, n) - std::pow(r_lo, n)) / n;
    };

    std::vector<double> d(N), e(N - 1), w(N);
    for (std::size_t i = 0; i < N; ++i) {
        double r_i = (*nodes)[i];
        double r_right = (*nodes)[i + 1];
        double mid_r = 0.5 * (r_i + r_right);
        double mid_l = (i == 0) ? 0.0 : 0.5 * ((*nodes)[i - 1] + r_i);
        w[i] = cell_vol(mid_l, mid_r);
        double u_i = ctrl.nodes.empty() ? sol.u[i] : sol.value_at(r_i);
        double flux_r = face_area(mid_r) / (r_right - r_i);
        double flux_l = (i == 0) ? 0.0 : face_area(mid_l) / (r_i - (*nodes)[i - 1]);
        d[i] = (flux_l + flux_r) / w[i] - sol.lambda * g.deriv(u_i);
    }
    for (std::size_t i = 0; i + 1 < N; ++i) {
        double mid = 0.5 * ((*nodes)[i] + (*nodes)[i + 1]);
        double flux = face_area(mid) / ((*nodes)[i + 1] - (*nodes)[i]);
        e[i] = -flux / std::sqrt(w[i] * w[i + 1]);
    }

    // Number of eigenvalues below x (Sturm count via LDL^T inertia).
    auto count_below = [&](double x) {
        int cnt = 0;
        double p = d[0] - x;
        if (std::abs(p) < 1e-200) p = -1e-200;
        if (p < 0) ++cnt;
        for (std::size_t i = 1; i < N; ++i) {
            p = (d[i] - x) - e[i - 1] * e[i - 1] / p;
            if (std::abs(p) < 1e-200) p = -1e-200;
            if (p < 0) ++cnt;
        }
        return cnt;
    };

    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < N; ++i) {
        double radius = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < N ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - radius);
        hi = std::max(hi, d[i] + radius);
    }
    // Bisect the Gershgorin interval down to a tight bracket around lambda_1.
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (count_below(mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }

    // Shifted inverse power iteration with the certified shift just below
    // lambda_1; Rayleigh quotients are the convergence monitor.
    double sigma = lo - std::max({1e-8, hi - lo, 1e-10 * std::abs(lo)});
    std::vector<double> x(N, 1.0), z(N), dp(N);
    auto tri_solve = [&](std::vector<double>& out, const std::vector<double>& b) {
        // LU (Thomas) on (T - sigma I), T symmetric tridiagonal (d, e).
        dp[0] = d[0] - sigma;
        out[0] = b[0];
        for (std::size_t i = 1; i < N; ++i) {
            dp[i] = (d[i] - sigma) - e[i - 1] * e[i - 1] / dp[i - 1];
            out[i] = b[i] - e[i - 1] / dp[i - 1] * out[i - 1];
        }
        out[N - 1] /= dp[N - 1];
        for (std::size_t i = N - 1; i-- > 0;) out[i] = (out[i] - e[i] * out[i + 1]) / dp[i];
    };
    auto rayleigh = [&](const std::vector<double>& v) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double tv = d[i] * v[i];
            if (i > 0) tv += e[i - 1] * v[i - 1];
            if (i + 1 < N) tv += e[i] * v[i + 1];
            num += v[i] * tv;
            den += v[i] * v[i];
        }
        return num / den;
    };

    double prev = rayleigh(x);
    for (int it = 0; it < ctrl.max_iter; ++it) {
        tri_solve(z, x);
        double norm = 0.0;
        for (double v : z) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw ConvergenceError("linearized_eigenvalue: inverse iteration broke down");
        for (std::size_t i = 0; i < N; ++i) x[i] = z[i] / norm;
        double q = rayleigh(x);
        if (std::abs(q - prev) < ctrl.rayleigh_tol) return q;
        prev = q;
    }
    throw ConvergenceError("linearized_eigenvalue: no Rayleigh convergence after " +
                           std::to_string(ctrl.max_iter) +
                           " iterations; last quotient = " + format_double(prev));
}

Branch trace_branch(int n, const Nonlinearity& g, const std::vector<double>& m_grid,
                    const BranchControl& ctrl) {
    if (m_grid.empty()) throw std::invalid_argument("trace_branch: empty m_grid");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (!(m_grid[i] > 0.0))
            throw std::invalid_argument("trace_branch: m_grid must be positive");
        if (i > 0 && !(m_grid[i] > m_grid[i - 1]))
            throw std::invalid_argument("trace_branch: m_grid must be strictly increasing");
    }

    std::vector<std::optional<BranchPoint>> slots(m_grid.size());
    std::vector<std::string> errors(m_grid.size());
    parallel_for(m_grid.size(), ctrl.threads, [&](std::size_t i) {
        try {
            auto [lambda, sol] = solve_shooting(n, g, m_grid[i], ctrl.shooting);
            double l1 = sol.l1_norm();
            double lam1 = linearized_eigenvalue(sol, g, ctrl.eigen);
            slots[i] = BranchPoint{m_grid[i], lambda, sol.sup_norm(), lam1, l1};
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    });

    Branch b;
    b.n = n;
    b.g_id = g.id();
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (slots[i])
            b.points.push_back(*slots[i]);
        else
            b.gaps.push_back({m_grid[i], errors[i]});
    }
    return b;
}

ExtremalEstimate extremal_parameter(const Branch& b) {
    if (b.points.size() < 3)
        throw std::invalid_argument("extremal_parameter: need >= 3 branch points");
    std::size_t imax = 0;
    for (std::size_t i = 1; i < b.points.size(); ++i)
        if (b.points[i].lambda > b.points[imax].lambda) imax = i;
    if (imax == 0 || imax + 1 == b.points.size())
        throw BracketError("extremal_parameter: max lambda at the m-grid endpoint m = " +
                           format_double(b.points[imax].m) + "; widen the grid");
    double m0 = b.points[imax - 1].m, m1 = b.points[imax].m, m2 = b.points[imax + 1].m;
    double l0 = b.points[imax - 1].lambda, l1 = b.points[imax].lambda, l2 = b.points[imax + 1].lambda;
    double d1 = m1 - m0, d2 = m1 - m2;
    double num = d1 * d1 * (l1 - l2) - d2 * d2 * (l1 - l0);
    double den = d1 * (l1 - l2) - d2 * (l1 - l0);
    double m_star = (den == 0.0) ? m1 : m1 - 0.5 * num / den;
    // Lagrange quadratic through the three bracketing points, evaluated at m*.
    auto lag = [&](double x) {
        return l0 * (x - m1) * (x - m2) / ((m0 - m1) * (m0 - m2)) +
               l1 * (x - m0) * (x - m2) / ((m1 - m0) * (m1 - m2)) +
               l2 * (x - m0) * (x - m1) / ((m2 - m0) * (m2 - m1));
    };
    return {lag(m_star), m_star, m0, m2};
}

std::size_t first_turning_index(const Branch& b) {
    for (std::size_t i = 1; i < b.points.size(); ++i) {
        double prev = b.points[i - 1].lambda;
        if (b.points[i].lambda < prev * (1.0 - 1e-12)) return i - 1;
    }
    return branch_npos;
}

RadialLevelQuantities radial_level_quantities(const RadialSolution& sol, double s) {
    if (!(s > 0.0) || !(s < sol.center()))
        throw std::out_of_range("radial_level_quantities: level outside (0, u(0))");
    double r_s = sol.level_radius(s);
    double slope = std::abs(sol.slope_at(r_s));
    double omega = unit_sphere_area(sol.n);
    RadialLevelQuantities q;
    q.level_radius = r_s;
    q.slope = slope;
    q.area = omega * std::pow(r_s, sol.n - 1);
    q.second_form_norm = std::sqrt(static_cast<double>(sol.n - 1)) / r_s;
    q.h2 = omega * std::pow(r_s, sol.n - 1) * slope * slope * slope;
    q.h1 = (sol.n - 1) * omega * std::pow(r_s, sol.n - 3) * slope;
    return q;
}

double radial_quartic_energy(const RadialSolution& sol, double r_lo, double r_hi) {
    r_lo = std::clamp(r_lo, 0.0, 1.0);
    r_hi = std::clamp(r_hi, 0.0, 1.0);
    if (r_hi <= r_lo) return 0.0;
    double omega = unit_sphere_area(sol.n);
    static const double gx[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double total = 0.0;
    const auto& rn = sol.r_nodes;
    for (std::size_t i = 0; i + 1 < rn.size(); ++i) {
        double a = std::max(rn[i], r_lo);
        double b = std::min(rn[i + 1], r_hi);
        if (b <= a) continue;
        double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (int k = 0; k < 3; ++k) {
            double x = mid + half * gx[k];
            double sl = hermite_slope(rn[i], rn[i + 1], sol.u[i], sol.u[i + 1], sol.du[i],
                                      sol.du[i + 1], x);
            total += gw[k] * half * std::pow(sl, 4) * std::pow(x, sol.n - 1);
        }
    }
    return omega * total;
}

}  // namespace gelfand
