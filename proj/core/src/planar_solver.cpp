#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gelfand/planar.hpp"

namespace gelfand {

namespace {

// Packed five-point operator for -lap_h on interior nodes, Shortley-Weller
// corrected at clipped stencils. Boundary values are 0, so clipped legs drop.
struct Operator5 {
    std::size_t m = 0;
    std::vector<int> nbr;      // 4 per row, -1 when the leg hits the boundary
    std::vector<double> coef;  // 4 per row, off-diagonal coefficients
    std::vector<double> diag;  // diagonal of -lap_h
    bool symmetric = true;

    void init(const DomainMask& mask) {
        const auto& list = mask.interior_list();
        m = list.size();
        symmetric = mask.uniform_stencil();
        nbr.assign(4 * m, -1);
        coef.assign(4 * m, 0.0);
        diag.assign(m, 0.0);
        std::vector<int> row(static_cast<std::size_t>(mask.nx()) * mask.ny(), -1);
        for (std::size_t k = 0; k < m; ++k) row[list[k]] = static_cast<int>(k);
        const double h2 = mask.h() * mask.h();
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t p = list[k];
            const int i = static_cast<int>(p % mask.nx());
            const int j = static_cast<int>(p / mask.nx());
            const double te = mask.theta(i, j, DirE), tw = mask.theta(i, j, DirW);
            const double tn = mask.theta(i, j, DirN), ts = mask.theta(i, j, DirS);
            diag[k] = (2.0 / h2) * (1.0 / (te * tw) + 1.0 / (tn * ts));
            const double th[4] = {te, tw, tn, ts};
            const double opp[4] = {tw, te, ts, tn};
            for (int d = 0; d < 4; ++d) {
                int q = row[mask.idx(i + di[d], j + dj[d])];
                if (q < 0) continue;  // boundary leg: Dirichlet zero
                nbr[4 * k + d] = q;
                coef[4 * k + d] = -(2.0 / h2) / (th[d] * (th[d] + opp[d]));
            }
        }
    }

    // y = (-lap_h + diag(shift)) x
    void apply(const std::vector<double>& shift, const std::vector<double>& x,
               std::vector<double>& y) const {
        for (std::size_t k = 0; k < m; ++k) {
            double s = (diag[k] + shift[k]) * x[k];
            for (int d = 0; d < 4; ++d) {
                int q = nbr[4 * k + d];
                if (q >= 0) s += coef[4 * k + d] * x[q];
            }
            y[k] = s;
        }
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

struct KrylovResult {
    bool converged = false;
    int iterations = 0;
};

// Jacobi-preconditioned conjugate gradient; valid for the symmetric case.
KrylovResult pcg(const Operator5& op, const std::vector<double>& shift,
                 const std::vector<double>& b, std::vector<double>& x, double tol, int maxit) {
    const std::size_t m = op.m;
    std::vector<double> r(m), z(m), p(m), q(m), prec(m);
    for (std::size_t k = 0; k < m; ++k) {
        double d = op.diag[k] + shift[k];
        prec[k] = std::abs(d) > 1e-300 ? 1.0 / d : 1.0;
    }
    op.apply(shift, x, q);
    for (std::size_t k = 0; k < m; ++k) r[k] = b[k] - q[k];
    const double target = tol * std::max(norm2(b), 1e-300);
    if (norm2(r) <= target) return {true, 0};
    for (std::size_t k = 0; k < m; ++k) z[k] = prec[k] * r[k];
    p = z;
    double rho = dot(r, z);
    for (int it = 1; it <= maxit; ++it) {
        op.apply(shift, p, q);
        double pq = dot(p, q);
        if (!(std::abs(pq) > 1e-300)) return {false, it};
        double alpha = rho / pq;
        for (std::size_t k = 0; k < m; ++k) {
            x[k] += alpha * p[k];
            r[k] -= alpha * q[k];
        }
        if (norm2(r) <= target) return {true, it};
        for (std::size_t k = 0; k < m; ++k) z[k] = prec[k] * r[k];
        double rho2 = dot(r, z);
        double beta = rho2 / rho;
        rho = rho2;
        for (std::size_t k = 0; k < m; ++k) p[k] = z[k] + beta * p[k];
    }
    return {false, maxit};
}

// Jacobi right-preconditioned BiCGStab for the nonsymmetric clipped case.
KrylovResult bicgstab(const Operator5& op, const std::vector<double>& shift,
                      const std::vector<double>& b, std::vector<double>& x, double tol,
                      int maxit) {
    const std::size_t m = op.m;
    std::vector<double> r(m), rhat(m), v(m, 0.0), p(m, 0.0), ph(m), s(m), sh(m), t(m), prec(m);
    for (std::size_t k = 0; k < m; ++k) {
        double d = op.diag[k] + shift[k];
        prec[k] = std::abs(d) > 1e-300 ? 1.0 / d : 1.0;
    }
    op.apply(shift, x, t);
    for (std::size_t k = 0; k < m; ++k) r[k] = b[k] - t[k];
    rhat = r;
    const double target = tol * std::max(norm2(b), 1e-300);
    if (norm2(r) <= target) return {true, 0};
    double rho = 1, alpha = 1, omega = 1;
    for (int it = 1; it <= maxit; ++it) {
        double rho2 = dot(rhat, r);
        if (!(std::abs(rho2) > 1e-300)) return {false, it};
        double beta = (rho2 / rho) * (alpha / omega);
        rho = rho2;
        for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
        for (std::size_t k = 0; k < m; ++k) ph[k] = prec[k] * p[k];
        op.apply(shift, ph, v);
        double rv = dot(rhat, v);
        if (!(std::abs(rv) > 1e-300)) return {false, it};
        alpha = rho / rv;
        for (std::size_t k = 0; k < m; ++k) s[k] = r[k] - alpha * v[k];
        if (norm2(s) <= target) {
            for (std::size_t k = 0; k < m; ++k) x[k] += alpha * ph[k];
            return {true, it};
        }
        for (std::size_t k = 0; k < m; ++k) sh[k] = prec[k] * s[k];
        op.apply(shift, sh, t);
        double tt = dot(t, t);
        if (!(tt > 1e-300)) return {false, it};
        omega = dot(t, s) / tt;
        for (std::size_t k = 0; k < m; ++k) {
            x[k] += alpha * ph[k] + omega * sh[k];
            r[k] = s[k] - omega * t[k];
        }
        if (norm2(r) <= target) return {true, it};
        if (!(std::abs(omega) > 1e-300)) return {false, it};
    }
    return {false, maxit};
}

KrylovResult linear_solve(const Operator5& op, const std::vector<double>& shift,
                          const std::vector<double>& b, std::vector<double>& x, double tol,
                          int maxit) {
    return op.symmetric ? pcg(op, shift, b, x, tol, maxit)
                        : bicgstab(op, shift, b, x, tol, maxit);
}

std::vector<double> pack(const DomainMask& mask, const std::vector<double>& full) {
    const auto& list = mask.interior_list();
    std::vector<double> out(list.size());
    for (std::size_t k = 0; k < list.size(); ++k) out[k] = full[list[k]];
    return out;
}

std::vector<double> unpack(const DomainMask& mask, const std::vector<double>& packed) {
    std::vector<double> full(static_cast<std::size_t>(mask.nx()) * mask.ny(), 0.0);
    const auto& list = mask.interior_list();
    for (std::size_t k = 0; k < list.size(); ++k) full[list[k]] = packed[k];
    return full;
}

int default_maxit(const DomainMask& mask, int requested) {
    if (requested > 0) return requested;
    return std::max(2000, 12 * std::max(mask.nx(), mask.ny()));
}

}  // namespace

ScalarField2D solve_newton(std::shared_ptr<const DomainMask> dom, const Nonlinearity& f,
                           double lambda, const ScalarField2D& init, const NewtonControl& ctrl) {
    if (!dom) throw std::invalid_argument("solve_newton: null mask");
    if (init.empty() || !init.mask().same_grid(*dom))
        throw std::invalid_argument("solve_newton: init does not live on the given mask");
    Operator5 op;
    op.init(*dom);
    const std::size_t m = op.m;
    const int lin_maxit = default_maxit(*dom, ctrl.lin_maxit);

    std::vector<double> u = pack(*dom, init.values());
    std::vector<double> res(m), rhs(m), delta(m, 0.0), shift(m);

    auto residual = [&](const std::vector<double>& x, std::vector<double>& out) {
        op.apply(std::vector<double>(m, 0.0), x, out);  // -lap_h x
        for (std::size_t k = 0; k < m; ++k) out[k] -= lambda * f.eval(x[k]);
        double mx = 0;
        for (double v : out) mx = std::max(mx, std::abs(v));
        return mx;
    };

    double res_norm;
    try {
        res_norm = residual(u, res);
    } catch (const EvalError& e) {
        throw NewtonDivergence(std::string("newton: initial iterate outside the nonlinearity domain: ") + e.what(),
                               init, std::numeric_limits<double>::infinity());
    }
    double prev_norm = res_norm;
    int growth_streak = 0;

    for (int it = 0; it < ctrl.max_iter; ++it) {
        if (res_norm < ctrl.res_tol)
            return ScalarField2D(dom, unpack(*dom, u));
        for (std::size_t k = 0; k < m; ++k) {
            shift[k] = -lambda * f.deriv(u[k]);
            rhs[k] = -res[k];
        }
        std::fill(delta.begin(), delta.end(), 0.0);
        KrylovResult lin = linear_solve(op, shift, rhs, delta, ctrl.lin_tol, lin_maxit);
        if (!lin.converged)
            throw ConvergenceError("newton: linear solve failed (singular or indefinite Jacobian)");
        for (std::size_t k = 0; k < m; ++k) u[k] += delta[k];
        try {
            res_norm = residual(u, res);
        } catch (const EvalError& e) {
            for (std::size_t k = 0; k < m; ++k) u[k] -= delta[k];
            throw NewtonDivergence(std::string("newton: iterate left the nonlinearity domain: ") + e.what(),
                                   ScalarField2D(dom, unpack(*dom, u)), prev_norm);
        }
        if (res_norm > prev_norm) {
            if (++growth_streak >= 5)
                throw NewtonDivergence("newton: residual grew over 5 consecutive steps",
                                       ScalarField2D(dom, unpack(*dom, u)), res_norm);
        } else {
            growth_streak = 0;
        }
        prev_norm = res_norm;
    }
    if (res_norm < ctrl.res_tol) return ScalarField2D(dom, unpack(*dom, u));
    throw NewtonDivergence("newton: iteration cap reached without convergence",
                           ScalarField2D(dom, unpack(*dom, u)), res_norm);
}

std::vector<PlanarBranchPoint> minimal_branch_2d(std::shared_ptr<const DomainMask> dom,
                                                 const Nonlinearity& g,
                                                 const std::vector<double>& lambda_grid,
                                                 const NewtonControl& ctrl) {
    if (lambda_grid.empty()) throw std::invalid_argument("branch: empty lambda grid");
    if (!(lambda_grid.front() > 0))
        throw std::invalid_argument("branch: lambda grid must start above 0");
    for (std::size_t k = 1; k < lambda_grid.size(); ++k)
        if (!(lambda_grid[k] > lambda_grid[k - 1]))
            throw std::invalid_argument("branch: lambda grid must be strictly increasing");

    std::vector<PlanarBranchPoint> points;
    ScalarField2D prev = ScalarField2D::zero(dom);
    double prev_lambda = 0.0;

    auto try_solve = [&](double lam, const ScalarField2D& from, ScalarField2D& out) {
        try {
            out = solve_newton(dom, g, lam, from, ctrl);
            return true;
        } catch (const NewtonDivergence&) {
            return false;
        } catch (const ConvergenceError&) {
            return false;
        }
    };

    for (double target : lambda_grid) {
        ScalarField2D sol;
        bool ok = try_solve(target, prev, sol);
        if (!ok) {
            // Bisect the lambda-step twice before declaring the end.
            ScalarField2D base = prev;
            double lam_base = prev_lambda;
            for (int attempt = 0; attempt < 2 && !ok; ++attempt) {
                double mid = 0.5 * (lam_base + target);
                ScalarField2D s_mid;
                if (!try_solve(mid, base, s_mid)) break;
                base = s_mid;
                lam_base = mid;
                ok = try_solve(target, base, sol);
            }
        }
        if (!ok) break;
        double lambda1 = linearized_eigenvalue_2d(sol, g, target, nullptr, ctrl);
        points.push_back({target, sol, lambda1});
        prev = sol;
        prev_lambda = target;
    }
    return points;
}

double linearized_eigenvalue_2d(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                                ScalarField2D* eigenfunction, const NewtonControl& ctrl) {
    if (u.empty()) throw std::invalid_argument("eigenvalue: empty field");
    const DomainMask& mask = u.mask();
    Operator5 op;
    op.init(mask);
    const std::size_t m = op.m;
    const int lin_maxit = default_maxit(mask, ctrl.lin_maxit);

    std::vector<double> pot(m);  // -lambda f'(u)
    const auto& list = mask.interior_list();
    double max_fp = 0;
    for (std::size_t k = 0; k < m; ++k) {
        double fp = f.deriv(u.values()[list[k]]);
        pot[k] = -lambda * fp;
        max_fp = std::max(max_fp, fp);
    }
    // Shift strictly below the whole spectrum keeps the solves definite.
    const double sigma = -lambda * max_fp - 1.0;
    std::vector<double> shifted(m);
    for (std::size_t k = 0; k < m; ++k) shifted[k] = pot[k] - sigma;

    std::vector<double> q(m, 1.0), z(m, 0.0), aq(m);
    double nq = norm2(q);
    for (auto& x : q) x /= nq;
    double rayleigh = 0, prev_rayleigh = std::numeric_limits<double>::infinity();

    for (int it = 0; it < 300; ++it) {
        KrylovResult lin = linear_solve(op, shifted, q, z, ctrl.lin_tol, lin_maxit);
        if (!lin.converged) throw ConvergenceError("eigenvalue: inner linear solve failed");
        double nz = norm2(z);
        if (!(nz > 0)) throw ConvergenceError("eigenvalue: inverse iteration collapsed");
        for (std::size_t k = 0; k < m; ++k) q[k] = z[k] / nz;
        op.apply(pot, q, aq);
        rayleigh = dot(q, aq);
        if (std::abs(rayleigh - prev_rayleigh) < 1e-9 * std::max(1.0, std::abs(rayleigh))) {
            if (eigenfunction) {
                double peak = 0;
                std::size_t arg = 0;
                for (std::size_t k = 0; k < m; ++k)
                    if (std::abs(q[k]) > peak) {
                        peak = std::abs(q[k]);
                        arg = k;
                    }
                double scale = q[arg] != 0 ? 1.0 / q[arg] : 1.0;
                std::vector<double> qn(q);
                for (auto& x : qn) x *= scale;
                *eigenfunction = ScalarField2D(u.mask_ptr(), unpack(mask, qn));
            }
            return rayleigh;
        }
        prev_rayleigh = rayleigh;
        // Warm start the next solve from the current direction.
        for (std::size_t k = 0; k < m; ++k) z[k] = q[k] / std::max(rayleigh - sigma, 1e-6);
    }
    throw ConvergenceError("eigenvalue: Rayleigh quotient did not settle");
}

}  // namespace gelfand
