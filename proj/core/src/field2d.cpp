#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gelfand/planar.hpp"

namespace gelfand {

ScalarField2D::ScalarField2D(std::shared_ptr<const DomainMask> mask, std::vector<double> values)
    : mask_(std::move(mask)), v_(std::move(values)) {
    if (!mask_) throw std::invalid_argument("field: null mask");
    const std::size_t n = static_cast<std::size_t>(mask_->nx()) * mask_->ny();
    if (v_.size() != n) throw std::invalid_argument("field: value count does not match the grid");
    // Zero trace is structural: exterior entries are forced to 0.
    for (std::size_t p = 0; p < n; ++p)
        if (!mask_->interior(static_cast<int>(p % mask_->nx()), static_cast<int>(p / mask_->nx())))
            v_[p] = 0.0;
    build_caches();
}

ScalarField2D ScalarField2D::zero(std::shared_ptr<const DomainMask> mask) {
    const std::size_t n = static_cast<std::size_t>(mask->nx()) * mask->ny();
    return ScalarField2D(std::move(mask), std::vector<double>(n, 0.0));
}

ScalarField2D ScalarField2D::from_function(std::shared_ptr<const DomainMask> mask,
                                           const std::function<double(double, double)>& fn) {
    const int nx = mask->nx(), ny = mask->ny();
    std::vector<double> vals(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (mask->interior(i, j)) vals[mask->idx(i, j)] = fn(mask->node_x(i), mask->node_y(j));
    return ScalarField2D(std::move(mask), std::move(vals));
}

void ScalarField2D::build_caches() {
    const DomainMask& m = *mask_;
    const int nx = m.nx(), ny = m.ny();
    const double h = m.h();
    const std::size_t n = v_.size();
    gx_.assign(n, 0.0);
    gy_.assign(n, 0.0);
    hxx_.assign(n, 0.0);
    hyy_.assign(n, 0.0);
    hxy_.assign(n, 0.0);

    auto at = [&](int i, int j) -> double {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return 0.0;
        return v_[m.idx(i, j)];
    };

    // Plain padded central differences everywhere (used for interpolation
    // near the mask edge); interior nodes are refined below.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t p = m.idx(i, j);
            gx_[p] = (at(i + 1, j) - at(i - 1, j)) / (2 * h);
            gy_[p] = (at(i, j + 1) - at(i, j - 1)) / (2 * h);
            hxx_[p] = (at(i + 1, j) - 2 * at(i, j) + at(i - 1, j)) / (h * h);
            hyy_[p] = (at(i, j + 1) - 2 * at(i, j) + at(i, j - 1)) / (h * h);
            hxy_[p] = (at(i + 1, j + 1) - at(i - 1, j + 1) - at(i + 1, j - 1) + at(i - 1, j - 1)) /
                      (4 * h * h);
        }
    }

    // Interior gradients: central differences on ghost-extended values. The
    // ghost value continues u linearly through its boundary zero at theta*h.
    auto ghosted = [&](int i, int j, int dir, double up) -> double {
        int in = i + (dir == DirE) - (dir == DirW);
        int jn = j + (dir == DirN) - (dir == DirS);
        if (m.interior(in, jn)) return v_[m.idx(in, jn)];
        double th = m.theta(i, j, dir);
        return up * (1.0 - 1.0 / th);
    };

    for (std::size_t p : m.interior_list()) {
        const int i = static_cast<int>(p % nx);
        const int j = static_cast<int>(p / nx);
        const double up = v_[p];
        gx_[p] = (ghosted(i, j, DirE, up) - ghosted(i, j, DirW, up)) / (2 * h);
        gy_[p] = (ghosted(i, j, DirN, up) - ghosted(i, j, DirS, up)) / (2 * h);

        // Second differences: central where possible, otherwise shifted
        // one-sided toward the interior, otherwise ghost-central.
        auto second = [&](int di, int dj) -> double {
            bool fwd = m.interior(i + di, j + dj), bwd = m.interior(i - di, j - dj);
            if (fwd && bwd)
                return (at(i + di, j + dj) - 2 * up + at(i - di, j - dj)) / (h * h);
            if (bwd && m.interior(i - 2 * di, j - 2 * dj))
                return (up - 2 * at(i - di, j - dj) + at(i - 2 * di, j - 2 * dj)) / (h * h);
            if (fwd && m.interior(i + 2 * di, j + 2 * dj))
                return (up - 2 * at(i + di, j + dj) + at(i + 2 * di, j + 2 * dj)) / (h * h);
            int dir_f = di ? DirE : DirN, dir_b = di ? DirW : DirS;
            return (ghosted(i, j, dir_f, up) - 2 * up + ghosted(i, j, dir_b, up)) / (h * h);
        };
        hxx_[p] = second(1, 0);
        hyy_[p] = second(0, 1);
    }

    // Mixed derivative as the x-difference of the cached gy, so clipped
    // stencils are handled once; one-sided at boundary-adjacent nodes.
    std::vector<double> hxy_new(hxy_);
    for (std::size_t p : m.interior_list()) {
        const int i = static_cast<int>(p % nx);
        const int j = static_cast<int>(p / nx);
        bool e = m.interior(i + 1, j), w = m.interior(i - 1, j);
        if (e && w && m.interior(i + 1, j + 1) && m.interior(i + 1, j - 1) &&
            m.interior(i - 1, j + 1) && m.interior(i - 1, j - 1))
            continue;  // padded cross formula already exact here
        if (e && w)
            hxy_new[p] = (gy_[m.idx(i + 1, j)] - gy_[m.idx(i - 1, j)]) / (2 * h);
        else if (e)
            hxy_new[p] = (gy_[m.idx(i + 1, j)] - gy_[p]) / h;
        else if (w)
            hxy_new[p] = (gy_[p] - gy_[m.idx(i - 1, j)]) / h;
        else
            hxy_new[p] = 0.0;
    }
    hxy_ = std::move(hxy_new);
}

double ScalarField2D::grad_norm(int i, int j) const {
    const std::size_t p = mask_->idx(i, j);
    return std::hypot(gx_[p], gy_[p]);
}

double ScalarField2D::max_value() const {
    double best = 0;
    for (std::size_t p : mask_->interior_list()) best = std::max(best, v_[p]);
    return best;
}

double ScalarField2D::max_grad() const {
    double best = 0;
    for (std::size_t p : mask_->interior_list()) best = std::max(best, std::hypot(gx_[p], gy_[p]));
    return best;
}

double ScalarField2D::integral() const {
    const auto& w = mask_->node_weights();
    double s = 0;
    for (std::size_t p : mask_->interior_list()) s += w[p] * v_[p];
    return s;
}

double ScalarField2D::l1_norm() const {
    const auto& w = mask_->node_weights();
    double s = 0;
    for (std::size_t p : mask_->interior_list()) s += w[p] * std::abs(v_[p]);
    return s;
}

double ScalarField2D::value_at(double x, double y) const {
    const DomainMask& m = *mask_;
    double fx = (x - m.x0()) / m.h();
    double fy = (y - m.y0()) / m.h();
    if (fx < 0 || fy < 0 || fx > m.nx() - 1 || fy > m.ny() - 1) return 0.0;
    int i = std::min(static_cast<int>(fx), m.nx() - 2);
    int j = std::min(static_cast<int>(fy), m.ny() - 2);
    double ax = fx - i, ay = fy - j;
    const double v00 = v_[m.idx(i, j)], v10 = v_[m.idx(i + 1, j)];
    const double v01 = v_[m.idx(i, j + 1)], v11 = v_[m.idx(i + 1, j + 1)];
    return (1 - ax) * (1 - ay) * v00 + ax * (1 - ay) * v10 + (1 - ax) * ay * v01 + ax * ay * v11;
}

double quadratic_form(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                      const TestFunction2D& xi) {
    if (u.empty() || xi.empty() || !u.mask().same_grid(xi.mask()))
        throw std::invalid_argument("quadratic_form: fields live on different masks");
    const DomainMask& m = u.mask();
    const auto& w = m.node_weights();
    const auto& gx = xi.gx_field();
    const auto& gy = xi.gy_field();
    const auto& xv = xi.values();
    const auto& uv = u.values();
    double q = 0;
    for (std::size_t p : m.interior_list()) {
        double grad2 = gx[p] * gx[p] + gy[p] * gy[p];
        q += w[p] * (grad2 - lambda * f.deriv(uv[p]) * xv[p] * xv[p]);
    }
    return q;
}

namespace {

struct NodeTerms {
    double lhs_alg;   // |H|_F^2 - |H n|^2
    double dtw;       // tangential derivative of |grad u| (differenced field)
    double tht;       // t^T H t = kappa |grad u|
    double w;
};

// Gathers the pointwise pieces at deep nodes above the gradient threshold.
template <typename Fn>
void for_flagged_nodes(const ScalarField2D& u, double threshold, Fn&& fn) {
    const DomainMask& m = u.mask();
    const double h = m.h();
    const double cutoff = threshold * u.max_grad();
    for (std::size_t p : m.interior_list()) {
        const int i = static_cast<int>(p % m.nx());
        const int j = static_cast<int>(p / m.nx());
        if (!m.deep(i, j)) continue;
        const double w = u.grad_norm(i, j);
        if (!(w > cutoff)) continue;
        const double nx = u.gx(i, j) / w, ny = u.gy(i, j) / w;
        const double hxx = u.hxx_field()[p], hyy = u.hyy_field()[p], hxy = u.hxy_field()[p];
        NodeTerms t;
        t.w = w;
        double hn_x = hxx * nx + hxy * ny;
        double hn_y = hxy * nx + hyy * ny;
        t.lhs_alg = hxx * hxx + 2 * hxy * hxy + hyy * hyy - (hn_x * hn_x + hn_y * hn_y);
        double dwx = (u.grad_norm(i + 1, j) - u.grad_norm(i - 1, j)) / (2 * h);
        double dwy = (u.grad_norm(i, j + 1) - u.grad_norm(i, j - 1)) / (2 * h);
        t.dtw = -ny * dwx + nx * dwy;
        t.tht = hxx * ny * ny - 2 * hxy * nx * ny + hyy * nx * nx;
        fn(i, j, p, t);
    }
}

}  // namespace

double identity_residual(const ScalarField2D& u, double threshold) {
    double scale = 0;
    std::size_t count = 0;
    for_flagged_nodes(u, threshold, [&](int, int, std::size_t, const NodeTerms& t) {
        double rhs = t.dtw * t.dtw + t.tht * t.tht;
        scale = std::max(scale, std::max(std::abs(t.lhs_alg), std::abs(rhs)));
        ++count;
    });
    if (count == 0)
        throw DegenerateFieldError("identity check: no nodes above the gradient threshold");
    double worst = 0;
    for_flagged_nodes(u, threshold, [&](int, int, std::size_t, const NodeTerms& t) {
        double rhs = t.dtw * t.dtw + t.tht * t.tht;
        double den = std::max({std::abs(t.lhs_alg), std::abs(rhs), 1e-6 * scale});
        worst = std::max(worst, std::abs(t.lhs_alg - rhs) / den);
    });
    return worst;
}

double gradient_equation_residual(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                                  double threshold) {
    const DomainMask& m = u.mask();
    const double h = m.h();
    struct Pair {
        double lhs, rhs;
    };
    std::vector<Pair> pairs;
    for_flagged_nodes(u, threshold, [&](int i, int j, std::size_t p, const NodeTerms& t) {
        double lap_w = (u.grad_norm(i + 1, j) + u.grad_norm(i - 1, j) + u.grad_norm(i, j + 1) +
                        u.grad_norm(i, j - 1) - 4 * t.w) /
                       (h * h);
        double lhs = lap_w + lambda * f.deriv(u.values()[p]) * t.w;
        double rhs = t.lhs_alg / t.w;
        pairs.push_back({lhs, rhs});
    });
    if (pairs.empty())
        throw DegenerateFieldError("gradient equation: no nodes above the gradient threshold");
    double scale = 0;
    for (const auto& pr : pairs) scale = std::max(scale, std::max(std::abs(pr.lhs), std::abs(pr.rhs)));
    double worst = 0;
    for (const auto& pr : pairs) {
        double den = std::max({std::abs(pr.lhs), std::abs(pr.rhs), 1e-6 * scale});
        worst = std::max(worst, std::abs(pr.lhs - pr.rhs) / den);
    }
    return worst;
}

ScalarField2D resample(const ScalarField2D& src, std::shared_ptr<const DomainMask> dst) {
    return ScalarField2D::from_function(std::move(dst),
                                        [&src](double x, double y) { return src.value_at(x, y); });
}

TestFunction2D random_test_function(std::shared_ptr<const DomainMask> mask, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> freq(1, 4);
    std::uniform_real_distribution<double> amp(0.5, 2.0);
    const int a = freq(rng), b = freq(rng);
    const double c = amp(rng);
    const double lx = (mask->nx() - 1) * mask->h();
    const double ly = (mask->ny() - 1) * mask->h();
    const double x0 = mask->x0(), y0 = mask->y0();
    return ScalarField2D::from_function(std::move(mask), [=](double x, double y) {
        return c * std::sin(a * M_PI * (x - x0) / lx) * std::sin(b * M_PI * (y - y0) / ly);
    });
}

}  // namespace gelfand
