#include "gelfand/levelgeom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "gelfand/common.hpp"

namespace gelfand {

namespace {

double seg_len(double xa, double ya, double xb, double yb) {
    return std::hypot(xb - xa, yb - ya);
}

// Bilinear sample of the cached derivative fields, restricted to interior
// nodes (exterior caches are padding, not data). Weights renormalized.
struct VertexSample {
    double w = 0.0;      // |grad u|
    double kappa = 0.0;  // signed curvature of the level line through the point
};

VertexSample sample_vertex(const ScalarField2D& u, double x, double y) {
    const DomainMask& m = u.mask();
    double fx = (x - m.x0()) / m.h();
    double fy = (y - m.y0()) / m.h();
    int ci = std::clamp(static_cast<int>(std::floor(fx)), 0, m.nx() - 2);
    int cj = std::clamp(static_cast<int>(std::floor(fy)), 0, m.ny() - 2);
    double ax = std::clamp(fx - ci, 0.0, 1.0);
    double ay = std::clamp(fy - cj, 0.0, 1.0);
    const double wgt[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), ax * ay, (1 - ax) * ay};
    const int ii[4] = {ci, ci + 1, ci + 1, ci};
    const int jj[4] = {cj, cj, cj + 1, cj + 1};
    double tot = 0, gx = 0, gy = 0, hxx = 0, hyy = 0, hxy = 0;
    for (int k = 0; k < 4; ++k) {
        if (!m.interior(ii[k], jj[k])) continue;
        std::size_t p = m.idx(ii[k], jj[k]);
        tot += wgt[k];
        gx += wgt[k] * u.gx_field()[p];
        gy += wgt[k] * u.gy_field()[p];
        hxx += wgt[k] * u.hxx_field()[p];
        hyy += wgt[k] * u.hyy_field()[p];
        hxy += wgt[k] * u.hxy_field()[p];
    }
    VertexSample out;
    if (tot <= 0) return out;
    gx /= tot, gy /= tot, hxx /= tot, hyy /= tot, hxy /= tot;
    out.w = std::hypot(gx, gy);
    double den = out.w * out.w * out.w;
    if (den > 0)
        // Sign convention: positive where the superlevel set {u > s} is convex
        // (u = 1 - r gives kappa = 1/r on every level circle).
        out.kappa = -(gy * gy * hxx - 2 * gx * gy * hxy + gx * gx * hyy) / den;
    return out;
}

// Grid-edge key: one crossing vertex per cut edge, shared by both cells.
std::uint64_t edge_key(int i, int j, int nx, bool vertical) {
    return (static_cast<std::uint64_t>(j) * nx + i) * 2 + (vertical ? 1 : 0);
}

struct Crossing {
    double x, y;
};

// Corner order within a cell: c0=(i,j), c1=(i+1,j), c2=(i+1,j+1), c3=(i,j+1).
// Edges: 0 bottom (c0c1), 1 right (c1c2), 2 top (c3c2), 3 left (c0c3).
void cell_edge(int ci, int cj, int e, int nx, std::uint64_t& key) {
    switch (e) {
        case 0: key = edge_key(ci, cj, nx, false); break;
        case 1: key = edge_key(ci + 1, cj, nx, true); break;
        case 2: key = edge_key(ci, cj + 1, nx, false); break;
        default: key = edge_key(ci, cj, nx, true); break;
    }
}

}  // namespace

double LevelComponent::length() const {
    double l = 0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k) l += seg_len(x[k], y[k], x[k + 1], y[k + 1]);
    return l;
}

double LevelComponent::total_turning() const {
    double t = 0;
    for (std::size_t k = 0; k + 1 < x.size(); ++k)
        t += 0.5 * (curvature[k] + curvature[k + 1]) * seg_len(x[k], y[k], x[k + 1], y[k + 1]);
    return t;
}

double LevelCurve::total_length() const {
    double l = 0;
    for (const auto& c : components) l += c.length();
    return l;
}

LevelCurve extract_level(const ScalarField2D& u, double s) {
    if (u.empty()) throw std::invalid_argument("extract_level: empty field");
    double T = u.max_value();
    if (!(s > 0.0) || !(s < T)) throw std::out_of_range("extract_level: s outside (0, max u)");

    const DomainMask& m = u.mask();
    const int nx = m.nx(), ny = m.ny();

    std::unordered_map<std::uint64_t, int> vertex_of_edge;
    std::vector<Crossing> verts;
    std::vector<std::array<int, 2>> segs;

    auto vertex_at = [&](std::uint64_t key, int i, int j, bool vertical) {
        auto it = vertex_of_edge.find(key);
        if (it != vertex_of_edge.end()) return it->second;
        double va = u.value(i, j);
        double vb = vertical ? u.value(i, j + 1) : u.value(i + 1, j);
        double t = (s - va) / (vb - va);
        t = std::clamp(t, 0.0, 1.0);
        Crossing c;
        c.x = m.node_x(i) + (vertical ? 0.0 : t * m.h());
        c.y = m.node_y(j) + (vertical ? t * m.h() : 0.0);
        int id = static_cast<int>(verts.size());
        verts.push_back(c);
        vertex_of_edge.emplace(key, id);
        return id;
    };

    auto add_seg = [&](int ci, int cj, int ea, int eb) {
        std::uint64_t ka, kb;
        cell_edge(ci, cj, ea, nx, ka);
        cell_edge(ci, cj, eb, nx, kb);
        bool va_vert = (ea == 1 || ea == 3);
        bool vb_vert = (eb == 1 || eb == 3);
        int ia = ea == 1 ? ci + 1 : ci, ja = ea == 2 ? cj + 1 : cj;
        int ib = eb == 1 ? ci + 1 : ci, jb = eb == 2 ? cj + 1 : cj;
        segs.push_back({vertex_at(ka, ia, ja, va_vert), vertex_at(kb, ib, jb, vb_vert)});
    };

    for (int cj = 0; cj + 1 < ny; ++cj) {
        for (int ci = 0; ci + 1 < nx; ++ci) {
            if (!m.interior(ci, cj) && !m.interior(ci + 1, cj) && !m.interior(ci + 1, cj + 1) &&
                !m.interior(ci, cj + 1))
                continue;
            double v0 = u.value(ci, cj), v1 = u.value(ci + 1, cj);
            double v2 = u.value(ci + 1, cj + 1), v3 = u.value(ci, cj + 1);
            int code = (v0 > s) | ((v1 > s) << 1) | ((v2 > s) << 2) | ((v3 > s) << 3);
            switch (code) {
                case 0: case 15: break;
                case 1: case 14: add_seg(ci, cj, 0, 3); break;
                case 2: case 13: add_seg(ci, cj, 0, 1); break;
                case 4: case 11: add_seg(ci, cj, 1, 2); break;
                case 8: case 7: add_seg(ci, cj, 2, 3); break;
                case 3: case 12: add_seg(ci, cj, 3, 1); break;
                case 6: case 9: add_seg(ci, cj, 0, 2); break;
                case 5:
                    if (0.25 * (v0 + v1 + v2 + v3) > s) {
                        add_seg(ci, cj, 0, 1);
                        add_seg(ci, cj, 2, 3);
                    } else {
                        add_seg(ci, cj, 0, 3);
                        add_seg(ci, cj, 1, 2);
                    }
                    break;
                default:  // 10
                    if (0.25 * (v0 + v1 + v2 + v3) > s) {
                        add_seg(ci, cj, 0, 3);
                        add_seg(ci, cj, 1, 2);
                    } else {
                        add_seg(ci, cj, 0, 1);
                        add_seg(ci, cj, 2, 3);
                    }
                    break;
            }
        }
    }

    // Stitch segments into loops: each crossing vertex meets exactly two
    // segments (interior levels never reach the padded grid frame).
    std::vector<std::array<int, 2>> adj(verts.size(), {-1, -1});
    for (int k = 0; k < static_cast<int>(segs.size()); ++k)
        for (int end = 0; end < 2; ++end) {
            auto& a = adj[segs[k][end]];
            (a[0] < 0 ? a[0] : a[1]) = k;
        }

    LevelCurve out;
    out.s = s;
    std::vector<char> used(segs.size(), 0);
    for (int k0 = 0; k0 < static_cast<int>(segs.size()); ++k0) {
        if (used[k0]) continue;
        std::vector<int> loop;
        int seg = k0, v = segs[k0][0];
        while (true) {
            used[seg] = 1;
            loop.push_back(v);
            int w = segs[seg][0] == v ? segs[seg][1] : segs[seg][0];
            int next = adj[w][0] == seg ? adj[w][1] : adj[w][0];
            v = w;
            if (next < 0 || used[next]) {
                loop.push_back(w);
                break;
            }
            seg = next;
        }
        if (loop.size() < 4) continue;  // degenerate sliver
        LevelComponent comp;
        std::size_t nvert = loop.size();
        comp.x.resize(nvert);
        comp.y.resize(nvert);
        comp.grad_norm.resize(nvert);
        comp.curvature.resize(nvert);
        comp.dt_sqrt_grad.assign(nvert, 0.0);
        for (std::size_t q = 0; q < nvert; ++q) {
            comp.x[q] = verts[loop[q]].x;
            comp.y[q] = verts[loop[q]].y;
            auto vs = sample_vertex(u, comp.x[q], comp.y[q]);
            comp.grad_norm[q] = vs.w;
            comp.curvature[q] = vs.kappa;
        }
        // Tangential derivative of sqrt|grad u| by arclength-weighted central
        // differences over the closed loop (index nvert-1 duplicates index 0).
        std::size_t nloop = nvert - 1;
        for (std::size_t q = 0; q < nloop; ++q) {
            std::size_t qm = (q + nloop - 1) % nloop;
            std::size_t qp = (q + 1) % nloop;
            double lm = seg_len(comp.x[qm], comp.y[qm], comp.x[q], comp.y[q]);
            double lp = seg_len(comp.x[q], comp.y[q], comp.x[qp], comp.y[qp]);
            double span = lm + lp;
            if (span > 0)
                comp.dt_sqrt_grad[q] =
                    (std::sqrt(comp.grad_norm[qp]) - std::sqrt(comp.grad_norm[qm])) / span;
        }
        comp.dt_sqrt_grad[nloop] = comp.dt_sqrt_grad[0];
        out.components.push_back(std::move(comp));
    }

    std::sort(out.components.begin(), out.components.end(),
              [](const LevelComponent& a, const LevelComponent& b) {
                  return a.length() > b.length();
              });
    return out;
}

namespace {

// Area of {u > s} inside one cell by linear clipping; the saddle split follows
// the same cell-center rule as extract_level.
double cell_superlevel_area(const DomainMask& m, const ScalarField2D& u, int ci, int cj,
                            double s) {
    double cap = m.cell_area(ci, cj);
    if (cap <= 0) return 0.0;
    const int cx[4] = {ci, ci + 1, ci + 1, ci};
    const int cy[4] = {cj, cj, cj + 1, cj + 1};
    double v[4];
    bool in[4];
    int count = 0;
    for (int k = 0; k < 4; ++k) {
        v[k] = u.value(cx[k], cy[k]);
        in[k] = v[k] > s;
        count += in[k];
    }
    if (count == 0) return 0.0;
    if (count == 4) return cap;
    double h = m.h();
    double px[4], py[4];
    for (int k = 0; k < 4; ++k) {
        px[k] = m.node_x(cx[k]);
        py[k] = m.node_y(cy[k]);
    }
    auto cross_pt = [&](int a, int b, double& qx, double& qy) {
        double t = std::clamp((s - v[a]) / (v[b] - v[a]), 0.0, 1.0);
        qx = px[a] + t * (px[b] - px[a]);
        qy = py[a] + t * (py[b] - py[a]);
    };
    auto shoelace = [](const std::vector<std::array<double, 2>>& poly) {
        double a = 0;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const auto& pa = poly[k];
            const auto& pb = poly[(k + 1) % poly.size()];
            a += pa[0] * pb[1] - pb[0] * pa[1];
        }
        return std::abs(a) / 2;
    };
    bool saddle = (in[0] && in[2] && !in[1] && !in[3]) || (in[1] && in[3] && !in[0] && !in[2]);
    double area = 0;
    if (!saddle) {
        std::vector<std::array<double, 2>> poly;
        for (int k = 0; k < 4; ++k) {
            int k2 = (k + 1) % 4;
            if (in[k]) poly.push_back({px[k], py[k]});
            if (in[k] != in[k2]) {
                double qx, qy;
                cross_pt(k, k2, qx, qy);
                poly.push_back({qx, qy});
            }
        }
        area = shoelace(poly);
    } else {
        double bx, by, rx, ry, tx, ty, lx, ly;
        cross_pt(0, 1, bx, by);
        cross_pt(1, 2, rx, ry);
        cross_pt(3, 2, tx, ty);
        cross_pt(0, 3, lx, ly);
        bool center_high = 0.25 * (v[0] + v[1] + v[2] + v[3]) > s;
        int hi0 = in[0] ? 0 : 1;  // saddle has exactly the opposite pair high
        if (center_high) {
            std::vector<std::array<double, 2>> band;
            if (hi0 == 0)
                band = {{px[0], py[0]}, {bx, by}, {rx, ry}, {px[2], py[2]}, {tx, ty}, {lx, ly}};
            else
                band = {{px[1], py[1]}, {rx, ry}, {tx, ty}, {px[3], py[3]}, {lx, ly}, {bx, by}};
            area = shoelace(band);
        } else {
            if (hi0 == 0)
                area = shoelace({{px[0], py[0]}, {bx, by}, {lx, ly}}) +
                       shoelace({{px[2], py[2]}, {tx, ty}, {rx, ry}});
            else
                area = shoelace({{px[1], py[1]}, {rx, ry}, {bx, by}}) +
                       shoelace({{px[3], py[3]}, {lx, ly}, {tx, ty}});
        }
    }
    return std::min(area, cap);
}

}  // namespace

double superlevel_area(const ScalarField2D& u, double s) {
    if (u.empty()) throw std::invalid_argument("superlevel_area: empty field");
    const DomainMask& m = u.mask();
    double total = 0;
    for (int cj = 0; cj + 1 < m.ny(); ++cj)
        for (int ci = 0; ci + 1 < m.nx(); ++ci)
            total += cell_superlevel_area(m, u, ci, cj, s);
    return total;
}

double sublevel_energy(const ScalarField2D& u, double t) {
    if (u.empty()) throw std::invalid_argument("sublevel_energy: empty field");
    double T = u.max_value();
    if (!(t > 0.0) || !(t <= T)) throw std::out_of_range("sublevel_energy: t outside (0, max u]");
    const DomainMask& m = u.mask();
    double total = 0;
    for (int cj = 0; cj + 1 < m.ny(); ++cj)
        for (int ci = 0; ci + 1 < m.nx(); ++ci) {
            double cap = m.cell_area(ci, cj);
            if (cap <= 0) continue;
            double below = cap - cell_superlevel_area(m, u, ci, cj, t);
            if (below <= 0) continue;
            const int cx[4] = {ci, ci + 1, ci + 1, ci};
            const int cy[4] = {cj, cj, cj + 1, cj + 1};
            double mean = 0;
            int cnt = 0;
            for (int k = 0; k < 4; ++k)
                if (m.interior(cx[k], cy[k])) {
                    double w = u.grad_norm(cx[k], cy[k]);
                    mean += w * w * w * w;
                    ++cnt;
                }
            if (cnt == 0) continue;
            total += below * mean / cnt;
        }
    return total / (t * t);
}

LevelProfile level_quantities(const ScalarField2D& u, double s) {
    LevelCurve curve = extract_level(u, s);
    LevelProfile p;
    p.s = s;
    p.min_grad = std::numeric_limits<double>::infinity();
    for (const auto& c : curve.components) {
        for (std::size_t k = 0; k + 1 < c.x.size(); ++k) {
            double dl = seg_len(c.x[k], c.y[k], c.x[k + 1], c.y[k + 1]);
            double wa = c.grad_norm[k], wb = c.grad_norm[k + 1];
            double fa = 4 * c.dt_sqrt_grad[k] * c.dt_sqrt_grad[k] +
                        c.curvature[k] * c.curvature[k] * wa;
            double fb = 4 * c.dt_sqrt_grad[k + 1] * c.dt_sqrt_grad[k + 1] +
                        c.curvature[k + 1] * c.curvature[k + 1] * wb;
            p.length += dl;
            p.h2 += 0.5 * (wa * wa * wa + wb * wb * wb) * dl;
            p.h1 += 0.5 * (fa + fb) * dl;
        }
        for (double w : c.grad_norm) p.min_grad = std::min(p.min_grad, w);
    }
    if (curve.components.empty()) p.min_grad = 0.0;
    p.V = superlevel_area(u, s);
    p.regular = p.min_grad > regularity_fraction * u.max_grad();
    return p;
}

std::vector<LevelProfile> profile_family(const ScalarField2D& u, int n_levels, int threads) {
    if (u.empty()) throw std::invalid_argument("profile_family: empty field");
    if (n_levels < 2) throw std::invalid_argument("profile_family: need at least 2 levels");
    double T = u.max_value();
    if (!(T > 0)) throw std::invalid_argument("profile_family: field has no positive values");
    double lo = 0.01 * T, hi = 0.99 * T;
    std::vector<LevelProfile> fam(n_levels);
    parallel_for(static_cast<std::size_t>(n_levels), threads, [&](std::size_t k) {
        double s = lo + (hi - lo) * static_cast<double>(k) / (n_levels - 1);
        fam[k] = level_quantities(u, s);
    });
    return fam;
}

namespace {

// Shared closure: trapezoid of h2 over the regular levels, extended linearly
// to s = 0 and s = T (clamped at 0) so the coarea integral covers [0, T].
double closed_h2_integral(const std::vector<LevelProfile>& fam, double T, double* excluded) {
    std::vector<double> s, q;
    for (const auto& p : fam)
        if (p.regular) {
            s.push_back(p.s);
            q.push_back(p.h2);
        }
    if (excluded)
        *excluded = fam.empty() ? 0.0 : 1.0 - static_cast<double>(s.size()) / fam.size();
    if (s.size() < 4) throw InsufficientDataError("coarea: fewer than 4 regular levels");
    std::size_t n = s.size();
    double q0 = q[0] + (0.0 - s[0]) * (q[1] - q[0]) / (s[1] - s[0]);
    double qT = q[n - 1] + (T - s[n - 1]) * (q[n - 1] - q[n - 2]) / (s[n - 1] - s[n - 2]);
    std::vector<double> xs, ys;
    xs.reserve(n + 2), ys.reserve(n + 2);
    xs.push_back(0.0), ys.push_back(std::max(q0, 0.0));
    xs.insert(xs.end(), s.begin(), s.end());
    ys.insert(ys.end(), q.begin(), q.end());
    xs.push_back(T), ys.push_back(std::max(qT, 0.0));
    return trapezoid(xs, ys);
}

}  // namespace

CoareaResult coarea_check(const ScalarField2D& u, int n_levels) {
    if (n_levels < 16) throw std::invalid_argument("coarea_check: n_levels >= 16 required");
    auto fam = profile_family(u, n_levels);
    CoareaResult r;
    r.lhs = closed_h2_integral(fam, u.max_value(), &r.excluded_fraction);
    const DomainMask& m = u.mask();
    for (std::size_t p : m.interior_list()) {
        double gx = u.gx_field()[p], gy = u.gy_field()[p];
        double g2 = gx * gx + gy * gy;
        r.rhs += m.node_weights()[p] * g2 * g2;
    }
    r.gap = std::abs(r.lhs - r.rhs) / r.rhs;
    return r;
}

LevelProfile radial_level_profile(const RadialSolution& sol, double s) {
    auto q = radial_level_quantities(sol, s);
    LevelProfile p;
    p.s = s;
    p.length = q.area;
    p.h1 = q.h1;
    p.h2 = q.h2;
    p.V = q.area * q.level_radius / sol.n;
    p.min_grad = q.slope;
    // Scale by the mean slope T/R, not the max: steep profiles concentrate
    // |u'| near the center, and the max would disqualify every outer level.
    p.regular = p.min_grad > regularity_fraction * sol.center() / sol.r_nodes.back();
    return p;
}

std::vector<LevelProfile> radial_profile_family(const RadialSolution& sol, int n_levels) {
    if (n_levels < 2) throw std::invalid_argument("radial_profile_family: need at least 2 levels");
    double T = sol.center();
    if (!(T > 0)) throw std::invalid_argument("radial_profile_family: empty solution");
    double lo = 0.01 * T, hi = 0.99 * T;
    std::vector<LevelProfile> fam(n_levels);
    for (int k = 0; k < n_levels; ++k) {
        double s = lo + (hi - lo) * static_cast<double>(k) / (n_levels - 1);
        fam[k] = radial_level_profile(sol, s);
    }
    return fam;
}

double radial_sublevel_energy(const RadialSolution& sol, double t) {
    double T = sol.center();
    if (!(t > 0.0) || !(t <= T))
        throw std::out_of_range("radial_sublevel_energy: t outside (0, max u]");
    double r_t = t >= T * (1.0 - 1e-14) ? 0.0 : sol.level_radius(t);
    return radial_quartic_energy(sol, r_t, 1.0) / (t * t);
}

CoareaResult radial_coarea_check(const RadialSolution& sol, int n_levels) {
    if (n_levels < 16) throw std::invalid_argument("radial_coarea_check: n_levels >= 16 required");
    auto fam = radial_profile_family(sol, n_levels);
    CoareaResult r;
    r.lhs = closed_h2_integral(fam, sol.center(), &r.excluded_fraction);
    r.rhs = radial_quartic_energy(sol, 0.0, 1.0);
    r.gap = std::abs(r.lhs - r.rhs) / r.rhs;
    return r;
}

}  // namespace gelfand
