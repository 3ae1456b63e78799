#include "gelfand/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gelfand {

namespace {

double point_segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double qx = ax + t * dx, qy = ay + t * dy;
    return std::hypot(px - qx, py - qy);
}

// Distance from an interior point to the ellipse x^2/a^2 + y^2/b^2 = 1.
// Golden-section search on the boundary angle around the normalized guess,
// with the four axis points as extra candidates (covers the center).
double ellipse_distance(double px, double py, double a, double b) {
    auto dist_at = [&](double phi) {
        return std::hypot(px - a * std::cos(phi), py - b * std::sin(phi));
    };
    double best = std::min(std::min(dist_at(0.0), dist_at(M_PI)),
                           std::min(dist_at(M_PI / 2), dist_at(-M_PI / 2)));
    double phi0 = std::atan2(py * a, px * b);
    double lo = phi0 - 1.3, hi = phi0 + 1.3;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = dist_at(c), fd = dist_at(d);
    for (int it = 0; it < 120; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = dist_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = dist_at(d);
        }
    }
    return std::min(best, std::min(fc, fd));
}

}  // namespace

// Shape geometry used only while building: an implicit function (negative
// strictly inside, zero on the boundary, continuous across it) and the exact
// Euclidean distance to the boundary for interior points.
struct DomainMask::Geometry {
    std::function<double(double, double)> implicit;
    std::function<double(double, double)> boundary_distance;
    double xmin, xmax, ymin, ymax;
};

DomainMask DomainMask::disk(double h, double radius) {
    if (!(h > 0) || !(radius > 0)) throw std::invalid_argument("disk: h and radius must be positive");
    DomainMask m;
    m.shape_ = ShapeKind::Disk;
    m.shape_name_ = "disk";
    m.params_ = {radius};
    Geometry geo;
    geo.implicit = [radius](double x, double y) { return std::hypot(x, y) - radius; };
    geo.boundary_distance = [radius](double x, double y) { return radius - std::hypot(x, y); };
    geo.xmin = -radius;
    geo.xmax = radius;
    geo.ymin = -radius;
    geo.ymax = radius;
    m.build(geo, h);
    return m;
}

DomainMask DomainMask::square(double h, double side) {
    if (!(h > 0) || !(side > 0)) throw std::invalid_argument("square: h and side must be positive");
    DomainMask m;
    m.shape_ = ShapeKind::Square;
    m.shape_name_ = "square";
    m.params_ = {side};
    Geometry geo;
    geo.implicit = [side](double x, double y) {
        return std::max(std::abs(x - side / 2), std::abs(y - side / 2)) - side / 2;
    };
    geo.boundary_distance = [side](double x, double y) {
        return std::min(std::min(x, side - x), std::min(y, side - y));
    };
    geo.xmin = 0;
    geo.xmax = side;
    geo.ymin = 0;
    geo.ymax = side;
    m.build(geo, h);
    return m;
}

DomainMask DomainMask::ellipse(double h, double a, double b) {
    if (!(h > 0) || !(a > 0) || !(b > 0))
        throw std::invalid_argument("ellipse: h and semi-axes must be positive");
    DomainMask m;
    m.shape_ = ShapeKind::Ellipse;
    m.shape_name_ = "ellipse";
    m.params_ = {a, b};
    Geometry geo;
    geo.implicit = [a, b](double x, double y) {
        return std::sqrt(x * x / (a * a) + y * y / (b * b)) - 1.0;
    };
    geo.boundary_distance = [a, b](double x, double y) { return ellipse_distance(x, y, a, b); };
    geo.xmin = -a;
    geo.xmax = a;
    geo.ymin = -b;
    geo.ymax = b;
    m.build(geo, h);
    return m;
}

DomainMask DomainMask::polygon(double h, const std::vector<std::array<double, 2>>& vertices) {
    if (!(h > 0)) throw std::invalid_argument("polygon: h must be positive");
    if (vertices.size() < 3) throw std::invalid_argument("polygon: at least 3 vertices");
    std::vector<std::array<double, 2>> v = vertices;
    // Normalize to counterclockwise orientation.
    double twice_area = 0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto& p = v[k];
        auto& q = v[(k + 1) % v.size()];
        twice_area += p[0] * q[1] - q[0] * p[1];
    }
    if (twice_area < 0) std::reverse(v.begin(), v.end());
    if (std::abs(twice_area) < 1e-14) throw std::invalid_argument("polygon: degenerate vertex list");
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto& a = v[k];
        auto& b = v[(k + 1) % v.size()];
        auto& c = v[(k + 2) % v.size()];
        double cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if (cross < -1e-12) throw std::invalid_argument("polygon: vertices must form a convex polygon");
    }
    DomainMask m;
    m.shape_ = ShapeKind::Polygon;
    m.shape_name_ = "polygon";
    for (const auto& p : v) {
        m.params_.push_back(p[0]);
        m.params_.push_back(p[1]);
    }
    Geometry geo;
    auto signed_implicit = [v](double x, double y) {
        // Signed distance: negative inside (convex, CCW).
        double min_edge = std::numeric_limits<double>::max();
        double worst_side = -std::numeric_limits<double>::max();
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto& a = v[k];
            const auto& b = v[(k + 1) % v.size()];
            min_edge = std::min(min_edge, point_segment_distance(x, y, a[0], a[1], b[0], b[1]));
            double ex = b[0] - a[0], ey = b[1] - a[1];
            double side = (x - a[0]) * ey - (y - a[1]) * ex;  // > 0 outside for CCW
            worst_side = std::max(worst_side, side / std::hypot(ex, ey));
        }
        return worst_side <= 0 ? -min_edge : min_edge;
    };
    geo.implicit = signed_implicit;
    geo.boundary_distance = [signed_implicit](double x, double y) {
        return std::max(0.0, -signed_implicit(x, y));
    };
    geo.xmin = geo.ymin = std::numeric_limits<double>::max();
    geo.xmax = geo.ymax = -std::numeric_limits<double>::max();
    for (const auto& p : v) {
        geo.xmin = std::min(geo.xmin, p[0]);
        geo.xmax = std::max(geo.xmax, p[0]);
        geo.ymin = std::min(geo.ymin, p[1]);
        geo.ymax = std::max(geo.ymax, p[1]);
    }
    m.build(geo, h);
    return m;
}

void DomainMask::build(const Geometry& geo, double h) {
    h_ = h;
    x0_ = geo.xmin - 2 * h;
    y0_ = geo.ymin - 2 * h;
    nx_ = static_cast<int>(std::ceil((geo.xmax - geo.xmin) / h - 1e-9)) + 5;
    ny_ = static_cast<int>(std::ceil((geo.ymax - geo.ymin) / h - 1e-9)) + 5;
    const std::size_t n = static_cast<std::size_t>(nx_) * ny_;
    interior_.assign(n, 0);
    near_edge_.assign(n, 0);
    deep_.assign(n, 0);
    delta_.assign(n, 0.0);
    theta_.assign(4 * n, 1.0);

    std::vector<double> phi(n);
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) phi[idx(i, j)] = geo.implicit(node_x(i), node_y(j));
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i)
            if (phi[idx(i, j)] < 0) {
                interior_[idx(i, j)] = 1;
                interior_list_.push_back(idx(i, j));
                delta_[idx(i, j)] = std::max(0.0, geo.boundary_distance(node_x(i), node_y(j)));
            }

    // Boundary crossing between an inside and an outside point, by bisection
    // on the implicit function. Returns the fraction from the inside point.
    auto crossing = [&](double xa, double ya, double xb, double yb) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            double f = geo.implicit(xa + mid * (xb - xa), ya + mid * (yb - ya));
            (f < 0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (std::size_t p : interior_list_) {
        int i = static_cast<int>(p % nx_);
        int j = static_cast<int>(p / nx_);
        for (int d = 0; d < 4; ++d) {
            int in = i + di[d], jn = j + dj[d];
            if (interior_[idx(in, jn)]) continue;
            double th = crossing(node_x(i), node_y(j), node_x(in), node_y(jn));
            theta_[4 * p + d] = std::max(th, 1e-6);
            uniform_stencil_ = uniform_stencil_ && std::abs(th - 1.0) < 1e-12;
        }
    }

    for (std::size_t p : interior_list_) {
        int i = static_cast<int>(p % nx_);
        int j = static_cast<int>(p / nx_);
        bool edge = false;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                if (!interior_[idx(i + a, j + b)]) edge = true;
        near_edge_[p] = edge;
    }
    for (std::size_t p : interior_list_) {
        int i = static_cast<int>(p % nx_);
        int j = static_cast<int>(p / nx_);
        bool ok = true;
        for (int a = -2; a <= 2 && ok; ++a)
            for (int b = -2; b <= 2 && ok; ++b) {
                int ii = i + a, jj = j + b;
                if (ii < 0 || jj < 0 || ii >= nx_ || jj >= ny_ || !interior_[idx(ii, jj)]) ok = false;
            }
        deep_[p] = ok;
    }

    // Clipped cell areas: corners inside plus bisected edge crossings form a
    // convex polygon per cell (shoelace). Distribute each cell's area among
    // its interior corners so boundary-nonzero integrands are not lost.
    cell_area_.assign(static_cast<std::size_t>(nx_ - 1) * (ny_ - 1), 0.0);
    weights_.assign(n, 0.0);
    area_ = 0;
    for (int cj = 0; cj + 1 < ny_; ++cj) {
        for (int ci = 0; ci + 1 < nx_; ++ci) {
            // Corner order: counterclockwise loop around the cell.
            const int cx[4] = {ci, ci + 1, ci + 1, ci};
            const int cy[4] = {cj, cj, cj + 1, cj + 1};
            // Area uses the closed region (phi <= 0) so a boundary that passes
            // exactly through nodes does not clip corner cells; weights go to
            // strict-interior corners only.
            bool in[4];
            int count = 0, strict = 0;
            for (int k = 0; k < 4; ++k) {
                in[k] = phi[idx(cx[k], cy[k])] <= 0;
                count += in[k];
                strict += interior_[idx(cx[k], cy[k])] ? 1 : 0;
            }
            double a = 0;
            if (strict == 0) {
                // sliver touching the boundary only; measure zero
            } else if (count == 4) {
                a = h_ * h_;
            } else if (count > 0) {
                std::vector<std::array<double, 2>> poly;
                for (int k = 0; k < 4; ++k) {
                    int k2 = (k + 1) % 4;
                    double xa = node_x(cx[k]), ya = node_y(cy[k]);
                    double xb = node_x(cx[k2]), yb = node_y(cy[k2]);
                    if (in[k]) poly.push_back({xa, ya});
                    if (in[k] != in[k2]) {
                        double t = in[k] ? crossing(xa, ya, xb, yb) : 1.0 - crossing(xb, yb, xa, ya);
                        poly.push_back({xa + t * (xb - xa), ya + t * (yb - ya)});
                    }
                }
                for (std::size_t k = 0; k < poly.size(); ++k) {
                    const auto& pa = poly[k];
                    const auto& pb = poly[(k + 1) % poly.size()];
                    a += pa[0] * pb[1] - pb[0] * pa[1];
                }
                a = std::abs(a) / 2;
            }
            cell_area_[cell_idx(ci, cj)] = a;
            area_ += a;
            if (a > 0) {
                double share = a / strict;
                for (int k = 0; k < 4; ++k)
                    if (interior_[idx(cx[k], cy[k])]) weights_[idx(cx[k], cy[k])] += share;
            }
        }
    }

    inradius_ = 0;
    for (std::size_t p : interior_list_) inradius_ = std::max(inradius_, delta_[p]);
}

bool DomainMask::interior(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return false;
    return interior_[idx(i, j)];
}

bool DomainMask::near_edge(int i, int j) const { return near_edge_[idx(i, j)]; }

bool DomainMask::deep(int i, int j) const { return deep_[idx(i, j)]; }

double DomainMask::theta(int i, int j, int dir) const { return theta_[4 * idx(i, j) + dir]; }

bool DomainMask::same_grid(const DomainMask& o) const {
    return nx_ == o.nx_ && ny_ == o.ny_ && std::abs(h_ - o.h_) < 1e-15 &&
           std::abs(x0_ - o.x0_) < 1e-12 && std::abs(y0_ - o.y0_) < 1e-12 &&
           shape_ == o.shape_ && params_ == o.params_;
}

}  // namespace gelfand
