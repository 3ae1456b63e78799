#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gelfand/common.hpp"
#include "gelfand/nonlinearity.hpp"

namespace gelfand {

enum class ShapeKind { Disk, Square, Ellipse, Polygon };

// Direction indices for one-sided boundary fractions.
enum : int { DirE = 0, DirW = 1, DirN = 2, DirS = 3 };

// Grid mask of a convex planar domain. The grid covers the shape's bounding
// box plus a two-node margin; nodes strictly inside the shape are "interior",
// everything else holds the Dirichlet value 0. All geometry (boundary
// fractions, distances, clipped cell areas) is frozen at construction.
class DomainMask {
public:
    static DomainMask disk(double h, double radius = 1.0);
    static DomainMask square(double h, double side = 1.0);
    static DomainMask ellipse(double h, double a, double b);
    // Convex polygon; vertices in order (either orientation), no repeats.
    static DomainMask polygon(double h, const std::vector<std::array<double, 2>>& vertices);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    double node_x(int i) const { return x0_ + h_ * i; }
    double node_y(int j) const { return y0_ + h_ * j; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    bool interior(int i, int j) const;
    // Some 8-neighbour is exterior.
    bool near_edge(int i, int j) const;
    // Interior with the whole 5x5 patch interior: safe for nested stencils.
    bool deep(int i, int j) const;
    // Distance to the domain boundary; 0 at exterior nodes.
    double delta(int i, int j) const { return delta_[idx(i, j)]; }
    // Fraction of h from an interior node to the boundary in direction d;
    // 1 when the neighbour is interior.
    double theta(int i, int j, int dir) const;

    double area() const { return area_; }
    double inradius() const { return inradius_; }
    bool convex() const { return true; }
    ShapeKind shape() const { return shape_; }
    const std::string& shape_name() const { return shape_name_; }
    const std::vector<double>& shape_params() const { return params_; }

    // Clipped area of the grid cell with lower-left node (ci, cj).
    double cell_area(int ci, int cj) const { return cell_area_[cell_idx(ci, cj)]; }
    // Quadrature weights: each cell's clipped area split among its interior
    // corners, so that sum_i w_i f_i ~ integral of f over the domain.
    const std::vector<double>& node_weights() const { return weights_; }

    // True when no stencil is clipped (all thetas are 1): the five-point
    // operator is then symmetric.
    bool uniform_stencil() const { return uniform_stencil_; }

    const std::vector<std::size_t>& interior_list() const { return interior_list_; }
    std::size_t interior_count() const { return interior_list_.size(); }

    bool same_grid(const DomainMask& o) const;

private:
    DomainMask() = default;
    struct Geometry;
    void build(const Geometry& geo, double h);
    std::size_t cell_idx(int ci, int cj) const {
        return static_cast<std::size_t>(cj) * (nx_ - 1) + ci;
    }

    ShapeKind shape_{ShapeKind::Disk};
    std::string shape_name_;
    std::vector<double> params_;
    int nx_ = 0, ny_ = 0;
    double h_ = 0, x0_ = 0, y0_ = 0;
    double area_ = 0, inradius_ = 0;
    bool uniform_stencil_ = true;
    std::vector<uint8_t> interior_, near_edge_, deep_;
    std::vector<double> delta_;
    std::vector<double> theta_;  // 4 per node, packed
    std::vector<double> cell_area_;
    std::vector<double> weights_;
    std::vector<std::size_t> interior_list_;
};

// Grid function with zero trace: values live on the full grid, identically 0
// at exterior nodes. First and second difference fields are cached at
// construction; the object is immutable afterwards.
class ScalarField2D {
public:
    ScalarField2D() = default;
    ScalarField2D(std::shared_ptr<const DomainMask> mask, std::vector<double> values);

    static ScalarField2D zero(std::shared_ptr<const DomainMask> mask);
    static ScalarField2D from_function(std::shared_ptr<const DomainMask> mask,
                                       const std::function<double(double, double)>& fn);

    bool empty() const { return !mask_; }
    const DomainMask& mask() const { return *mask_; }
    const std::shared_ptr<const DomainMask>& mask_ptr() const { return mask_; }

    const std::vector<double>& values() const { return v_; }
    const std::vector<double>& gx_field() const { return gx_; }
    const std::vector<double>& gy_field() const { return gy_; }
    const std::vector<double>& hxx_field() const { return hxx_; }
    const std::vector<double>& hyy_field() const { return hyy_; }
    const std::vector<double>& hxy_field() const { return hxy_; }

    double value(int i, int j) const { return v_[mask_->idx(i, j)]; }
    double gx(int i, int j) const { return gx_[mask_->idx(i, j)]; }
    double gy(int i, int j) const { return gy_[mask_->idx(i, j)]; }
    double grad_norm(int i, int j) const;

    double max_value() const;
    double max_grad() const;
    // Trapezoid integral with the mask's node weights.
    double integral() const;
    double l1_norm() const;
    // Bilinear interpolation; 0 outside the grid.
    double value_at(double x, double y) const;

private:
    void build_caches();
    std::shared_ptr<const DomainMask> mask_;
    std::vector<double> v_, gx_, gy_, hxx_, hyy_, hxy_;
};

// Test functions share the zero-trace grid representation.
using TestFunction2D = ScalarField2D;

struct NewtonControl {
    double res_tol = 1e-10;   // max-norm of the discrete residual
    int max_iter = 60;
    double lin_tol = 1e-12;   // Krylov tolerance, relative to the rhs norm
    int lin_maxit = 0;        // 0: choose from the problem size
};

// Newton failed to converge; carries the last iterate for diagnostics.
class NewtonDivergence : public ConvergenceError {
public:
    NewtonDivergence(const std::string& what, ScalarField2D last, double res)
        : ConvergenceError(what), last_iterate(std::move(last)), last_residual(res) {}
    ScalarField2D last_iterate;
    double last_residual;
};

// Solves -lap u = lambda f(u), u = 0 on the boundary, by Newton iteration on
// the five-point system (Shortley-Weller corrected at clipped stencils).
ScalarField2D solve_newton(std::shared_ptr<const DomainMask> dom, const Nonlinearity& f,
                           double lambda, const ScalarField2D& init,
                           const NewtonControl& ctrl = {});

struct PlanarBranchPoint {
    double lambda = 0;
    ScalarField2D u;
    double lambda1 = 0;
};

// Warm-started continuation along an increasing lambda grid, starting from
// u = 0 at the first entry. A failed step is retried with the lambda-step
// bisected twice before the branch is declared finished; the returned points
// stop at the last grid value that converged.
std::vector<PlanarBranchPoint> minimal_branch_2d(std::shared_ptr<const DomainMask> dom,
                                                 const Nonlinearity& g,
                                                 const std::vector<double>& lambda_grid,
                                                 const NewtonControl& ctrl = {});

// Second variation of energy at u in direction xi:
// integral of |grad xi|^2 - lambda f'(u) xi^2.
double quadratic_form(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                      const TestFunction2D& xi);

// Smallest eigenvalue of -lap_h - lambda f'(u) by shifted inverse power
// iteration; optionally returns the eigenfunction (max-normalized).
double linearized_eigenvalue_2d(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                                ScalarField2D* eigenfunction = nullptr,
                                const NewtonControl& ctrl = {});

// Max relative gap, over safely interior nodes with |grad u| above
// threshold*max, between the two assemblies of the level-set identity:
// Hessian algebra |H|_F^2 - |H n|^2 versus the geometric form
// |grad_T |grad u||^2 + |A|^2 |grad u|^2 with the tangential derivative taken
// by differencing the |grad u| field.
double identity_residual(const ScalarField2D& u, double threshold);

// Max relative residual of the equation satisfied by |grad u| along solutions:
// (lap + lambda f'(u)) |grad u| = (|H|_F^2 - |H n|^2) / |grad u|.
// Nodes with |grad u| <= threshold*max or too close to the boundary are
// skipped; an empty node set is a degenerate-field error.
double gradient_equation_residual(const ScalarField2D& u, const Nonlinearity& f, double lambda,
                                  double threshold);

// Bilinear resampling of a field onto another mask (0 outside the source).
ScalarField2D resample(const ScalarField2D& src, std::shared_ptr<const DomainMask> dst);

// Product of low-frequency sines over the bounding box, masked to the domain.
TestFunction2D random_test_function(std::shared_ptr<const DomainMask> mask, std::mt19937_64& rng);

}  // namespace gelfand
