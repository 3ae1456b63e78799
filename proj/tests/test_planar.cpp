#include "doctest.h"

#include <cmath>
#include <memory>

#include "gelfand/planar.hpp"
#include "oracles.hpp"

using namespace gelfand;

namespace {

std::shared_ptr<const DomainMask> disk_mask(double h) {
    return std::make_shared<const DomainMask>(DomainMask::disk(h));
}

std::shared_ptr<const DomainMask> square_mask(double h) {
    return std::make_shared<const DomainMask>(DomainMask::square(h));
}

}  // namespace

TEST_CASE("mask geometry: areas, distances, stencil flags") {
    auto d32 = DomainMask::disk(1.0 / 32);
    auto d64 = DomainMask::disk(1.0 / 64);
    CHECK(d64.area() == doctest::Approx(oracle::pi).epsilon(1e-2));
    CHECK(std::abs(d64.area() - d32.area()) < 0.01 * d64.area());
    CHECK(!d64.uniform_stencil());
    CHECK(d64.convex());
    CHECK(d64.inradius() == doctest::Approx(1.0).epsilon(0.05));

    auto s = DomainMask::square(1.0 / 32);
    CHECK(s.area() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(s.uniform_stencil());
    CHECK(s.inradius() == doctest::Approx(0.5).epsilon(0.07));

    auto e = DomainMask::ellipse(1.0 / 48, 0.8, 0.5);
    CHECK(e.area() == doctest::Approx(oracle::pi * 0.8 * 0.5).epsilon(1e-2));

    // Exact boundary distances on interior nodes.
    for (int j = 0; j < d64.ny(); ++j)
        for (int i = 0; i < d64.nx(); ++i)
            if (d64.interior(i, j)) {
                double r = std::hypot(d64.node_x(i), d64.node_y(j));
                CHECK(d64.delta(i, j) == doctest::Approx(1.0 - r).epsilon(1e-10));
            }
    for (int j = 0; j < s.ny(); ++j)
        for (int i = 0; i < s.nx(); ++i)
            if (s.interior(i, j)) {
                double x = s.node_x(i), y = s.node_y(j);
                double want = std::min(std::min(x, 1 - x), std::min(y, 1 - y));
                CHECK(s.delta(i, j) == doctest::Approx(want).epsilon(1e-10));
            }

    // Node weights integrate constants to the area.
    double wsum = 0;
    for (std::size_t p : d64.interior_list()) wsum += d64.node_weights()[p];
    CHECK(wsum == doctest::Approx(d64.area()).epsilon(1e-12));
}

TEST_CASE("polygon masks: unit square recovered, convexity enforced") {
    std::vector<std::array<double, 2>> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    auto p = DomainMask::polygon(1.0 / 32, sq);
    CHECK(p.area() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p.inradius() == doctest::Approx(0.5).epsilon(0.07));

    std::vector<std::array<double, 2>> ell = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK_THROWS_AS(DomainMask::polygon(1.0 / 32, ell), std::invalid_argument);
    CHECK_THROWS_AS(DomainMask::polygon(1.0 / 32, {{0, 0}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("field caches: linear field has exact gradient away from the edge") {
    auto m = disk_mask(1.0 / 32);
    auto f = ScalarField2D::from_function(m, [](double x, double y) { return 2 * x - 3 * y + 0.5; });
    for (int j = 0; j < m->ny(); ++j)
        for (int i = 0; i < m->nx(); ++i)
            if (m->interior(i, j) && !m->near_edge(i, j)) {
                CHECK(f.gx(i, j) == doctest::Approx(2.0).epsilon(1e-12));
                CHECK(f.gy(i, j) == doctest::Approx(-3.0).epsilon(1e-12));
            }
}

TEST_CASE("field integrals and interpolation") {
    auto m = disk_mask(1.0 / 64);
    auto u = ScalarField2D::from_function(m, [](double x, double y) { return 1 - x * x - y * y; });
    CHECK(u.integral() == doctest::Approx(oracle::pi / 2).epsilon(1e-2));
    CHECK(u.l1_norm() == doctest::Approx(oracle::pi / 2).epsilon(1e-2));
    CHECK(u.max_value() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(u.value_at(0.25, 0.1) == doctest::Approx(1 - 0.25 * 0.25 - 0.01).epsilon(1e-3));
    CHECK(u.value_at(5.0, 5.0) == 0.0);
}

TEST_CASE("newton: linear Poisson anchors") {
    auto sm = square_mask(1.0 / 128);
    auto one = Nonlinearity::constant(1.0);
    auto u = solve_newton(sm, one, 1.0, ScalarField2D::zero(sm));
    CHECK(std::abs(u.value_at(0.5, 0.5) - oracle::square_poisson_center()) < 1e-4);
    CHECK(std::abs(u.value_at(0.5, 0.5) - 0.07367135126667050) < 1e-4);

    auto dm = disk_mask(1.0 / 128);
    auto v = solve_newton(dm, one, 1.0, ScalarField2D::zero(dm));
    CHECK(std::abs(v.value_at(0, 0) - 0.25) < 1e-3);
}

TEST_CASE("newton: disk exponential solution matches the closed-form minimal branch") {
    auto dm = disk_mask(1.0 / 128);
    auto g = Nonlinearity::exponential();
    auto u = solve_newton(dm, g, 1.0, ScalarField2D::zero(dm));
    double mu = oracle::liouville_mu_for_lambda(1.0);
    auto L = oracle::Liouville::from_mu(mu);
    CHECK(std::abs(u.value_at(0, 0) - L.center()) < 1e-2);
    double worst = 0;
    for (double r = 0.0; r < 0.95; r += 0.05)
        worst = std::max(worst, std::abs(u.value_at(r, 0.0) - L.value(r)));
    CHECK(worst < 1e-2);

    // Identity between the two assemblies of the level-set algebra.
    CHECK(identity_residual(u, 0.1) < 4e-3);
    // Equation satisfied by |grad u| along solutions.
    CHECK(gradient_equation_residual(u, g, 1.0, 0.1) < 5e-2);
}

TEST_CASE("gradient equation on a synthetic quadratic field") {
    auto dm = disk_mask(1.0 / 256);
    auto u = ScalarField2D::from_function(dm, [](double x, double y) { return 1 - x * x - y * y; });
    CHECK(identity_residual(u, 0.1) < 1e-3);
    auto f4 = Nonlinearity::constant(4.0);
    CHECK(gradient_equation_residual(u, f4, 1.0, 0.1) < 1e-3);
    CHECK_THROWS_AS(gradient_equation_residual(u, f4, 1.0, 1.1), DegenerateFieldError);
}

TEST_CASE("newton: divergence beyond the fold carries the last iterate") {
    auto dm = disk_mask(1.0 / 32);
    auto g = Nonlinearity::exponential();
    bool threw = false;
    try {
        solve_newton(dm, g, 4.0, ScalarField2D::zero(dm));
    } catch (const NewtonDivergence& e) {
        threw = true;
        CHECK(!e.last_iterate.empty());
    } catch (const ConvergenceError&) {
        threw = true;  // linear-solve failure is an acceptable mode past the fold
    }
    CHECK(threw);

    auto other = disk_mask(1.0 / 16);
    CHECK_THROWS_AS(solve_newton(dm, g, 1.0, ScalarField2D::zero(other)), std::invalid_argument);
}

TEST_CASE("minimal branch on the disk ends near the fold") {
    auto dm = disk_mask(1.0 / 64);
    auto g = Nonlinearity::exponential();
    auto pts = minimal_branch_2d(dm, g, {0.5, 1.0, 1.5, 1.9, 2.0, 2.1});
    REQUIRE(pts.size() >= 4);
    CHECK(pts.back().lambda >= 1.9);
    CHECK(pts.back().lambda <= 2.05);
    for (const auto& p : pts) CHECK(p.lambda1 >= -1e-4);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        CHECK(pts[k].lambda1 < pts[k - 1].lambda1);
        CHECK(pts[k].u.max_value() > pts[k - 1].u.max_value());
    }

    CHECK_THROWS_AS(minimal_branch_2d(dm, g, {}), std::invalid_argument);
    CHECK_THROWS_AS(minimal_branch_2d(dm, g, {-0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(minimal_branch_2d(dm, g, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("linear problem: branch never ends, eigenvalue is the disk anchor") {
    auto dm = disk_mask(1.0 / 32);
    auto one = Nonlinearity::constant(1.0);
    auto pts = minimal_branch_2d(dm, one, {0.5, 1.0, 2.0});
    REQUIRE(pts.size() == 3);
    double j2 = oracle::disk_dirichlet_lambda1();
    for (const auto& p : pts) CHECK(p.lambda1 == doctest::Approx(j2).epsilon(0.02));
}

TEST_CASE("eigenvalue anchors at moderate resolution") {
    auto sm = square_mask(1.0 / 64);
    auto one = Nonlinearity::constant(1.0);
    auto us = ScalarField2D::zero(sm);
    double l1s = linearized_eigenvalue_2d(us, one, 1.0);
    CHECK(l1s == doctest::Approx(2 * oracle::pi * oracle::pi).epsilon(5e-3));

    auto dmm = disk_mask(1.0 / 64);
    auto ud = ScalarField2D::zero(dmm);
    double l1d = linearized_eigenvalue_2d(ud, one, 1.0);
    CHECK(l1d == doctest::Approx(oracle::disk_dirichlet_lambda1()).epsilon(0.01));
}

TEST_CASE("quadratic form: closed forms, eigen consistency, nonnegativity") {
    auto dm = disk_mask(1.0 / 64);
    auto one = Nonlinearity::constant(1.0);
    auto u0 = ScalarField2D::zero(dm);
    auto xi = ScalarField2D::from_function(dm, [](double x, double y) { return 1 - x * x - y * y; });
    CHECK(quadratic_form(u0, one, 1.0, xi) == doctest::Approx(2 * oracle::pi).epsilon(1e-2));
    CHECK(quadratic_form(u0, one, 1.0, ScalarField2D::zero(dm)) == 0.0);

    auto other = disk_mask(1.0 / 32);
    CHECK_THROWS_AS(quadratic_form(u0, one, 1.0, ScalarField2D::zero(other)),
                    std::invalid_argument);

    auto g = Nonlinearity::exponential();
    auto u = solve_newton(dm, g, 1.0, ScalarField2D::zero(dm));
    ScalarField2D vec;
    double l1 = linearized_eigenvalue_2d(u, g, 1.0, &vec);
    CHECK(l1 > 0.0);
    double q = quadratic_form(u, g, 1.0, vec);
    double mass = 0;
    for (std::size_t p : dm->interior_list())
        mass += dm->node_weights()[p] * vec.values()[p] * vec.values()[p];
    CHECK(q / mass == doctest::Approx(l1).epsilon(0.05));

    std::mt19937_64 rng(20240817);
    for (int k = 0; k < 50; ++k) {
        auto test_fn = random_test_function(dm, rng);
        double norm2 = 0;
        for (std::size_t p : dm->interior_list())
            norm2 += dm->node_weights()[p] * test_fn.values()[p] * test_fn.values()[p];
        CHECK(quadratic_form(u, g, 1.0, test_fn) >= -1e-6 * norm2);
    }
}

TEST_CASE("resampling onto a finer mask tracks the source field") {
    auto coarse = disk_mask(1.0 / 32);
    auto fine = disk_mask(1.0 / 64);
    auto u = ScalarField2D::from_function(coarse, [](double x, double y) { return 1 - x * x - y * y; });
    auto v = resample(u, fine);
    CHECK(std::abs(v.value_at(0.3, 0.2) - (1 - 0.09 - 0.04)) < 5e-3);
}
