#include "doctest.h"

#include <cmath>

#include "gelfand/radial.hpp"
#include "oracles.hpp"

using namespace gelfand;

namespace {

RadialSolution synthetic_cone(int nodes = 2001) {
    // u = 1 - r on the unit disk.
    RadialSolution s;
    s.n = 2;
    s.lambda = 0.0;
    for (int i = 0; i < nodes; ++i) {
        double r = static_cast<double>(i) / (nodes - 1);
        s.r_nodes.push_back(r);
        s.u.push_back(1.0 - r);
        s.du.push_back(-1.0);
    }
    return s;
}

RadialSolution synthetic_paraboloid(int nodes = 2001) {
    // u = 1 - r^2.
    RadialSolution s;
    s.n = 2;
    s.lambda = 4.0;
    for (int i = 0; i < nodes; ++i) {
        double r = static_cast<double>(i) / (nodes - 1);
        s.r_nodes.push_back(r);
        s.u.push_back(1.0 - r * r);
        s.du.push_back(-2.0 * r);
    }
    return s;
}

}  // namespace

TEST_CASE("shooting reproduces the explicit quadratic solution (n=2, g=1, m=1)") {
    auto g = Nonlinearity::constant(1.0);
    auto [lambda, sol] = solve_shooting(2, g, 1.0);
    CHECK(lambda == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(std::abs(sol.u.back()) < 1e-8);
    CHECK(std::abs(sol.du.front()) < 1e-8);
    for (double r : {0.1, 0.33, 0.5, 0.9})
        CHECK(sol.value_at(r) == doctest::Approx(1.0 - r * r).epsilon(1e-8));
    CHECK(radial_residual(sol, g) < 1e-6);
    for (std::size_t i = 1; i < sol.u.size(); ++i) CHECK(sol.u[i] < sol.u[i - 1] + 1e-14);
}

TEST_CASE("shooting hits the closed-form family at the fold (n=2, exp)") {
    auto g = Nonlinearity::exponential();
    double m = oracle::m_star_disk_exp;
    auto [lambda, sol] = solve_shooting(2, g, m);
    CHECK(lambda == doctest::Approx(2.0).epsilon(1e-6));
    oracle::Liouville L(m);
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.r_nodes.size(); ++i)
        worst = std::max(worst, std::abs(sol.u[i] - L.value(sol.r_nodes[i])));
    CHECK(worst < 1e-6);
    CHECK(radial_residual(sol, g) < 1e-6);
}

TEST_CASE("shooting on the minimal branch (n=2, exp, m=0.5)") {
    auto g = Nonlinearity::exponential();
    oracle::Liouville L(0.5);
    auto [lambda, sol] = solve_shooting(2, g, 0.5);
    CHECK(lambda == doctest::Approx(L.lambda()).epsilon(1e-8));
    CHECK(std::abs(lambda - 1.3782) < 1e-3);
    CHECK(sol.l1_norm() == doctest::Approx(L.l1()).epsilon(1e-6));
    CHECK(radial_residual(sol, g) < 1e-6);
}

TEST_CASE("no zero before r_max raises the no-solution error") {
    auto g = Nonlinearity::constant(0.001);
    CHECK_THROWS_AS(solve_shooting(2, g, 1.0), NoSolutionError);
}

TEST_CASE("shooting argument checks") {
    auto g = Nonlinearity::exponential();
    CHECK_THROWS_AS(solve_shooting(2, g, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_shooting(1, g, 1.0), std::invalid_argument);
    // g < 0 somewhere on [0, m]: rejected up front.
    CHECK_THROWS_AS(solve_shooting(2, Nonlinearity::affine(1.0, -2.0), 1.0),
                    std::invalid_argument);
    // Saturation of e^s propagates as an evaluation error.
    CHECK_THROWS_AS(solve_shooting(2, g, 705.0), EvalError);
}

TEST_CASE("branch tracing matches the closed-form lambda(m)") {
    auto g = Nonlinearity::exponential();
    BranchControl ctrl;
    ctrl.threads = 4;
    auto b = trace_branch(2, g, {0.5, oracle::m_star_disk_exp, 3.0}, ctrl);
    REQUIRE(b.points.size() == 3);
    CHECK(b.gaps.empty());
    CHECK(b.g_id == "exponential");
    CHECK(b.points[0].lambda == doctest::Approx(oracle::Liouville(0.5).lambda()).epsilon(1e-7));
    CHECK(b.points[1].lambda == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(b.points[2].lambda == doctest::Approx(oracle::Liouville(3.0).lambda()).epsilon(1e-7));
    CHECK(std::abs(b.points[2].lambda - 1.3867) < 1e-3);
    // Stability flips across the fold m* = 2 ln 2.
    CHECK(b.points[0].lambda1 > 0.0);
    CHECK(b.points[2].lambda1 < 0.0);
    for (const auto& p : b.points)
        CHECK(p.sup_norm == doctest::Approx(p.m).epsilon(1e-12));
}

TEST_CASE("linear problem branch: lambda = 2 n m, disk eigenvalue anchor") {
    auto g = Nonlinearity::constant(1.0);
    auto b = trace_branch(2, g, {1.0, 2.0});
    REQUIRE(b.points.size() == 2);
    CHECK(b.points[0].lambda == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(b.points[1].lambda == doctest::Approx(8.0).epsilon(1e-8));
    // g' = 0: lambda1 is the first Dirichlet eigenvalue of -Delta on the disk.
    double j2 = oracle::disk_dirichlet_lambda1();
    CHECK(b.points[0].lambda1 == doctest::Approx(j2).epsilon(5e-3));
    CHECK(b.points[1].lambda1 == doctest::Approx(j2).epsilon(5e-3));
}

TEST_CASE("failed centers become gaps, not aborts") {
    auto g = Nonlinearity::constant(0.001);
    auto b = trace_branch(2, g, {0.1, 1.0});
    REQUIRE(b.points.size() == 1);
    REQUIRE(b.gaps.size() == 1);
    CHECK(b.points[0].m == doctest::Approx(0.1));
    CHECK(b.points[0].lambda == doctest::Approx(400.0).epsilon(1e-8));
    CHECK(b.gaps[0].m == doctest::Approx(1.0));
    CHECK(!b.gaps[0].reason.empty());

    CHECK_THROWS_AS(trace_branch(2, g, {}), std::invalid_argument);
    CHECK_THROWS_AS(trace_branch(2, g, {1.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(trace_branch(2, g, {-1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("singular regime: n=10 exp approaches lambda = 16") {
    auto g = Nonlinearity::exponential();
    BranchControl ctrl;
    ctrl.threads = 3;
    auto b = trace_branch(10, g, {5.0, 10.0, 20.0}, ctrl);
    REQUIRE(b.points.size() == 3);
    for (const auto& p : b.points) {
        CHECK(p.lambda > 12.0);
        CHECK(p.lambda < 17.0);
    }
    CHECK(std::abs(b.points[2].lambda - 16.0) <= 0.16);
}

TEST_CASE("extremal parameter from the dense closed-form branch") {
    auto g = Nonlinearity::exponential();
    std::vector<double> grid;
    for (double m = 0.2; m <= 4.0 + 1e-9; m += 0.05) grid.push_back(m);
    BranchControl ctrl;
    ctrl.threads = 4;
    auto b = trace_branch(2, g, grid, ctrl);
    auto est = extremal_parameter(b);
    CHECK(std::abs(est.lambda_star - 2.0) < 1e-3);
    CHECK(std::abs(est.m_at_max - oracle::m_star_disk_exp) < 1e-2);
    CHECK(est.m_lo < est.m_at_max);
    CHECK(est.m_hi > est.m_at_max);

    auto turn = first_turning_index(b);
    REQUIRE(turn != branch_npos);
    CHECK(std::abs(b.points[turn].m - oracle::m_star_disk_exp) < 0.06);
    for (std::size_t i = 0; i < turn; ++i) CHECK(b.points[i].lambda1 >= -1e-4);
}

TEST_CASE("extremal bracket errors") {
    auto g = Nonlinearity::exponential();
    auto rising = trace_branch(2, g, {0.2, 0.5, 0.8, 1.1});
    CHECK_THROWS_AS(extremal_parameter(rising), BracketError);
    auto falling = trace_branch(2, g, {2.0, 2.5, 3.0});
    CHECK_THROWS_AS(extremal_parameter(falling), BracketError);
    auto tiny = trace_branch(2, g, {0.5, 1.0});
    CHECK_THROWS_AS(extremal_parameter(tiny), std::invalid_argument);
}

TEST_CASE("n=3 extremal estimate is stable under m-grid refinement") {
    auto g = Nonlinearity::exponential();
    std::vector<double> coarse, fine;
    for (double m = 1.0; m <= 8.0 + 1e-9; m += 0.1) coarse.push_back(m);
    for (double m = 1.0; m <= 8.0 + 1e-9; m += 0.025) fine.push_back(m);
    BranchControl ctrl;
    ctrl.threads = 4;
    auto ec = extremal_parameter(trace_branch(3, g, coarse, ctrl));
    auto ef = extremal_parameter(trace_branch(3, g, fine, ctrl));
    CHECK(std::abs(ec.lambda_star - ef.lambda_star) <= 1e-3 * ef.lambda_star);
}

TEST_CASE("linearized eigenvalue across the fold") {
    auto g = Nonlinearity::exponential();
    auto s1 = solve_shooting(2, g, 1.2).second;
    CHECK(linearized_eigenvalue(s1, g) > 0.0);
    auto s2 = solve_shooting(2, g, oracle::m_star_disk_exp).second;
    CHECK(std::abs(linearized_eigenvalue(s2, g)) < 5e-2);
    auto s3 = solve_shooting(3, g, 0.1).second;
    CHECK(linearized_eigenvalue(s3, g) > 0.0);
}

TEST_CASE("radial level quantities: closed-form circles") {
    auto cone = synthetic_cone();
    auto q = radial_level_quantities(cone, 0.5);
    CHECK(q.level_radius == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(q.h2 == doctest::Approx(oracle::pi).epsilon(1e-10));
    CHECK(q.h1 == doctest::Approx(4.0 * oracle::pi).epsilon(1e-10));
    CHECK(q.area == doctest::Approx(oracle::pi).epsilon(1e-10));
    CHECK(q.second_form_norm == doctest::Approx(2.0).epsilon(1e-10));

    auto para = synthetic_paraboloid();
    q = radial_level_quantities(para, 0.75);
    CHECK(q.level_radius == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(q.slope == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(q.h2 == doctest::Approx(oracle::pi).epsilon(1e-10));
    CHECK(q.h1 == doctest::Approx(4.0 * oracle::pi).epsilon(1e-10));

    CHECK_THROWS_AS(radial_level_quantities(cone, 0.0), std::out_of_range);
    CHECK_THROWS_AS(radial_level_quantities(cone, 1.5), std::out_of_range);
}

TEST_CASE("Michael-Simon ratio in dimension 4 is level-independent") {
    auto g = Nonlinearity::exponential();
    auto sol = solve_shooting(4, g, 1.0).second;
    double expect = oracle::michael_simon_ratio_n4();
    CHECK(expect == doctest::Approx(0.04563789287179525).epsilon(1e-12));
    for (double f : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        auto q = radial_level_quantities(sol, f * sol.center());
        CHECK(std::cbrt(q.h2) / q.h1 == doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("quartic shell energy matches the annulus closed form") {
    auto cone = synthetic_cone();
    // |u'| = 1: integral over {0.5 < r < 1} is the annulus area 3 pi / 4.
    CHECK(radial_quartic_energy(cone, 0.5, 1.0) ==
          doctest::Approx(0.75 * oracle::pi).epsilon(1e-10));
    CHECK(radial_quartic_energy(cone, 0.0, 1.0) == doctest::Approx(oracle::pi).epsilon(1e-10));

    // u = 1 - r^2: integral of (2r)^4 over the disk = 16 pi / 3.
    auto para = synthetic_paraboloid();
    CHECK(radial_quartic_energy(para, 0.0, 1.0) ==
          doctest::Approx(16.0 * oracle::pi / 3.0).epsilon(1e-8));
}

TEST_CASE("interpolation and inversion agree on the stored profile") {
    auto g = Nonlinearity::exponential();
    auto sol = solve_shooting(2, g, 1.0).second;
    for (double s : {0.1, 0.4, 0.8, 0.95}) {
        double rs = sol.level_radius(s);
        CHECK(sol.value_at(rs) == doctest::Approx(s).epsilon(1e-10));
    }
}
