#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "gelfand/levelgeom.hpp"
#include "oracles.hpp"

using namespace gelfand;

namespace {

std::shared_ptr<const DomainMask> disk_mask(double h) {
    return std::make_shared<const DomainMask>(DomainMask::disk(h));
}

ScalarField2D cone(double h) {
    return ScalarField2D::from_function(disk_mask(h),
                                        [](double x, double y) { return 1 - std::hypot(x, y); });
}

ScalarField2D paraboloid(double h) {
    return ScalarField2D::from_function(disk_mask(h),
                                        [](double x, double y) { return 1 - x * x - y * y; });
}

}  // namespace

TEST_CASE("cone level: one circle with the right length, curvature, quantities") {
    auto u = cone(1.0 / 128);
    auto curve = extract_level(u, 0.5);
    REQUIRE(curve.components.size() == 1);
    const auto& c = curve.components.front();
    CHECK(c.x.front() == c.x.back());
    CHECK(c.y.front() == c.y.back());
    CHECK(c.length() == doctest::Approx(oracle::pi).epsilon(1e-2));
    for (double k : c.curvature) CHECK(k == doctest::Approx(2.0).epsilon(2e-2));
    CHECK(c.total_turning() == doctest::Approx(2 * oracle::pi).epsilon(5e-2));

    auto p = level_quantities(u, 0.5);
    CHECK(p.h2 == doctest::Approx(oracle::pi).epsilon(1e-2));
    CHECK(p.h1 == doctest::Approx(4 * oracle::pi).epsilon(2e-2));
    CHECK(p.V == doctest::Approx(oracle::pi * 0.25).epsilon(1e-2));
    CHECK(p.regular);
    CHECK(p.min_grad == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("square pyramid level: square contour of the right perimeter") {
    auto m = std::make_shared<const DomainMask>(DomainMask::square(1.0 / 96, 2.0));
    auto u = ScalarField2D::from_function(m, [](double x, double y) {
        return 1 - std::max(std::abs(x - 1), std::abs(y - 1));
    });
    auto curve = extract_level(u, 0.5);
    REQUIRE(curve.components.size() == 1);
    CHECK(curve.components.front().length() == doctest::Approx(4.0).epsilon(2e-2));

    auto p = level_quantities(u, 0.5);
    CHECK(p.V == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("paraboloid level: unit slope circle") {
    auto u = paraboloid(1.0 / 128);
    auto p = level_quantities(u, 0.75);
    CHECK(p.length == doctest::Approx(oracle::pi).epsilon(1e-2));
    CHECK(p.h2 == doctest::Approx(oracle::pi).epsilon(1e-2));
    CHECK(p.h1 == doctest::Approx(4 * oracle::pi).epsilon(2e-2));
    CHECK(p.min_grad == doctest::Approx(1.0).epsilon(2e-2));
}

TEST_CASE("level extraction domain errors") {
    auto u = cone(1.0 / 32);
    CHECK_THROWS_AS(extract_level(u, 0.0), std::out_of_range);
    CHECK_THROWS_AS(extract_level(u, -0.25), std::out_of_range);
    CHECK_THROWS_AS(extract_level(u, 1.5), std::out_of_range);
    CHECK_THROWS_AS(sublevel_energy(u, 0.0), std::out_of_range);
    CHECK_THROWS_AS(sublevel_energy(u, 2.0), std::out_of_range);
    CHECK_THROWS_AS(coarea_check(u, 8), std::invalid_argument);
}

TEST_CASE("two separated bumps: component count, ordering, turning") {
    auto m = disk_mask(1.0 / 128);
    auto u = ScalarField2D::from_function(m, [](double x, double y) {
        double b1 = std::exp(-((x - 0.4) * (x - 0.4) + y * y) / 0.02);
        double b2 = std::exp(-((x + 0.4) * (x + 0.4) + y * y) / 0.008);
        return b1 + b2;
    });
    auto curve = extract_level(u, 0.5);
    REQUIRE(curve.components.size() == 2);
    CHECK(curve.components[0].length() > curve.components[1].length());
    for (const auto& c : curve.components) {
        CHECK(std::abs(c.total_turning()) > 2 * oracle::pi * 0.95);
        CHECK(std::abs(c.total_turning()) < 2 * oracle::pi * 1.05);
    }
}

TEST_CASE("radial exponential profile as a 2D field matches the radial oracle") {
    auto g = Nonlinearity::exponential();
    double mu = oracle::liouville_mu_for_lambda(1.0);
    auto L = oracle::Liouville::from_mu(mu);
    auto [lambda, sol] = solve_shooting(2, g, L.center());
    REQUIRE(lambda == doctest::Approx(1.0).epsilon(1e-6));

    auto m = disk_mask(1.0 / 128);
    auto u = ScalarField2D::from_function(
        m, [&](double x, double y) { return sol.value_at(std::hypot(x, y)); });

    double s = 0.5 * sol.center();
    auto curve = extract_level(u, s);
    REQUIRE(curve.components.size() == 1);
    double r_s = sol.level_radius(s);
    CHECK(curve.components.front().length() == doctest::Approx(2 * oracle::pi * r_s).epsilon(1e-2));

    auto p2 = level_quantities(u, s);
    auto pr = radial_level_quantities(sol, s);
    CHECK(p2.h1 == doctest::Approx(pr.h1).epsilon(2e-2));
    CHECK(p2.h2 == doctest::Approx(pr.h2).epsilon(2e-2));
}

TEST_CASE("profile family: monotone V, isoperimetric slack, thread determinism") {
    auto g = Nonlinearity::exponential();
    double mu = oracle::liouville_mu_for_lambda(1.0);
    auto L = oracle::Liouville::from_mu(mu);
    auto [lambda, sol] = solve_shooting(2, g, L.center());
    auto m = disk_mask(1.0 / 128);
    auto u = ScalarField2D::from_function(
        m, [&](double x, double y) { return sol.value_at(std::hypot(x, y)); });

    auto fam = profile_family(u, 48);
    REQUIRE(fam.size() == 48);
    for (std::size_t k = 1; k < fam.size(); ++k) {
        CHECK(fam[k].s > fam[k - 1].s);
        CHECK(fam[k].V <= fam[k - 1].V + 1e-12);
    }
    int n_regular = 0;
    for (const auto& p : fam) {
        CHECK(p.h1 >= 0);
        CHECK(p.h2 >= 0);
        if (p.regular) {
            ++n_regular;
            CHECK(4 * oracle::pi * p.V <= p.length * p.length * 1.02);
        }
    }
    CHECK(n_regular >= 40);

    auto fam4 = profile_family(u, 48, 4);
    for (std::size_t k = 0; k < fam.size(); ++k) {
        CHECK(fam4[k].h1 == fam[k].h1);
        CHECK(fam4[k].h2 == fam[k].h2);
        CHECK(fam4[k].V == fam[k].V);
    }

    // Total-variation identity for n = 2: V(t) >= integral of (-V') from t to T.
    std::size_t kt = fam.size() / 3;
    double swept = 0;
    for (std::size_t k = kt + 1; k < fam.size(); ++k) swept += fam[k - 1].V - fam[k].V;
    CHECK(fam[kt].V >= swept * (1.0 - 5e-2));
    CHECK(fam[kt].V == doctest::Approx(swept).epsilon(5e-2));
}

TEST_CASE("sublevel energy: annulus and whole-disk closed forms") {
    auto u = cone(1.0 / 128);
    CHECK(sublevel_energy(u, 0.5) == doctest::Approx(3 * oracle::pi).epsilon(1e-2));
    CHECK(sublevel_energy(u, 1.0) == doctest::Approx(oracle::pi).epsilon(1e-2));

    // Coarea cross-check on the paraboloid: B_t vs (1/t^2) * integral of h2.
    auto v = paraboloid(1.0 / 128);
    double t = 0.5;
    int nlev = 64;
    std::vector<double> xs, ys;
    for (int k = 0; k < nlev; ++k) {
        double s = t * (0.005 + 0.99 * static_cast<double>(k) / (nlev - 1));
        xs.push_back(s);
        ys.push_back(level_quantities(v, s).h2);
    }
    double integral = 0;
    for (int k = 1; k < nlev; ++k)
        integral += 0.5 * (ys[k] + ys[k - 1]) * (xs[k] - xs[k - 1]);
    // close the short end segments linearly
    integral += ys.front() * xs.front() + ys.back() * (t - xs.back());
    CHECK(sublevel_energy(v, t) == doctest::Approx(integral / (t * t)).epsilon(2e-2));
}

TEST_CASE("coarea identity on closed forms and the exponential profile") {
    auto u = cone(1.0 / 128);
    auto r1 = coarea_check(u, 64);
    CHECK(r1.lhs == doctest::Approx(oracle::pi).epsilon(2e-2));
    CHECK(r1.rhs == doctest::Approx(oracle::pi).epsilon(2e-2));
    CHECK(r1.gap < 2e-2);

    auto v = paraboloid(1.0 / 128);
    auto r2 = coarea_check(v, 64);
    CHECK(r2.rhs == doctest::Approx(16 * oracle::pi / 3).epsilon(1e-2));
    CHECK(r2.gap < 2e-2);

    auto g = Nonlinearity::exponential();
    double mu = oracle::liouville_mu_for_lambda(1.0);
    auto L = oracle::Liouville::from_mu(mu);
    auto [lambda, sol] = solve_shooting(2, g, L.center());
    auto m = disk_mask(1.0 / 128);
    auto w = ScalarField2D::from_function(
        m, [&](double x, double y) { return sol.value_at(std::hypot(x, y)); });
    auto r3 = coarea_check(w, 64);
    CHECK(r3.gap < 2e-2);
    CHECK(r3.excluded_fraction < 0.2);
}

TEST_CASE("radial level profiles and coarea") {
    auto g = Nonlinearity::exponential();
    auto [lambda, sol] = solve_shooting(4, g, 1.0);

    auto fam = radial_profile_family(sol, 64);
    REQUIRE(fam.size() == 64);
    for (std::size_t k = 1; k < fam.size(); ++k) CHECK(fam[k].V < fam[k - 1].V);

    auto r = radial_coarea_check(sol, 64);
    CHECK(r.gap < 2e-2);

    // B_t against a directly quadratured closed-form competitor (n = 2 family).
    double mu2 = oracle::liouville_mu_for_lambda(1.0);
    auto L = oracle::Liouville::from_mu(mu2);
    auto [l2, s2] = solve_shooting(2, g, L.center());
    double t = 0.5 * s2.center();
    double rt = s2.level_radius(t);
    double want = oracle::integrate(
                      [&](double rr) {
                          double slope = L.slope(rr);
                          return std::pow(std::abs(slope), 4.0) * 2 * oracle::pi * rr;
                      },
                      rt, 1.0) /
                  (t * t);
    CHECK(radial_sublevel_energy(s2, t) == doctest::Approx(want).epsilon(1e-3));
    CHECK(radial_sublevel_energy(s2, s2.center()) > 0.0);
    CHECK_THROWS_AS(radial_sublevel_energy(s2, 0.0), std::out_of_range);
    CHECK_THROWS_AS(radial_sublevel_energy(s2, 2 * s2.center()), std::out_of_range);
}

TEST_CASE("regularity flags shoulders and noisy gradients, not steep centers") {
    // Hand-built monotone profile with a flat shoulder around u = 1: the mean
    // slope is 2, so the cutoff sits at 0.1 and the shoulder (slope 1/30)
    // is flagged while the steep cap and skirt stay regular.
    RadialSolution sh;
    sh.n = 2;
    sh.lambda = 1.0;
    sh.r_nodes = {0.0, 0.2, 0.5, 0.8, 1.0};
    sh.u = {2.0, 1.01, 1.0, 0.99, 0.0};
    sh.du = {0.0, -1.0 / 30, -1.0 / 30, -1.0 / 30, -5.0};
    CHECK_FALSE(radial_level_profile(sh, 1.0).regular);
    CHECK(radial_level_profile(sh, 1.5).regular);
    CHECK(radial_level_profile(sh, 0.5).regular);

    // One wild slope must not veto the rest: the radial cutoff scales with
    // the mean slope, not the max, so the coarea trapezoid keeps its data.
    auto g = Nonlinearity::exponential();
    auto [lambda, sol] = solve_shooting(2, g, 1.0);
    RadialSolution spiked = sol;
    spiked.du[spiked.du.size() / 2] = -500.0;
    CHECK_NOTHROW(radial_coarea_check(spiked, 16));

    // Planar fields normalize by the max gradient instead: one corrupted node
    // inflates it past every honest level and the closed integral refuses
    // rather than extrapolate from nothing.
    double h = 1.0 / 64;
    auto m = disk_mask(h);
    auto noisy = ScalarField2D::from_function(m, [&](double x, double y) {
        if (std::abs(y) < 0.5 * h && std::abs(x - 0.97) < 0.5 * h) return -1.2;
        return 1 - x * x - y * y;
    });
    CHECK_THROWS_AS(coarea_check(noisy, 16), InsufficientDataError);
}
