#include "doctest.h"

#include <cmath>

#include "gelfand/nonlinearity.hpp"
#include "oracles.hpp"

using namespace gelfand;

namespace {

Nonlinearity exp_table() {
    std::vector<double> s, g;
    for (int i = 0; i <= 880; ++i) {
        double x = -1.0 + 23.0 * i / 880.0;
        s.push_back(x);
        g.push_back(std::exp(x));
    }
    return Nonlinearity::tabulated(s, g);
}

}  // namespace

TEST_CASE("triplet values for the built-in kinds") {
    auto e = eval_triplet(Nonlinearity::exponential(), 0.0);
    CHECK(e.g == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.dg == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.F == doctest::Approx(0.0));

    e = eval_triplet(Nonlinearity::exponential(), 1.0);
    CHECK(e.g == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(e.dg == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
    CHECK(e.F == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));

    // F' = g with F(0) = 0 forces F(s) = a s^2/2 + b s: here F(3) = 9 - 3 = 6.
    e = eval_triplet(Nonlinearity::affine(2.0, -1.0), 3.0);
    CHECK(e.g == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(e.dg == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(e.F == doctest::Approx(6.0).epsilon(1e-15));

    e = eval_triplet(Nonlinearity::power(2.0), 1.0);
    CHECK(e.g == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(e.dg == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(e.F == doctest::Approx(7.0 / 3.0).epsilon(1e-15));

    e = eval_triplet(Nonlinearity::constant(1.5), 2.0);
    CHECK(e.g == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(e.dg == doctest::Approx(0.0));
    CHECK(e.F == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("derivative matches centered differences on [0, 20]") {
    std::vector<Nonlinearity> kinds = {Nonlinearity::exponential(), Nonlinearity::power(2.0),
                                       Nonlinearity::power(3.5), Nonlinearity::affine(2.0, 1.0),
                                       Nonlinearity::constant(4.0), exp_table()};
    for (const auto& g : kinds) {
        for (int i = 0; i <= 40; ++i) {
            double s = 20.0 * i / 40.0;
            double h = 1e-5 * std::max(1.0, s);
            double fd = (g.eval(s + h) - g.eval(s - h)) / (2.0 * h);
            double d = g.deriv(s);
            CHECK(std::abs(d - fd) <= 1e-6 * std::max(1.0, std::abs(d)));
        }
    }
}

TEST_CASE("primitive is the integral of eval") {
    std::vector<Nonlinearity> kinds = {Nonlinearity::exponential(), Nonlinearity::power(2.0),
                                       Nonlinearity::affine(-1.0, 2.0), Nonlinearity::constant(0.5),
                                       exp_table()};
    for (const auto& g : kinds) {
        CHECK(g.primitive(0.0) == doctest::Approx(0.0));
        for (auto [a, b] : std::vector<std::pair<double, double>>{
                 {0.0, 1.0}, {1.0, 4.0}, {4.0, 11.0}, {11.0, 20.0}}) {
            double quad = oracle::integrate([&](double s) { return g.eval(s); }, a, b, 1e-13);
            double diff = g.primitive(b) - g.primitive(a);
            CHECK(std::abs(diff - quad) <= 1e-8 * std::max(1.0, std::abs(quad)));
        }
    }
}

TEST_CASE("exponential saturates with an explicit error") {
    auto g = Nonlinearity::exponential();
    CHECK(std::isfinite(g.eval(700.0)));
    CHECK_THROWS_AS(g.eval(700.5), EvalError);
    CHECK_THROWS_AS(g.deriv(701.0), EvalError);
    CHECK_THROWS_AS(g.primitive(705.0), EvalError);
    CHECK_THROWS_AS(eval_triplet(g, 1000.0), EvalError);
}

TEST_CASE("domain violations raise evaluation errors") {
    CHECK_THROWS_AS(Nonlinearity::power(2.5).eval(-1.5), EvalError);
    auto t = exp_table();
    CHECK_THROWS_AS(t.eval(23.0), EvalError);
    CHECK_THROWS_AS(t.eval(-2.0), EvalError);
    CHECK_THROWS_AS(t.eval(std::nan("")), EvalError);

    // A table that does not cover 0 cannot anchor F(0) = 0.
    std::vector<double> s{1.0, 2.0, 3.0, 4.0}, v{1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(Nonlinearity::tabulated(s, v).primitive(2.0), EvalError);
}

TEST_CASE("construction argument checks") {
    CHECK_THROWS_AS(Nonlinearity::power(1.0), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::power(0.5), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::tabulated({0.0, 1.0}, {1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(Nonlinearity::tabulated({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}),
                    std::invalid_argument);
}

TEST_CASE("tabulated kind tracks its source function") {
    auto t = exp_table();
    for (double s : {0.0, 0.5, 3.3, 10.0, 19.7}) {
        CHECK(t.eval(s) == doctest::Approx(std::exp(s)).epsilon(2e-6));
        CHECK(t.deriv(s) == doctest::Approx(std::exp(s)).epsilon(2e-4));
        CHECK(t.primitive(s) == doctest::Approx(std::exp(s) - 1.0).epsilon(2e-6));
    }
    CHECK(t.id().rfind("tabulated(", 0) == 0);
}

TEST_CASE("condition flags per kind") {
    auto rep = check_conditions(Nonlinearity::exponential(), 50.0, 64);
    CHECK(rep.nondecreasing);
    CHECK(rep.positive_at_zero);
    CHECK(rep.superlinear);

    rep = check_conditions(Nonlinearity::constant(1.0), 50.0, 64);
    CHECK(rep.nondecreasing);
    CHECK(rep.positive_at_zero);
    CHECK_FALSE(rep.superlinear);

    rep = check_conditions(Nonlinearity::power(2.0), 50.0, 64);
    CHECK(rep.nondecreasing);
    CHECK(rep.positive_at_zero);
    CHECK(rep.superlinear);

    // Affine growth is exactly linear: g(s)/s tends to a, never superlinear.
    rep = check_conditions(Nonlinearity::affine(2.0, 1.0), 50.0, 64);
    CHECK(rep.nondecreasing);
    CHECK(rep.positive_at_zero);
    CHECK_FALSE(rep.superlinear);

    rep = check_conditions(Nonlinearity::affine(2.0, -1.0), 50.0, 64);
    CHECK_FALSE(rep.positive_at_zero);
    CHECK_FALSE(rep.superlinear);
}

TEST_CASE("flags are reproducible from stored witnesses") {
    for (const auto& g : {Nonlinearity::exponential(), Nonlinearity::power(2.0),
                          Nonlinearity::constant(1.0), Nonlinearity::affine(2.0, 1.0)}) {
        auto rep = check_conditions(g, 50.0, 48);
        bool nd = false, pz = false, sl = false;
        flags_from_witnesses(rep, nd, pz, sl);
        CHECK(nd == rep.nondecreasing);
        CHECK(pz == rep.positive_at_zero);
        CHECK(sl == rep.superlinear);
    }
}

TEST_CASE("check_conditions argument and propagation errors") {
    CHECK_THROWS_AS(check_conditions(Nonlinearity::exponential(), -1.0, 64),
                    std::invalid_argument);
    CHECK_THROWS_AS(check_conditions(Nonlinearity::exponential(), 50.0, 8),
                    std::invalid_argument);
    // Table covering less than the sample range: evaluation-domain error.
    std::vector<double> s{0.0, 1.0, 2.0, 3.0}, v{1.0, 2.0, 4.0, 8.0};
    CHECK_THROWS_AS(check_conditions(Nonlinearity::tabulated(s, v), 50.0, 32), EvalError);
    // Saturation inside the sample range surfaces as the same error family.
    CHECK_THROWS_AS(check_conditions(Nonlinearity::exponential(), 800.0, 32), EvalError);
}
