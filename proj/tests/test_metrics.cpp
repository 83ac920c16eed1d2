#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ozone/metrics.hpp"

using namespace ozone;

TEST_SUITE("metrics") {

TEST_CASE("hand-computed example") {
    const auto m = evaluate(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(2, 2, 2));
    CHECK(m.rmse == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    CHECK(m.mae == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(m.nrmse == doctest::Approx(std::sqrt(2.0 / 3.0) / 2.0).epsilon(1e-15));
    // sum (p-o)^2 = 2, sum (|p-2| + |o-2|)^2 = 1 + 0 + 1 = 2
    CHECK(m.ia == 0.0);
}

TEST_CASE("perfect prediction") {
    const Eigen::Vector4d o(3, 1, 4, 1);
    const auto m = evaluate(o, o);
    CHECK(m.rmse == 0.0);
    CHECK(m.mae == 0.0);
    CHECK(m.nrmse == 0.0);
    CHECK(m.ia == 1.0);
}

TEST_CASE("predicting the observed mean gives IA zero") {
    oracle::Gen g(131);
    for (int k = 0; k < 100; ++k) {
        const auto o = oracle::to_eigen(g.uniforms(static_cast<std::size_t>(g.integer(2, 50)), 1, 100));
        const Eigen::VectorXd p = Eigen::VectorXd::Constant(o.size(), o.mean());
        CHECK(std::fabs(evaluate(o, p).ia) < 1e-12);
    }
}

TEST_CASE("agreement with the literal formulas") {
    oracle::Gen g(137);
    for (int k = 0; k < 1000; ++k) {
        const auto n = static_cast<std::size_t>(g.integer(2, 300));
        const auto o = g.uniforms(n, 0.5, 200);
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = o[i] + g.normal(0, g.uniform(0.1, 50));
        const auto want = oracle::metrics(o, p);
        const auto got = evaluate(oracle::to_eigen(o), oracle::to_eigen(p));
        CHECK(oracle::rel_err(got.rmse, want.rmse) < 1e-12);
        CHECK(oracle::rel_err(got.nrmse, want.nrmse) < 1e-12);
        CHECK(oracle::rel_err(got.mae, want.mae) < 1e-12);
        CHECK(oracle::rel_err(got.ia, want.ia) < 1e-12);
    }
}

TEST_CASE("bounds and orderings") {
    oracle::Gen g(139);
    for (int k = 0; k < 2000; ++k) {
        const auto n = static_cast<std::size_t>(g.integer(2, 100));
        const auto o = oracle::to_eigen(g.uniforms(n, 1, 100));
        const auto p = oracle::to_eigen(g.uniforms(n, -50, 150));
        const auto m = evaluate(o, p);
        CHECK(m.ia >= 0.0);
        CHECK(m.ia <= 1.0);
        CHECK(m.rmse >= m.mae * (1 - 1e-15));
        CHECK(m.mae >= 0.0);
        const double c = g.uniform(-20, 20);
        const auto shifted = evaluate(Eigen::VectorXd(o.array() + c), Eigen::VectorXd(p.array() + c));
        CHECK(oracle::rel_err(shifted.rmse, m.rmse) < 1e-10);
        CHECK(oracle::rel_err(shifted.mae, m.mae) < 1e-10);
    }
}

TEST_CASE("undefined cases are errors") {
    CHECK_THROWS_AS(evaluate(Eigen::Vector2d(-1, 1), Eigen::Vector2d(0, 0)), DataError);
    CHECK_THROWS_AS(evaluate(Eigen::Vector2d(2, 2), Eigen::Vector2d(2, 2)), DataError);
    CHECK_THROWS_AS(evaluate(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)), DataError);
    CHECK_THROWS_AS(evaluate(Eigen::VectorXd(Eigen::Vector2d(1, 2)), Eigen::VectorXd(Eigen::Vector3d(1, 2, 3))), ConfigError);
    CHECK_THROWS_AS(evaluate(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, std::nan(""))), DataError);
}

TEST_CASE("averaging and report rows") {
    const std::vector<MetricSet> runs{{1, 0.1, 0.5, 0.9}, {3, 0.3, 1.5, 0.7}};
    const auto mean = average(runs);
    CHECK(mean.rmse == 2.0);
    CHECK(mean.nrmse == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(mean.mae == 1.0);
    CHECK(mean.ia == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(report_row("A", "MLP", "O3", {0, 0, 0, 1}, 7) == "A,MLP,O3,0,0,0,1,7");
    CHECK(report_row("A", "MLP", "O3", {2.5, 0.125, 1, 0.5}, 1) == "A,MLP,O3,2.5,12.5,1,0.5,1");
}

}  // TEST_SUITE
