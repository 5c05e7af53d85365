#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "qkr/powell.hpp"

using Eigen::VectorXd;
using qkr::PowellOptions;
using qkr::PowellResult;

TEST_CASE("quadratic bowls are solved to high accuracy") {
    // Diagonal bowl.
    auto bowl = [](const VectorXd& x) {
        double s = 0.0;
        for (int i = 0; i < x.size(); ++i) s += (i + 1) * (x[i] - 1.5) * (x[i] - 1.5);
        return s;
    };
    VectorXd x0 = VectorXd::Zero(5);
    PowellResult res = qkr::powell_minimize(bowl, x0, PowellOptions{});
    CHECK(res.converged);
    CHECK((res.x - VectorXd::Constant(5, 1.5)).norm() < 1e-6);
    CHECK(res.f < 1e-12);

    // Strongly coupled bowl: f = xT A x with A = I + outer product.
    const int n = 8;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    VectorXd u = VectorXd::LinSpaced(n, 1.0, 2.0);
    A += 3.0 * u * u.transpose();
    VectorXd target = VectorXd::LinSpaced(n, -1.0, 1.0);
    auto coupled = [&](const VectorXd& x) {
        const VectorXd d = x - target;
        return d.dot(A * d);
    };
    res = qkr::powell_minimize(coupled, VectorXd::Zero(n), PowellOptions{});
    CHECK(res.converged);
    CHECK((res.x - target).norm() < 1e-6);
}

TEST_CASE("banana valley is followed to the minimum") {
    auto rosenbrock = [](const VectorXd& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    PowellOptions opt;
    opt.max_cycles = 500;
    const PowellResult res = qkr::powell_minimize(rosenbrock, x0, opt);
    CHECK(res.converged);
    CHECK(std::fabs(res.x[0] - 1.0) < 1e-5);
    CHECK(std::fabs(res.x[1] - 1.0) < 1e-5);
}

TEST_CASE("a flat objective returns the starting point unchanged") {
    auto flat = [](const VectorXd&) { return 4.25; };
    VectorXd x0(3);
    x0 << 0.3, -0.7, 2.0;
    const PowellResult res = qkr::powell_minimize(flat, x0, PowellOptions{});
    CHECK((res.x - x0).norm() == 0.0);
    CHECK(res.f == 4.25);
    CHECK(res.converged);
}

TEST_CASE("trace decreases and counts match") {
    auto bowl = [](const VectorXd& x) { return x.squaredNorm() + 1.0; };
    const PowellResult res = qkr::powell_minimize(bowl, VectorXd::Constant(4, 2.0), PowellOptions{});
    CHECK(res.converged);
    CHECK(res.evaluations > 0);
    CHECK(res.cycles >= 1);
    REQUIRE(!res.trace.empty());
    for (size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].cost <= res.trace[i - 1].cost + 1e-15);
    CHECK(res.trace.back().cost == res.f);
}

TEST_CASE("cycle budget is respected") {
    auto rosenbrock = [](const VectorXd& x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return a * a + 100.0 * b * b;
    };
    VectorXd x0(2);
    x0 << -1.2, 1.0;
    PowellOptions opt;
    opt.max_cycles = 3;
    const PowellResult res = qkr::powell_minimize(rosenbrock, x0, opt);
    CHECK(res.cycles <= 3);
    CHECK_FALSE(res.converged);
    CHECK(res.f < rosenbrock(x0));  // still made progress
}

TEST_CASE("invalid inputs are rejected") {
    auto bowl = [](const VectorXd& x) { return x.squaredNorm(); };
    CHECK_THROWS_AS(qkr::powell_minimize(bowl, VectorXd(), PowellOptions{}),
                    std::invalid_argument);
    PowellOptions opt;
    opt.max_cycles = 0;
    CHECK_THROWS_AS(qkr::powell_minimize(bowl, VectorXd::Zero(2), opt), std::invalid_argument);
}
