#include "svsdf/optim.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace svsdf;

TEST_CASE("smoothed L1 branch values")
{
    CHECK(smoothedL1(-1.0, 0.01).value == 0.0);
    CHECK(smoothedL1(-1.0, 0.01).derivative == 0.0);
    const double mu = 0.37;
    CHECK(smoothedL1(mu, mu).value == doctest::Approx(mu / 2.0).epsilon(1e-15));
    CHECK(smoothedL1(1.0, 0.01).value == doctest::Approx(0.995).epsilon(1e-15));

    auto gen = oracles::rng(1);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    for (int i = 0; i < 1000; ++i)
    {
        const double x = ux(gen);
        const SmoothedL1 s = smoothedL1(x, mu);
        if (x <= 0.0)
        {
            CHECK(s.value == 0.0);
        }
        else if (x <= mu)
        {
            CHECK(s.value == doctest::Approx((mu - 0.5 * x) * std::pow(x / mu, 3)).epsilon(1e-12));
        }
        else
        {
            CHECK(s.value == doctest::Approx(x - 0.5 * mu).epsilon(1e-12));
        }
    }
}

TEST_CASE("smoothed L1 is C2 at the branch points")
{
    const double mu = 0.01;
    const auto value = [&](double x)
    { return smoothedL1(x, mu).value; };
    const auto deriv = [&](double x)
    { return smoothedL1(x, mu).derivative; };

    // Independent middle-branch derivatives, differentiated by hand from
    // (mu - x/2)(x/mu)^3:
    //   f'(x)  = x^2 (3 mu - 2 x) / mu^3
    //   f''(x) = 6 x (mu - x) / mu^3
    const auto mid_d1 = [&](double x)
    { return x * x * (3.0 * mu - 2.0 * x) / (mu * mu * mu); };
    const auto mid_d2 = [&](double x)
    { return 6.0 * x * (mu - x) / (mu * mu * mu); };

    // Value, first and second derivatives agree across both branch points.
    CHECK(std::abs(value(0.0) - 0.0) < 1e-9);
    CHECK(std::abs(value(mu) - (mu - 0.5 * mu)) < 1e-9);
    CHECK(std::abs(deriv(0.0) - 0.0) < 1e-9);
    CHECK(std::abs(mid_d1(0.0) - 0.0) < 1e-9);
    CHECK(std::abs(mid_d1(mu) - 1.0) < 1e-9);
    CHECK(std::abs(mid_d2(0.0) - 0.0) < 1e-9); // left branch second derivative: 0
    CHECK(std::abs(mid_d2(mu) - 0.0) < 1e-9);  // right branch second derivative: 0

    // The hand formulas match the implementation across the middle region.
    for (double x : {0.1 * mu, 0.35 * mu, 0.5 * mu, 0.9 * mu})
    {
        CHECK(std::abs(deriv(x) - mid_d1(x)) < 1e-12);
        const double fd2 = (deriv(x + 1e-9 * mu) - deriv(x - 1e-9 * mu)) / (2e-9 * mu);
        CHECK(std::abs(fd2 - mid_d2(x)) / std::max(1.0, std::abs(mid_d2(x))) < 1e-3);
    }
    // Derivative itself against finite differences of the value.
    auto gen = oracles::rng(77);
    std::uniform_real_distribution<double> ux(-0.05, 0.05);
    for (int i = 0; i < 400; ++i)
    {
        const double x = ux(gen);
        const double fd = oracles::centralDifference(value, x, 1e-8);
        CHECK(std::abs(deriv(x) - fd) < 1e-5);
    }
}

TEST_CASE("lbfgs solves a convex quadratic")
{
    const Eigen::VectorXd a = (Eigen::VectorXd(4) << 1.0, -2.0, 3.0, 0.5).finished();
    const Objective f = [&](const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        g = 2.0 * (x - a);
        return (x - a).squaredNorm();
    };
    LbfgsConfig cfg;
    cfg.grad_tolerance = 1e-10;
    const LbfgsResult r = lbfgsMinimize(f, Eigen::VectorXd::Zero(4), cfg);
    CHECK(r.status == LbfgsStatus::Converged);
    CHECK((r.x - a).norm() < 1e-8);
}

TEST_CASE("lbfgs solves Rosenbrock from the standard start")
{
    const Objective f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        g.resize(2);
        g(0) = -2.0 * a - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    LbfgsConfig cfg;
    cfg.grad_tolerance = 1e-9;
    cfg.max_iterations = 500;
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    const LbfgsResult r = lbfgsMinimize(f, x0, cfg);
    CHECK(r.status == LbfgsStatus::Converged);
    CHECK((r.x - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-6);
}

TEST_CASE("lbfgs returns immediately on a stationary start")
{
    int calls = 0;
    const Objective f = [&](const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        ++calls;
        g = Eigen::VectorXd::Zero(x.size());
        return 3.0;
    };
    const LbfgsResult r = lbfgsMinimize(f, Eigen::VectorXd::Ones(3));
    CHECK(r.status == LbfgsStatus::Converged);
    CHECK(r.iterations == 0);
    CHECK(calls == 1);
    CHECK(r.x == Eigen::VectorXd::Ones(3));
}

TEST_CASE("lbfgs rejects a non-finite start")
{
    const Objective f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        g = x;
        return std::numeric_limits<double>::quiet_NaN();
    };
    const LbfgsResult r = lbfgsMinimize(f, Eigen::VectorXd::Zero(2));
    CHECK(r.status == LbfgsStatus::InvalidInput);
}

TEST_CASE("lbfgs terminates quickly on a strictly convex quadratic")
{
    // Fixed SPD Hessian with moderate conditioning, n = 6, memory 8.
    const int n = 6;
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    auto gen = oracles::rng(13);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int i = 0; i < n; ++i)
    {
        for (int j = 0; j < i; ++j)
        {
            A(i, j) = A(j, i) = u(gen);
        }
        A(i, i) = 2.0 + i * 0.7;
    }
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(n, -1.0, 2.0);
    const Objective f = [&](const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        g = A * x - b;
        return 0.5 * x.dot(A * x) - b.dot(x);
    };
    LbfgsConfig cfg;
    cfg.grad_tolerance = 1e-10;
    const LbfgsResult r = lbfgsMinimize(f, Eigen::VectorXd::Zero(n), cfg);
    CHECK(r.status == LbfgsStatus::Converged);
    CHECK(r.iterations <= n + 5);
    const Eigen::VectorXd x_star = A.ldlt().solve(b);
    CHECK((r.x - x_star).norm() < 1e-8);
}

TEST_CASE("objective is non-increasing over accepted iterates")
{
    const Objective f = [](const Eigen::VectorXd &x, Eigen::VectorXd &g)
    {
        const double a = 1.0 - x(0);
        const double b = x(1) - x(0) * x(0);
        g.resize(2);
        g(0) = -2.0 * a - 400.0 * x(0) * b;
        g(1) = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    double last = std::numeric_limits<double>::infinity();
    bool monotone = true;
    LbfgsConfig cfg;
    cfg.callback = [&](const Eigen::VectorXd &, double value, int)
    {
        monotone = monotone && value <= last + 1e-12;
        last = value;
        return true;
    };
    Eigen::VectorXd x0(2);
    x0 << -1.2, 1.0;
    lbfgsMinimize(f, x0, cfg);
    CHECK(monotone);
}
