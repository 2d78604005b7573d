#include "svsdf/sweep_metric.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace svsdf;

namespace
{

    Shape lShape()
    {
        return Shape::polygon(
            {{-0.75, -0.75}, {1.25, -0.75}, {1.25, 0.25}, {0.25, 0.25}, {0.25, 1.25}, {-0.75, 1.25}});
    }

    SweepProblem rotatingLProblem()
    {
        // Translation plus a quarter-turn.
        return SweepProblem(lShape(),
                            Motion::linear(Pose2(0.0, 0.0, 0.0), Pose2(3.0, 0.5, M_PI / 2.0)));
    }

} // namespace

TEST_CASE("metric for a static disk")
{
    const SweepProblem problem(Shape::disk(1.0), Motion::constant(Pose2()));
    const MetricResult r = metricG(problem, Vec2(3.0, 0.0));
    CHECK(r.g_value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.gradient.isApprox(Vec2(1.0, 0.0), 1e-9));
    CHECK(r.local_point.isApprox(Vec2(3.0, 0.0), 1e-9));
}

TEST_CASE("metric for a translating disk")
{
    const SweepProblem problem(Shape::disk(1.0),
                               Motion::linear(Pose2(0.0, 0.0, 0.0), Pose2(4.0, 0.0, 0.0)));
    SUBCASE("above the middle of the sweep")
    {
        const Vec2 p(2.0, 3.0);
        const auto oracle = oracles::denseTimeMinimum(problem, p);
        CHECK(oracle.value == doctest::Approx(2.0).epsilon(1e-6));
        const MetricResult r = metricG(problem, p);
        CHECK(r.g_value == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(r.t_star == doctest::Approx(0.5).epsilon(1e-6));
    }
    SUBCASE("inside the sweep")
    {
        const Vec2 p(2.0, 0.0);
        const auto oracle = oracles::denseTimeMinimum(problem, p);
        CHECK(oracle.value == doctest::Approx(-1.0).epsilon(1e-6));
        const MetricResult r = metricG(problem, p);
        CHECK(r.g_value == doctest::Approx(-1.0).epsilon(1e-9));
        CHECK(r.t_star == doctest::Approx(0.5).epsilon(1e-4));
    }
}

TEST_CASE("rotating L metric matches dense time sampling")
{
    const SweepProblem problem = rotatingLProblem();
    auto gen = oracles::rng(55);
    for (int i = 0; i < 100; ++i)
    {
        const Vec2 p = oracles::randomPoint(gen, -2.0, 5.0);
        const auto oracle = oracles::denseTimeMinimum(problem, p, 1e-4);
        const MetricResult r = metricG(problem, p);
        CHECK(r.g_value <= oracle.value + 1e-9); // never above the scan
        CHECK(std::abs(r.g_value - oracle.value) < 1e-3);
    }
}

TEST_CASE("metric ties break toward the smallest time")
{
    // Symmetric out-and-back sweep: the same pose occurs twice.
    const SweepProblem problem(Shape::disk(1.0), Motion::constant(Pose2(), 0.0, 1.0));
    const MetricResult r = metricG(problem, Vec2(2.0, 0.0));
    CHECK(r.t_star == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("pruned search equals unpruned search")
{
    std::vector<SweepProblem> problems;
    problems.push_back(rotatingLProblem());
    problems.emplace_back(Shape::disk(1.0),
                          Motion::linear(Pose2(0.0, 0.0, 0.0), Pose2(4.0, 0.0, 0.0)));
    problems.emplace_back(Shape::box(Vec2(0.8, 0.3)),
                          Motion::linear(Pose2(-1.0, -1.0, 0.3), Pose2(2.0, 2.0, 2.4)));
    problems.emplace_back(Shape::scalingDisk(0.4, 1.2),
                          Motion::linear(Pose2(0.0, 0.0, 0.0), Pose2(3.0, 0.0, 0.0)));
    auto gen = oracles::rng(7);
    for (const SweepProblem &problem : problems)
    {
        for (int i = 0; i < 200; ++i)
        {
            const Vec2 p = oracles::randomPoint(gen, -3.0, 6.0);
            const MetricResult pruned = metricG(problem, p, true);
            const MetricResult full = metricG(problem, p, false);
            CHECK(std::abs(pruned.g_value - full.g_value) < 1e-9);
            CHECK(std::abs(pruned.t_star - full.t_star) < 1e-6);
        }
    }
}

TEST_CASE("metric lower bound is sound")
{
    const SweepProblem problem = rotatingLProblem();
    auto gen = oracles::rng(70);
    for (int i = 0; i < 500; ++i)
    {
        const Vec2 p = oracles::randomPoint(gen, -3.0, 6.0);
        CHECK(metricLowerBound(problem, p) <= metricG(problem, p).g_value + 1e-12);
    }
}

TEST_CASE("body speed bound certifies the time Lipschitz constant")
{
    SUBCASE("constant motion has zero rate")
    {
        const SweepProblem problem(Shape::disk(1.0), Motion::constant(Pose2()));
        CHECK(bodySpeedBound(problem) == doctest::Approx(0.0));
    }
    SUBCASE("pure translation equals the speed")
    {
        const SweepProblem problem(Shape::disk(1.0),
                                   Motion::linear(Pose2(0.0, 0.0, 0.0), Pose2(4.0, 0.0, 0.0),
                                                  0.0, 2.0));
        CHECK(bodySpeedBound(problem) == doctest::Approx(2.0).epsilon(1e-12));
    }
    SUBCASE("translation plus rotation never violates the certificate")
    {
        const SweepProblem problem = rotatingLProblem();
        auto gen = oracles::rng(3);
        std::uniform_real_distribution<double> ut(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial)
        {
            const Vec2 p = oracles::randomPoint(gen, -2.0, 5.0);
            const double L_point = bodySpeedBound(problem, p);
            const double L_region = bodySpeedBound(problem);
            CHECK(L_point <= L_region + 1e-9);
            for (int i = 0; i < 5000; ++i)
            {
                const double t1 = ut(gen);
                const double t2 = ut(gen);
                const double d1 = problem.distanceAt(p, t1);
                const double d2 = problem.distanceAt(p, t2);
                CHECK(std::abs(d1 - d2) <= L_point * std::abs(t1 - t2) + 1e-9);
            }
        }
    }
}

TEST_CASE("envelope gradient matches finite differences of g")
{
    const SweepProblem problem = rotatingLProblem();
    auto gen = oracles::rng(29);
    int checked = 0;
    for (int trial = 0; trial < 500 && checked < 100; ++trial)
    {
        const Vec2 p = oracles::randomPoint(gen, -2.0, 5.0);
        // Unique-minimizer filter: skip points where a second local minimum
        // matches the best value within 1e-6 at a distant time.
        const auto minima = oracles::denseLocalMinima(problem, p, 1e-3);
        double best = std::numeric_limits<double>::infinity();
        for (const auto &m : minima)
        {
            best = std::min(best, m.value);
        }
        bool ambiguous = false;
        double best_t = 0.0;
        for (const auto &m : minima)
        {
            if (m.value < best + 1e-6)
            {
                best_t = m.t;
            }
        }
        for (const auto &m : minima)
        {
            if (m.value < best + 1e-6 && std::abs(m.t - best_t) > 10.0 * problem.descentTolerance())
            {
                ambiguous = true;
            }
        }
        if (ambiguous)
        {
            continue;
        }
        const MetricResult r = metricG(problem, p);
        const double h = 1e-5;
        const Vec2 fd((metricG(problem, p + Vec2(h, 0)).g_value -
                       metricG(problem, p - Vec2(h, 0)).g_value) /
                          (2 * h),
                      (metricG(problem, p + Vec2(0, h)).g_value -
                       metricG(problem, p - Vec2(0, h)).g_value) /
                          (2 * h));
        // Skip body-frame SDF creases, where no gradient exists.
        if (std::abs(fd.norm() - 1.0) > 1e-4)
        {
            continue;
        }
        ++checked;
        CHECK((r.gradient - fd).norm() < 1e-3);
    }
    CHECK(checked >= 50);
}

TEST_CASE("empty time domain is rejected")
{
    CHECK_THROWS_AS(Motion::constant(Pose2(), 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SweepProblem(Shape::disk(1.0), Motion::constant(Pose2()), 0),
                    std::invalid_argument);
}

TEST_CASE("pose at time handles domain and clamping")
{
    const Motion m = Motion::linear(Pose2(0.0, 0.0, 0.0), Pose2(4.0, 0.0, 0.0), 0.0, 1.0);
    CHECK(m.poseAt(0.5).translation.isApprox(Vec2(2.0, 0.0), 1e-12));
    CHECK_THROWS_AS(m.poseAt(1.5), std::domain_error);
    CHECK(m.poseAt(1.5, true).translation.isApprox(Vec2(4.0, 0.0), 1e-12));
    const Motion c = Motion::constant(Pose2(1.0, 2.0, 0.3));
    CHECK(c.poseAt(0.7).translation.isApprox(Vec2(1.0, 2.0), 1e-12));
}
