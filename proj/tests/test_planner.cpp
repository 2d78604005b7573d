#include "svsdf/planner.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace svsdf;

namespace
{

    Scene emptyScene(int nx, int ny, double cell, const Pose2 &start, const Pose2 &goal)
    {
        GridSpec grid;
        grid.cell_size = cell;
        grid.origin = Vec2(0.0, 0.0);
        grid.nx = nx;
        grid.ny = ny;
        return Scene::fromOccupancy(grid, std::vector<uint8_t>(grid.cellCount(), 0), start, goal);
    }

    Shape smallLShape()
    {
        return Shape::polygon(
            {{-0.35, -0.35}, {0.65, -0.35}, {0.65, 0.05}, {0.05, 0.05}, {0.05, 0.65}, {-0.35, 0.65}});
    }

    AStarResult straightNodes(const Scene &scene, int row, int ix0, int ix1, int yaw_index)
    {
        AStarResult r;
        r.status = AStarStatus::Success;
        for (int ix = ix0; ix <= ix1; ++ix)
        {
            AStarNode n;
            n.ix = ix;
            n.iy = row;
            n.yaw_index = yaw_index;
            r.nodes.push_back(n);
        }
        return r;
    }

} // namespace

TEST_CASE("midend keeps a collinear node set on the line")
{
    // Binary-exact cell size so the node centers, boundary poses and
    // references coincide bit for bit on the corridor line.
    const Pose2 start(Vec2(0.6875, 3.1875), 0.0);
    const Pose2 goal(Vec2(9.3125, 3.1875), 0.0);
    Scene scene = emptyScene(80, 50, 0.125, start, goal);
    PlannerConfig config = PlannerConfig::defaults();
    const Planner planner(scene, Shape::disk(0.3), config);
    const AStarResult astar = straightNodes(scene, 25, 5, 74, 0);

    const InitialGuess guess = planner.initialGuess(astar);
    MidendObjective objective(config, guess);

    LbfgsConfig lc;
    lc.grad_tolerance = 1e-4;
    lc.max_evaluations = 400;
    double last = std::numeric_limits<double>::infinity();
    bool monotone = true;
    lc.callback = [&](const Eigen::VectorXd &, double value, int)
    {
        monotone = monotone && value <= last + 1e-9;
        last = value;
        return true;
    };
    const LbfgsResult r = lbfgsMinimize(
        [&](const Eigen::VectorXd &x, Eigen::VectorXd &g)
        { return objective(x, g); },
        objective.initialVariables(), lc);
    CHECK(monotone);

    const Trajectory traj = objective.build(r.x);
    // Geometric residuals vanish: the trajectory stays on the corridor line
    // and holds the constant yaw.
    for (int i = 0; i <= 400; ++i)
    {
        const double t = traj.totalDuration() * i / 400.0;
        const Eigen::VectorXd p = traj.evalClamped(t, 0);
        CHECK(std::abs(p(1) - 3.1875) < 1e-6);
        CHECK(std::abs(p(2) - 0.0) < 1e-6);
    }
    const StageCosts costs = objective.costs(r.x);
    CHECK(costs.yaw_residual <= 1e-6);
}

TEST_CASE("midend objective gradient matches finite differences")
{
    const Pose2 start(Vec2(0.55, 0.55), 0.2);
    const Pose2 goal(Vec2(4.05, 3.05), 1.4);
    Scene scene = emptyScene(50, 40, 0.1, start, goal);
    PlannerConfig config = PlannerConfig::defaults();
    config.kappa = 8; // keep the finite-difference loop cheap
    const Planner planner(scene, Shape::disk(0.3), config);

    AStarResult astar;
    astar.status = AStarStatus::Success;
    // A dog-leg node chain with varied yaw channels.
    for (int k = 0; k <= 30; ++k)
    {
        AStarNode n;
        n.ix = 5 + k;
        n.iy = 5 + (k > 12 ? (k - 12) : 0);
        n.yaw_index = (k / 6) % 36;
        astar.nodes.push_back(n);
    }
    const InitialGuess guess = planner.initialGuess(astar);
    MidendObjective objective(config, guess);

    Eigen::VectorXd x = objective.initialVariables();
    // Move off the exact initial guess so no term sits at a kink.
    for (int i = 0; i < x.size(); ++i)
    {
        x(i) += 0.013 * std::sin(3.7 * i + 0.4);
    }
    Eigen::VectorXd grad;
    objective(x, grad);

    const double h = 1e-6;
    Eigen::VectorXd fd(x.size());
    for (int i = 0; i < x.size(); ++i)
    {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        Eigen::VectorXd dummy;
        fd(i) = (objective(xp, dummy) - objective(xm, dummy)) / (2.0 * h);
    }
    CHECK((grad - fd).norm() / std::max(1.0, fd.norm()) < 1e-5);
}

TEST_CASE("yaw residual of a quarter turn enters as 4(1 - cos)")
{
    // |rot(d) - I|_F^2 at d = pi/2 is 4; through the smoothing penalty the
    // contribution is 4 - mu/2.
    const double v = 4.0 * (1.0 - std::cos(M_PI / 2.0));
    CHECK(v == doctest::Approx(4.0));
    const double mu = 0.01;
    CHECK(smoothedL1(v, mu).value == doctest::Approx(4.0 - mu / 2.0));
}

TEST_CASE("backend objective gradient matches finite differences")
{
    PlannerConfig config = PlannerConfig::defaults();
    config.kappa = 8;
    config.gsip.epsilon = 0.05;
    config.metric_steps_per_segment = 24;

    const Eigen::Vector3d head_p(0.0, 0.0, 0.0);
    const Eigen::Vector3d tail_p(4.0, 0.6, 0.6);
    // Obstacle points in the active penalty band around the corridor, plus
    // one deep inside the swept volume.
    std::vector<Vec2> obstacles = {{1.2, 1.05}, {2.4, -0.95}, {3.1, 1.1}, {2.0, 0.15}};
    BackendObjective objective(Shape::disk(0.55), config,
                               BoundaryState(head_p), BoundaryState(tail_p), obstacles);
    objective.setSegments(3);
    objective.setWarmStart(false);

    Eigen::MatrixXd q(3, 2);
    q << 1.3, 2.7,
        0.25, 0.4,
        0.2, 0.45;
    Eigen::VectorXd tau(3);
    tau << durationToTau(0.8), durationToTau(0.9), durationToTau(0.85);
    const Eigen::VectorXd x = objective.pack(q, tau);

    Eigen::VectorXd grad;
    objective(x, grad);
    const double h = 1e-6;
    Eigen::VectorXd fd(x.size());
    for (int i = 0; i < x.size(); ++i)
    {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        Eigen::VectorXd dummy;
        fd(i) = (objective(xp, dummy) - objective(xm, dummy)) / (2.0 * h);
    }
    CHECK((grad - fd).norm() / std::max(1.0, fd.norm()) < 5e-3);
}

TEST_CASE("obstacle penalty activates exactly at the safety threshold")
{
    const double s_thr = 0.366;
    // J_o = 0 above the threshold, s_thr - SVSDF below it.
    CHECK(smoothedL1(s_thr - (s_thr + 0.1), 0.01).value == 0.0);
    const double v = s_thr - (s_thr - 0.2);
    CHECK(v == doctest::Approx(0.2));
    CHECK(smoothedL1(v, 0.01).value == doctest::Approx(0.2 - 0.005));
}

TEST_CASE("backend respects dynamic limits on an obstacle-free scene")
{
    PlannerConfig config = PlannerConfig::defaults();
    config.backend_max_evals = 400;
    config.backend_grad_tol = 1e-4;

    // Start from an aggressive time allocation that violates v_max = 10.
    const Eigen::Vector3d head_p(0.0, 0.0, 0.0);
    const Eigen::Vector3d tail_p(10.0, 0.0, 0.0);
    Eigen::MatrixXd q(3, 2);
    q << 3.3, 6.6,
        0.0, 0.0,
        0.0, 0.0;
    Eigen::VectorXd durations(3);
    durations << 0.25, 0.25, 0.25;

    BackendObjective objective(Shape::disk(0.3), config,
                               BoundaryState(head_p), BoundaryState(tail_p), {});
    objective.setSegments(3);
    Eigen::VectorXd tau(3);
    for (int i = 0; i < 3; ++i)
    {
        tau(i) = durationToTau(durations(i));
    }
    LbfgsConfig lc;
    lc.grad_tolerance = config.backend_grad_tol;
    lc.max_evaluations = config.backend_max_evals;
    const LbfgsResult r = lbfgsMinimize(
        [&](const Eigen::VectorXd &x, Eigen::VectorXd &g)
        { return objective(x, g); },
        objective.pack(q, tau), lc);
    const Trajectory traj = objective.build(r.x);
    double v_peak = 0.0;
    for (int i = 0; i <= 4000; ++i)
    {
        const double t = traj.totalDuration() * i / 4000.0;
        v_peak = std::max(v_peak, traj.evalClamped(t, 1).head<2>().norm());
    }
    CHECK(v_peak <= config.v_max + 1e-3);
}

TEST_CASE("cca verification")
{
    const Shape disk = Shape::disk(0.5);
    SUBCASE("an obstacle inside the swept capsule fails with negative clearance")
    {
        Scene scene = emptyScene(40, 40, 0.1, Pose2(), Pose2());
        scene.obstacle_points = {Vec2(2.0, 0.2)};
        const Trajectory traj =
            mincoConstruct(BoundaryState((Eigen::VectorXd(3) << 0, 0, 0).finished()),
                           BoundaryState((Eigen::VectorXd(3) << 4, 0, 0).finished()),
                           Eigen::MatrixXd(3, 0), Eigen::VectorXd::Constant(1, 2.0));
        const CcaResult r = ccaVerify(traj, scene, disk, 10000);
        CHECK_FALSE(r.pass);
        CHECK(r.min_clearance < 0.0);
    }
    SUBCASE("an obstacle-free scene passes with infinite clearance")
    {
        Scene scene = emptyScene(40, 40, 0.1, Pose2(), Pose2());
        const Trajectory traj =
            mincoConstruct(BoundaryState((Eigen::VectorXd(3) << 0, 0, 0).finished()),
                           BoundaryState((Eigen::VectorXd(3) << 4, 0, 0).finished()),
                           Eigen::MatrixXd(3, 0), Eigen::VectorXd::Constant(1, 2.0));
        const CcaResult r = ccaVerify(traj, scene, disk, 10000);
        CHECK(r.pass);
        CHECK(std::isinf(r.min_clearance));
    }
    SUBCASE("clearance agrees with the shrinking-ball field at obstacle points")
    {
        const Shape l_shape = smallLShape();
        auto traj = std::make_shared<Trajectory>(
            mincoConstruct(BoundaryState((Eigen::VectorXd(3) << 0, 0, 0).finished()),
                           BoundaryState((Eigen::VectorXd(3) << 3, 0.5, M_PI / 2).finished()),
                           Eigen::MatrixXd(3, 0), Eigen::VectorXd::Constant(1, 2.0)));
        const SweepProblem problem(l_shape, Motion::trajectory(traj));
        GsipConfig config;
        config.epsilon = 0.05;
        auto gen = oracles::rng(10);
        for (int i = 0; i < 25; ++i)
        {
            const Vec2 ob = oracles::randomPoint(gen, -1.0, 4.0);
            Scene scene = emptyScene(40, 40, 0.1, Pose2(), Pose2());
            scene.obstacle_points = {ob};
            const CcaResult cca = ccaVerify(*traj, scene, l_shape, 20000);
            const SvsdfResult q = trySvsdfQuery(problem, config, ob);
            if (q.status == QueryStatus::Interior)
            {
                // The verifier samples the conservative metric, which only
                // bounds the exact depth inside the swept volume; the signs
                // still have to agree.
                CHECK(cca.min_clearance < 0.0);
                CHECK(cca.min_clearance >= q.value - 2.0 * config.epsilon);
                continue;
            }
            if (q.status != QueryStatus::Exterior && q.status != QueryStatus::Boundary)
            {
                continue;
            }
            CHECK(std::abs(cca.min_clearance - q.value) <= 2.0 * config.epsilon);
        }
    }
}

TEST_CASE("plan pipeline on an empty map succeeds end to end")
{
    const Pose2 start(Vec2(1.05, 1.05), 0.0);
    const Pose2 goal(Vec2(6.05, 5.05), 0.8);
    Scene scene = emptyScene(72, 64, 0.1, start, goal);
    PlannerConfig config = PlannerConfig::defaults();
    const Planner planner(scene, Shape::disk(0.3), config);
    const PlanResult result = planner.plan();
    CHECK(result.astar.status == AStarStatus::Success);
    REQUIRE(result.final != nullptr);
    CHECK(result.report.success);
    CHECK(result.report.cca_pass);
    CHECK(std::isinf(result.report.min_clearance));
    // Endpoints are met exactly.
    CHECK((result.final->eval(0.0, 0).head<2>() - start.translation).norm() < 1e-9);
    CHECK((result.final->eval(result.final->totalDuration(), 0).head<2>() -
           goal.translation)
              .norm() < 1e-9);
}

TEST_CASE("plan pipeline avoids a slot scene continuously")
{
    // Yaw-gated slot: the L-shape has to rotate through the gap.
    const double cell = 0.1;
    GridSpec grid;
    grid.cell_size = cell;
    grid.origin = Vec2(0.0, 0.0);
    grid.nx = 70;
    grid.ny = 70;
    std::vector<uint8_t> occ(grid.cellCount(), 0);
    const int wall_y = 35;
    // Slot width 2.2 m: wide enough for the safety threshold on both sides.
    for (int ix = 0; ix < grid.nx; ++ix)
    {
        if (ix < 25 || ix > 47)
        {
            for (int dy = -1; dy <= 1; ++dy)
            {
                occ[grid.index(ix, wall_y + dy)] = 1;
            }
        }
    }
    Scene scene = Scene::fromOccupancy(grid, std::move(occ),
                                       Pose2(Vec2(3.05, 1.55), 0.0),
                                       Pose2(Vec2(3.55, 5.85), 0.0));
    PlannerConfig config = PlannerConfig::defaults();
    const Planner planner(scene, smallLShape(), config);
    const PlanResult result = planner.plan();
    REQUIRE(result.astar.status == AStarStatus::Success);
    const CcaResult cca = ccaVerify(*result.final, scene, smallLShape(), 20000);
    CHECK(cca.pass);
    CHECK(cca.min_clearance > 0.0);
}

TEST_CASE("walled map reports no path")
{
    const double cell = 0.1;
    GridSpec grid;
    grid.cell_size = cell;
    grid.origin = Vec2(0.0, 0.0);
    grid.nx = 40;
    grid.ny = 40;
    std::vector<uint8_t> occ(grid.cellCount(), 0);
    for (int ix = 0; ix < grid.nx; ++ix)
    {
        occ[grid.index(ix, 20)] = 1;
    }
    Scene scene = Scene::fromOccupancy(grid, std::move(occ),
                                       Pose2(Vec2(2.05, 1.05), 0.0),
                                       Pose2(Vec2(2.05, 3.05), 0.0));
    const Planner planner(scene, Shape::disk(0.3), PlannerConfig::defaults());
    const PlanResult result = planner.plan();
    CHECK(result.astar.status == AStarStatus::NoPath);
    CHECK(result.report.failure == "no_path");
    CHECK_FALSE(result.report.success);
}

TEST_CASE("config overrides by key")
{
    PlannerConfig config = PlannerConfig::defaults();
    CHECK(config.set("lambda_o", 123.0));
    CHECK(config.lambda_o == 123.0);
    CHECK(config.set("s_thr", 0.5));
    CHECK(config.gsip.epsilon == doctest::Approx(0.25));
    CHECK_FALSE(config.set("nonsense", 1.0));
}
