#include "svsdf/io.hpp"

#include "oracles.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace svsdf;
using nlohmann::json;

namespace
{

    struct TempDir
    {
        std::filesystem::path path;
        TempDir()
        {
            path = std::filesystem::temp_directory_path() /
                   ("svsdf_io_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()++));
            std::filesystem::create_directories(path);
        }
        ~TempDir() { std::filesystem::remove_all(path); }
        std::string file(const std::string &name) const { return (path / name).string(); }
        static int &counter()
        {
            static int c = 0;
            return c;
        }
    };

} // namespace

TEST_CASE("shape json round trip")
{
    std::vector<Shape> shapes;
    shapes.push_back(Shape::disk(0.7));
    shapes.push_back(Shape::box(Vec2(0.4, 0.9)));
    shapes.push_back(Shape::polygon(
        {{-0.75, -0.75}, {1.25, -0.75}, {1.25, 0.25}, {0.25, 0.25}, {0.25, 1.25}, {-0.75, 1.25}}));
    shapes.push_back(Shape::scalingDisk(0.3, 1.1));
    shapes.push_back(Shape::unionOf({Shape::disk(0.5), Shape::box(Vec2(0.2, 0.6))},
                                    {Pose2(Vec2(0.3, 0.0), 0.0), Pose2(Vec2(-0.2, 0.1), 0.7)}));
    auto gen = oracles::rng(40);
    for (const Shape &s : shapes)
    {
        const Shape back = io::shapeFromJson(io::shapeToJson(s));
        CHECK(back.kind() == s.kind());
        CHECK(back.boundingRadius() == doctest::Approx(s.boundingRadius()).epsilon(1e-12));
        for (int i = 0; i < 200; ++i)
        {
            const Vec2 p = oracles::randomPoint(gen, -2.0, 2.0);
            CHECK(back.sdf(p, 0.4) == doctest::Approx(s.sdf(p, 0.4)).epsilon(1e-12));
        }
    }
}

TEST_CASE("unknown shape kind is a parse error")
{
    CHECK_THROWS_AS(io::shapeFromJson(json{{"kind", "pentagram"}}), io::IoError);
}

TEST_CASE("scene json round trip preserves occupancy and endpoints")
{
    GridSpec grid;
    grid.cell_size = 0.25;
    grid.origin = Vec2(-1.0, 2.0);
    grid.nx = 13;
    grid.ny = 9;
    std::vector<uint8_t> occ(grid.cellCount(), 0);
    auto gen = oracles::rng(3);
    std::uniform_int_distribution<int> u(0, grid.cellCount() - 1);
    for (int i = 0; i < 20; ++i)
    {
        occ[u(gen)] = 1;
    }
    const Scene scene = Scene::fromOccupancy(grid, occ, Pose2(Vec2(0.1, 2.3), 0.4),
                                             Pose2(Vec2(1.2, 3.4), -0.9));
    const Scene back = io::sceneFromJson(io::sceneToJson(scene));
    CHECK(back.grid.nx == scene.grid.nx);
    CHECK(back.grid.ny == scene.grid.ny);
    CHECK(back.occupancy == scene.occupancy);
    CHECK(back.obstacle_points.size() == scene.obstacle_points.size());
    CHECK((back.start.translation - scene.start.translation).norm() == 0.0);
    CHECK(back.goal.yaw == scene.goal.yaw);
}

TEST_CASE("pgm scenes")
{
    TempDir dir;
    SUBCASE("all-white map has no obstacle points")
    {
        std::vector<uint8_t> gray(30 * 20, 255);
        io::writePgm(dir.file("white.pgm"), gray, 30, 20);
        const Scene scene = io::loadScene(dir.file("white.pgm"));
        CHECK(scene.obstacle_points.empty());
        CHECK(scene.grid.nx == 30);
        CHECK(scene.grid.ny == 20);
    }
    SUBCASE("a single black pixel becomes one obstacle point at its center")
    {
        std::vector<uint8_t> gray(30 * 20, 255);
        // Row 3 from the top, column 7; the first row is the top of the map.
        gray[3 * 30 + 7] = 0;
        io::writePgm(dir.file("dot.pgm"), gray, 30, 20);
        const Scene scene = io::loadScene(dir.file("dot.pgm"));
        REQUIRE(scene.obstacle_points.size() == 1);
        const Vec2 expected = scene.grid.cellCenter(7, 20 - 1 - 3);
        CHECK((scene.obstacle_points[0] - expected).norm() < 1e-12);
    }
    SUBCASE("scene round trips through pgm")
    {
        GridSpec grid;
        grid.cell_size = 0.1;
        grid.origin = Vec2(0.0, 0.0);
        grid.nx = 17;
        grid.ny = 11;
        std::vector<uint8_t> occ(grid.cellCount(), 0);
        occ[grid.index(3, 4)] = occ[grid.index(16, 0)] = occ[grid.index(0, 10)] = 1;
        const Scene scene = Scene::fromOccupancy(grid, occ, Pose2(), Pose2());
        io::saveScene(scene, dir.file("map.pgm"));
        const Scene back = io::loadScene(dir.file("map.pgm"));
        CHECK(back.occupancy == scene.occupancy);
    }
}

TEST_CASE("json rect obstacles rasterize to the exact cell count")
{
    json j{{"cell_size", 0.5},
           {"origin", json::array({0.0, 0.0})},
           {"nx", 20},
           {"ny", 20},
           {"rects", json::array({json{{"min", json::array({1.0, 1.0})},
                                       {"max", json::array({3.0, 2.0})}}})},
           {"start", json{{"position", json::array({0.5, 0.5})}, {"yaw", 0.0}}},
           {"goal", json{{"position", json::array({9.0, 9.0})}, {"yaw", 0.0}}}};
    const Scene scene = io::sceneFromJson(j);
    // Cell centers inside [1,3]x[1,2] at 0.5 m cells: x in {1.25,...,2.75}
    // (4 columns), y in {1.25, 1.75} (2 rows).
    CHECK(scene.obstacle_points.size() == 8);
}

TEST_CASE("malformed scene json raises a parse error")
{
    TempDir dir;
    {
        std::ofstream out(dir.file("broken.json"));
        out << "{ \"cell_size\": 0.1, ";
    }
    CHECK_THROWS_AS(io::loadScene(dir.file("broken.json")), io::IoError);
    CHECK_THROWS_AS(io::loadScene(dir.file("missing.json")), io::IoError);
}

TEST_CASE("field files round trip")
{
    TempDir dir;
    GridSpec grid;
    grid.cell_size = 0.2;
    grid.origin = Vec2(-1.0, -2.0);
    grid.nx = 12;
    grid.ny = 7;
    std::vector<double> values(grid.cellCount());
    for (int i = 0; i < grid.cellCount(); ++i)
    {
        values[i] = std::sin(0.3 * i) * 2.0;
    }
    io::writeField(dir.file("field"), grid, values);
    const io::FieldFile back = io::readField(dir.file("field"));
    CHECK(back.grid.nx == grid.nx);
    CHECK(back.grid.ny == grid.ny);
    CHECK(back.grid.cell_size == doctest::Approx(grid.cell_size));
    for (int i = 0; i < grid.cellCount(); ++i)
    {
        CHECK(back.values[i] == doctest::Approx(values[i]).epsilon(1e-6));
    }
    CHECK(std::filesystem::exists(dir.file("field.pgm")));
}

TEST_CASE("trajectory json round trip is exact")
{
    auto gen = oracles::rng(9);
    std::uniform_real_distribution<double> up(-2.0, 2.0);
    Eigen::MatrixXd q(3, 2);
    for (int i = 0; i < q.size(); ++i)
    {
        q(i / 2, i % 2) = up(gen);
    }
    const Trajectory traj = mincoConstruct(
        BoundaryState((Eigen::VectorXd(3) << 0, 0, 0).finished()),
        BoundaryState((Eigen::VectorXd(3) << 3, 1, 0.5).finished()),
        q, (Eigen::VectorXd(3) << 0.8, 1.1, 0.9).finished());
    const Trajectory back = io::trajectoryFromJson(io::trajectoryToJson(traj));
    CHECK(back.segments() == traj.segments());
    CHECK((back.coeffs() - traj.coeffs()).cwiseAbs().maxCoeff() < 1e-9);
    for (double t : {0.0, 0.5, 1.3, 2.7})
    {
        CHECK((back.evalClamped(t, 0) - traj.evalClamped(t, 0)).norm() < 1e-9);
    }
}

TEST_CASE("trajectory csv export samples the requested step")
{
    TempDir dir;
    const Trajectory traj = mincoConstruct(
        BoundaryState((Eigen::VectorXd(3) << 0, 0, 0).finished()),
        BoundaryState((Eigen::VectorXd(3) << 1, 0, 0).finished()),
        Eigen::MatrixXd(3, 0), Eigen::VectorXd::Constant(1, 1.0));
    io::writeTrajectoryCsv(dir.file("traj.csv"), traj, 0.25);
    std::ifstream in(dir.file("traj.csv"));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,x,y,yaw,vx,vy,yaw_rate");
    int rows = 0;
    while (std::getline(in, line))
    {
        ++rows;
    }
    CHECK(rows == 5); // 0, .25, .5, .75, 1.0
}

TEST_CASE("motion specs parse")
{
    const Motion linear = io::motionFromJson(
        json{{"type", "linear"},
             {"from", json{{"position", json::array({0.0, 0.0})}, {"yaw", 0.0}}},
             {"to", json{{"position", json::array({4.0, 0.0})}, {"yaw", 1.0}}},
             {"t_start", 0.0},
             {"t_end", 2.0}});
    CHECK(linear.poseAt(1.0).translation.isApprox(Vec2(2.0, 0.0), 1e-12));
    CHECK(linear.poseAt(1.0).yaw == doctest::Approx(0.5));
    CHECK_THROWS_AS(io::motionFromJson(json{{"type", "spline"}}), io::IoError);
}

TEST_CASE("report json carries the planner outcome")
{
    PlanReport report;
    report.success = true;
    report.cca_pass = true;
    report.min_clearance = std::numeric_limits<double>::infinity();
    report.wall_time_ms = 12.5;
    const json j = io::reportToJson(report);
    CHECK(j.at("success").get<bool>());
    CHECK(j.at("min_clearance").is_null()); // non-finite encodes as null
    json a = j, b = j;
    a.erase("wall_time_ms");
    b.erase("wall_time_ms");
    CHECK(a.dump() == b.dump());
}
