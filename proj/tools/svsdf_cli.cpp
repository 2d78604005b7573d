#include "svsdf/bench.hpp"
#include "svsdf/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace
{

    constexpr int kExitOk = 0;
    constexpr int kExitFieldFailures = 2;
    constexpr int kExitNoPath = 3;
    constexpr int kExitIoError = 4;

    struct Overrides
    {
        std::vector<std::string> entries;

        void apply(svsdf::PlannerConfig &config, svsdf::BenchParams *bench) const
        {
            for (const std::string &kv : entries)
            {
                const size_t eq = kv.find('=');
                if (eq == std::string::npos)
                {
                    throw CLI::ValidationError("--set expects key=value, got " + kv);
                }
                const std::string key = kv.substr(0, eq);
                const double value = std::stod(kv.substr(eq + 1));
                bool known = config.set(key, value);
                if (bench != nullptr)
                {
                    known = bench->set(key, value) || known;
                }
                if (!known)
                {
                    throw CLI::ValidationError("unknown --set key: " + key);
                }
            }
        }
    };

    svsdf::GridSpec fitGrid(const svsdf::SweepProblem &problem, double cell_size, double pad)
    {
        svsdf::Vec2 lo = problem.gridTranslations().front();
        svsdf::Vec2 hi = lo;
        for (const svsdf::Vec2 &t : problem.gridTranslations())
        {
            lo = lo.cwiseMin(t);
            hi = hi.cwiseMax(t);
        }
        const double inflate = problem.boundingRadius() + pad;
        lo.array() -= inflate;
        hi.array() += inflate;
        svsdf::GridSpec grid;
        grid.cell_size = cell_size;
        grid.origin = lo;
        grid.nx = static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_size));
        grid.ny = static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_size));
        return grid;
    }

    svsdf::GridSpec gridFromFlags(const svsdf::SweepProblem &problem, double cell_size,
                                  std::vector<double> origin, int nx, int ny, double pad)
    {
        if (nx > 0 && ny > 0 && origin.size() == 2)
        {
            svsdf::GridSpec grid;
            grid.cell_size = cell_size;
            grid.origin = svsdf::Vec2(origin[0], origin[1]);
            grid.nx = nx;
            grid.ny = ny;
            return grid;
        }
        return fitGrid(problem, cell_size, pad);
    }

    void writeCsv(const std::string &path, const svsdf::BenchResult &result)
    {
        std::ofstream out(path);
        out << "trial,planned,success,cca_pass,min_clearance,wall_time_ms,failure\n";
        for (const svsdf::TrialResult &t : result.trials)
        {
            out << t.trial << ',' << t.planned << ',' << t.success << ',' << t.cca_pass << ','
                << t.min_clearance << ',' << t.wall_time_ms << ',' << t.failure << '\n';
        }
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"swept-volume SDF fields and continuously collision-free planning"};
    app.require_subcommand(1);

    std::string shape_path, scene_path, motion_path, out_dir = ".", traj_path;
    std::string warm_flag = "on";
    Overrides overrides;
    double cell_size = 0.08;
    std::vector<double> origin;
    int nx = 0, ny = 0;
    int time_samples = 10000;
    int trials = 50;
    int workers = 1;
    uint64_t seed = 1;
    bool no_backend = false, no_midend = false;

    const auto addCommon = [&](CLI::App *cmd, bool with_scene, bool with_motion)
    {
        cmd->add_option("--shape", shape_path, "shape JSON file")->required();
        if (with_scene)
        {
            cmd->add_option("--scene", scene_path, "scene file (PGM or JSON)")->required();
        }
        if (with_motion)
        {
            cmd->add_option("--motion", motion_path, "motion spec JSON")->required();
        }
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--set", overrides.entries, "config override key=value");
    };

    CLI::App *grid_cmd = app.add_subcommand("svsdf-grid", "evaluate the swept-volume SDF on a grid");
    addCommon(grid_cmd, false, true);
    grid_cmd->add_option("--cell-size", cell_size, "grid cell size");
    grid_cmd->add_option("--origin", origin, "grid origin x y")->expected(2);
    grid_cmd->add_option("--nx", nx, "grid cells in x");
    grid_cmd->add_option("--ny", ny, "grid cells in y");
    grid_cmd->add_option("--warm-start", warm_flag, "on|off")
        ->check(CLI::IsMember({"on", "off"}));
    grid_cmd->add_option("--workers", workers, "worker threads");

    CLI::App *oracle_cmd = app.add_subcommand("oracle", "brute-force swept-volume SDF reference");
    addCommon(oracle_cmd, false, true);
    oracle_cmd->add_option("--cell-size", cell_size, "grid cell size");
    oracle_cmd->add_option("--origin", origin, "grid origin x y")->expected(2);
    oracle_cmd->add_option("--nx", nx, "grid cells in x");
    oracle_cmd->add_option("--ny", ny, "grid cells in y");
    oracle_cmd->add_option("--time-samples", time_samples, "dense time sample count");

    CLI::App *plan_cmd = app.add_subcommand("plan", "plan a continuously collision-free trajectory");
    addCommon(plan_cmd, true, false);
    plan_cmd->add_flag("--no-backend", no_backend, "skip the back-end stage");
    plan_cmd->add_flag("--no-midend", no_midend, "skip the mid-end stage");

    CLI::App *bench_cmd = app.add_subcommand("bench", "seeded random-map benchmark");
    addCommon(bench_cmd, false, false);
    bench_cmd->add_option("--trials", trials, "number of trials");
    bench_cmd->add_option("--seed", seed, "base seed");
    bench_cmd->add_option("--workers", workers, "concurrent trials");
    bench_cmd->add_flag("--no-backend", no_backend, "skip the back-end stage");
    bench_cmd->add_flag("--no-midend", no_midend, "skip the mid-end stage");

    CLI::App *render_cmd = app.add_subcommand("render", "SVG overlay for a scene and trajectory");
    render_cmd->add_option("--scene", scene_path, "scene file (PGM or JSON)")->required();
    render_cmd->add_option("--shape", shape_path, "shape JSON (for the swept outline)");
    render_cmd->add_option("--trajectory", traj_path, "trajectory JSON");
    render_cmd->add_option("--out", out_dir, "output directory");
    render_cmd->add_option("--time-samples", time_samples, "occupancy sample count");

    CLI11_PARSE(app, argc, argv);

    try
    {
        std::filesystem::create_directories(out_dir);
        svsdf::PlannerConfig config = svsdf::PlannerConfig::defaults();
        svsdf::BenchParams bench_params;
        overrides.apply(config, &bench_params);

        if (grid_cmd->parsed() || oracle_cmd->parsed())
        {
            const svsdf::Shape shape = svsdf::io::loadShape(shape_path);
            const svsdf::Motion motion = svsdf::io::loadMotion(motion_path);
            const svsdf::SweepProblem problem(shape, motion);
            const svsdf::GridSpec grid =
                gridFromFlags(problem, cell_size, origin, nx, ny, 2.0 * config.gsip.epsilon + 0.5);

            if (oracle_cmd->parsed())
            {
                const std::vector<double> field =
                    svsdf::bruteForceSvsdf(problem, grid, time_samples);
                svsdf::io::writeField(out_dir + "/oracle", grid, field);
                return kExitOk;
            }

            const svsdf::SvsdfField field =
                svsdf::svsdfGrid(problem, config.gsip, grid, warm_flag == "on", workers);
            svsdf::io::writeField(out_dir + "/field", grid, field.value);
            const int failed = field.failedCells();
            if (failed > 0)
            {
                std::cerr << failed << " cells failed to converge\n";
                return kExitFieldFailures;
            }
            return kExitOk;
        }

        if (plan_cmd->parsed())
        {
            const svsdf::Shape shape = svsdf::io::loadShape(shape_path);
            const svsdf::Scene scene = svsdf::io::loadScene(scene_path);
            const svsdf::Planner planner(scene, shape, config);
            const svsdf::PlanResult result = planner.plan(!no_midend, !no_backend);

            std::ofstream report(out_dir + "/report.json");
            report << svsdf::io::reportToJson(result.report).dump(2) << "\n";

            if (result.astar.status != svsdf::AStarStatus::Success)
            {
                return kExitNoPath;
            }
            svsdf::io::writeTrajectoryCsv(out_dir + "/trajectory.csv", *result.final,
                                          result.final->totalDuration() / 400.0);
            svsdf::io::saveTrajectory(*result.final, out_dir + "/trajectory.json");

            const svsdf::SweepProblem problem(shape,
                                              svsdf::Motion::trajectory(result.final));
            const std::vector<uint8_t> sv =
                svsdf::bruteForceOccupancy(problem, scene.grid, 2000);
            svsdf::io::writeSvg(out_dir + "/plan.svg", scene, &result.astar,
                                result.initial.get(), result.final.get(), &sv);
            return kExitOk;
        }

        if (bench_cmd->parsed())
        {
            const svsdf::Shape shape = svsdf::io::loadShape(shape_path);
            bench_params.trials = trials;
            bench_params.seed = seed;
            bench_params.workers = workers;
            bench_params.run_backend = !no_backend;
            bench_params.run_midend = !no_midend;
            const svsdf::BenchResult result = svsdf::runBench(shape, bench_params, config);
            writeCsv(out_dir + "/trials.csv", result);
            const nlohmann::json summary{
                {"trials", result.summary.trials},
                {"planned", result.summary.planned},
                {"planner_success", result.summary.planner_success},
                {"cca_pass_count", result.summary.cca_pass_count},
                {"cca_success_rate", result.summary.cca_success_rate},
                {"mean_min_clearance", result.summary.mean_min_clearance},
                {"mean_wall_time_ms", result.summary.mean_wall_time_ms}};
            std::ofstream out(out_dir + "/summary.json");
            out << summary.dump(2) << "\n";
            std::cout << summary.dump(2) << "\n";
            return kExitOk;
        }

        if (render_cmd->parsed())
        {
            const svsdf::Scene scene = svsdf::io::loadScene(scene_path);
            std::shared_ptr<svsdf::Trajectory> traj;
            std::vector<uint8_t> sv;
            const std::vector<uint8_t> *sv_ptr = nullptr;
            if (!traj_path.empty())
            {
                traj = std::make_shared<svsdf::Trajectory>(svsdf::io::loadTrajectory(traj_path));
                if (!shape_path.empty())
                {
                    const svsdf::Shape shape = svsdf::io::loadShape(shape_path);
                    const svsdf::SweepProblem problem(shape, svsdf::Motion::trajectory(traj));
                    sv = svsdf::bruteForceOccupancy(problem, scene.grid, time_samples);
                    sv_ptr = &sv;
                }
            }
            svsdf::io::writeSvg(out_dir + "/render.svg", scene, nullptr, nullptr,
                                traj.get(), sv_ptr);
            return kExitOk;
        }
    }
    catch (const svsdf::io::IoError &e)
    {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIoError;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
