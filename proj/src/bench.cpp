#include "svsdf/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace svsdf
{

    bool BenchParams::set(const std::string &key, double value)
    {
        if (key == "map_size")
        {
            map_size = value;
        }
        else if (key == "cell_size")
        {
            cell_size = value;
        }
        else if (key == "disc_radius_min")
        {
            disc_radius_min = value;
        }
        else if (key == "disc_radius_max")
        {
            disc_radius_max = value;
        }
        else if (key == "min_spacing")
        {
            min_spacing = value;
        }
        else if (key == "target_discs")
        {
            target_discs = static_cast<int>(value);
        }
        else if (key == "min_start_goal_dist")
        {
            min_start_goal_dist = value;
        }
        else if (key == "border_margin")
        {
            border_margin = value;
        }
        else
        {
            return false;
        }
        return true;
    }

    bool randomScene(const BenchParams &params, uint64_t trial_seed,
                     const PoseChannelMasks &masks, Scene &scene)
    {
        std::mt19937_64 rng(trial_seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        GridSpec grid;
        grid.cell_size = params.cell_size;
        grid.origin = Vec2(0.0, 0.0);
        grid.nx = static_cast<int>(std::lround(params.map_size / params.cell_size));
        grid.ny = grid.nx;

        // Poisson-disk dart throwing.
        std::vector<Vec2> centers;
        std::vector<double> radii;
        for (int attempt = 0;
             attempt < params.placement_attempts &&
             static_cast<int>(centers.size()) < params.target_discs;
             ++attempt)
        {
            const double m = params.border_margin;
            const Vec2 c(m + unit(rng) * (params.map_size - 2.0 * m),
                         m + unit(rng) * (params.map_size - 2.0 * m));
            const double r = params.disc_radius_min +
                             unit(rng) * (params.disc_radius_max - params.disc_radius_min);
            bool ok = true;
            for (const Vec2 &prev : centers)
            {
                if ((c - prev).norm() < params.min_spacing)
                {
                    ok = false;
                    break;
                }
            }
            if (ok)
            {
                centers.push_back(c);
                radii.push_back(r);
            }
        }

        std::vector<uint8_t> occupancy(grid.cellCount(), 0);
        for (size_t d = 0; d < centers.size(); ++d)
        {
            for (int iy = 0; iy < grid.ny; ++iy)
            {
                for (int ix = 0; ix < grid.nx; ++ix)
                {
                    if ((grid.cellCenter(ix, iy) - centers[d]).squaredNorm() <=
                        radii[d] * radii[d])
                    {
                        occupancy[grid.index(ix, iy)] = 1;
                    }
                }
            }
        }
        scene = Scene::fromOccupancy(grid, std::move(occupancy), Pose2(), Pose2());

        // Free start/goal sampling with a minimum separation.
        const auto sampleFree = [&](Pose2 &pose) -> bool
        {
            for (int attempt = 0; attempt < 200; ++attempt)
            {
                const double m = 0.6;
                const Vec2 p(m + unit(rng) * (params.map_size - 2.0 * m),
                             m + unit(rng) * (params.map_size - 2.0 * m));
                const double yaw = unit(rng) * 2.0 * M_PI;
                int ix, iy;
                grid.cellOf(p, ix, iy);
                if (!grid.contains(ix, iy))
                {
                    continue;
                }
                if (!collide(masks, scene, ix, iy, masks.nearestChannel(yaw)))
                {
                    pose = Pose2(p, yaw);
                    return true;
                }
            }
            return false;
        };

        for (int pair_attempt = 0; pair_attempt < 50; ++pair_attempt)
        {
            Pose2 start, goal;
            if (!sampleFree(start) || !sampleFree(goal))
            {
                return false;
            }
            if ((start.translation - goal.translation).norm() >= params.min_start_goal_dist)
            {
                scene.start = start;
                scene.goal = goal;
                return true;
            }
        }
        return false;
    }

    BenchResult runBench(const Shape &shape, const BenchParams &params,
                         const PlannerConfig &config)
    {
        BenchResult result;
        result.trials.resize(params.trials);

        const PoseChannelMasks masks =
            PoseChannelMasks::build(shape, params.cell_size, config.yaw_channels);

        const auto runTrial = [&](int trial)
        {
            TrialResult &out = result.trials[trial];
            out.trial = trial;
            const uint64_t trial_seed = params.seed * 1000003ULL + static_cast<uint64_t>(trial);
            Scene scene;
            if (!randomScene(params, trial_seed, masks, scene))
            {
                out.failure = "no_endpoints";
                return;
            }
            try
            {
                const Planner planner(scene, shape, config);
                const PlanResult plan = planner.plan(params.run_midend, params.run_backend);
                out.planned = plan.final != nullptr;
                out.success = plan.report.success;
                out.cca_pass = plan.report.cca_pass;
                out.min_clearance = plan.report.min_clearance;
                out.wall_time_ms = plan.report.wall_time_ms;
                out.failure = plan.report.failure;
            }
            catch (const std::exception &e)
            {
                out.failure = std::string("exception: ") + e.what();
            }
        };

        const int workers = std::max(1, params.workers);
        if (workers == 1)
        {
            for (int t = 0; t < params.trials; ++t)
            {
                runTrial(t);
            }
        }
        else
        {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
            {
                pool.emplace_back([&]()
                                  {
                    for (;;)
                    {
                        const int t = next.fetch_add(1);
                        if (t >= params.trials)
                        {
                            return;
                        }
                        runTrial(t);
                    } });
            }
            for (std::thread &th : pool)
            {
                th.join();
            }
        }

        BenchSummary &s = result.summary;
        s.trials = params.trials;
        double clearance_sum = 0.0;
        int clearance_count = 0;
        double time_sum = 0.0;
        for (const TrialResult &t : result.trials)
        {
            s.planned += t.planned ? 1 : 0;
            s.planner_success += t.success ? 1 : 0;
            s.cca_pass_count += t.cca_pass ? 1 : 0;
            if (t.planned && std::isfinite(t.min_clearance))
            {
                clearance_sum += t.min_clearance;
                ++clearance_count;
            }
            time_sum += t.wall_time_ms;
        }
        s.cca_success_rate = params.trials > 0
                                 ? static_cast<double>(s.cca_pass_count) / params.trials
                                 : 0.0;
        s.mean_min_clearance = clearance_count > 0 ? clearance_sum / clearance_count : 0.0;
        s.mean_wall_time_ms = params.trials > 0 ? time_sum / params.trials : 0.0;
        return result;
    }

} // namespace svsdf
