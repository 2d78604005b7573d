#ifndef SVSDF_BENCH_HPP
#define SVSDF_BENCH_HPP

#include "svsdf/planner.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace svsdf
{

    struct BenchParams
    {
        uint64_t seed = 1;
        int trials = 50;
        int workers = 1;
        bool run_midend = true;
        bool run_backend = true;

        // Map generation: square map with Poisson-disk disc obstacles.
        double map_size = 12.0;
        double cell_size = 0.1;
        double disc_radius_min = 0.3;
        double disc_radius_max = 0.6;
        double min_spacing = 2.4; // between accepted disc centers
        int target_discs = 12;
        int placement_attempts = 400;
        double min_start_goal_dist = 7.0;
        double border_margin = 1.0; // keep disc centers off the map edge

        bool set(const std::string &key, double value);
    };

    struct TrialResult
    {
        int trial{0};
        bool planned{false}; // pipeline produced a trajectory
        bool success{false}; // planner's own claim
        bool cca_pass{false};
        double min_clearance{0.0};
        double wall_time_ms{0.0};
        std::string failure;
    };

    struct BenchSummary
    {
        int trials{0};
        int planned{0};
        int planner_success{0};
        int cca_pass_count{0};
        double cca_success_rate{0.0};
        double mean_min_clearance{0.0}; // over trials with a finite clearance
        double mean_wall_time_ms{0.0};
    };

    struct BenchResult
    {
        std::vector<TrialResult> trials;
        BenchSummary summary;
    };

    // Deterministic per-trial scene; returns false when no feasible
    // start/goal pair exists for the shape on this map.
    bool randomScene(const BenchParams &params, uint64_t trial_seed,
                     const PoseChannelMasks &masks, Scene &scene);

    // Runs seeded trials (concurrently up to params.workers); per-trial
    // results are deterministic given (seed, trial index) and aggregated in
    // trial order.
    BenchResult runBench(const Shape &shape, const BenchParams &params,
                         const PlannerConfig &config);

} // namespace svsdf

#endif
