#ifndef SVSDF_ASTAR_HPP
#define SVSDF_ASTAR_HPP

#include "svsdf/scene.hpp"

#include <vector>

namespace svsdf
{

    struct AStarNode
    {
        int ix{0};
        int iy{0};
        int yaw_index{0};
        double g_cost{0.0};
        double f_cost{0.0};
    };

    enum class AStarStatus
    {
        Success,
        NoPath,
        InvalidStart,
        InvalidGoal
    };

    struct AStarResult
    {
        AStarStatus status{AStarStatus::NoPath};
        std::vector<AStarNode> nodes; // start to goal, all collision free
        int expansions{0};

        Vec2 worldPoint(const GridSpec &grid, size_t i) const
        {
            return grid.cellCenter(nodes[i].ix, nodes[i].iy);
        }
    };

    // Grid search asymmetric across dimensions: positions expand over the
    // 8-connected neighborhood with a Euclidean-distance heuristic; yaw is not
    // searched but assigned greedily per successor, scanning channels by
    // increasing deviation from the parent yaw and keeping the first
    // collision-free one. Start and goal yaws snap to the nearest feasible
    // channel.
    AStarResult astarSearch(const Scene &scene, const PoseChannelMasks &masks);

} // namespace svsdf

#endif
