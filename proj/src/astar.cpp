#include "svsdf/astar.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace svsdf
{

    namespace
    {

        struct OpenEntry
        {
            double f;
            double h;
            int cell;

            bool operator>(const OpenEntry &o) const
            {
                if (f != o.f)
                {
                    return f > o.f;
                }
                if (h != o.h)
                {
                    return h > o.h;
                }
                return cell > o.cell;
            }
        };

        int firstFreeChannel(const Scene &scene, const PoseChannelMasks &masks,
                             int ix, int iy, int reference_channel)
        {
            for (int k : masks.scanOrder(reference_channel))
            {
                if (!collide(masks, scene, ix, iy, k))
                {
                    return k;
                }
            }
            return -1;
        }

    } // namespace

    AStarResult astarSearch(const Scene &scene, const PoseChannelMasks &masks)
    {
        AStarResult result;
        const GridSpec &grid = scene.grid;

        int sx, sy, gx, gy;
        grid.cellOf(scene.start.translation, sx, sy);
        grid.cellOf(scene.goal.translation, gx, gy);
        if (!grid.contains(sx, sy))
        {
            result.status = AStarStatus::InvalidStart;
            return result;
        }
        if (!grid.contains(gx, gy))
        {
            result.status = AStarStatus::InvalidGoal;
            return result;
        }
        const int start_yaw = firstFreeChannel(scene, masks, sx, sy,
                                               masks.nearestChannel(scene.start.yaw));
        if (start_yaw < 0)
        {
            result.status = AStarStatus::InvalidStart;
            return result;
        }
        if (firstFreeChannel(scene, masks, gx, gy, masks.nearestChannel(scene.goal.yaw)) < 0)
        {
            result.status = AStarStatus::InvalidGoal;
            return result;
        }

        const int cells = grid.cellCount();
        std::vector<double> g_cost(cells, std::numeric_limits<double>::infinity());
        std::vector<int> yaw_of(cells, -1);
        std::vector<int> parent(cells, -1);
        std::vector<uint8_t> closed(cells, 0);

        const auto heuristic = [&](int ix, int iy)
        {
            return grid.cell_size * std::hypot(double(ix - gx), double(iy - gy));
        };

        std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<OpenEntry>> open;
        const int start_cell = grid.index(sx, sy);
        g_cost[start_cell] = 0.0;
        yaw_of[start_cell] = start_yaw;
        open.push({heuristic(sx, sy), heuristic(sx, sy), start_cell});

        constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
        constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};
        const double diag = grid.cell_size * std::sqrt(2.0);

        const int goal_cell = grid.index(gx, gy);
        bool found = false;

        while (!open.empty())
        {
            const OpenEntry top = open.top();
            open.pop();
            const int cell = top.cell;
            if (closed[cell])
            {
                continue;
            }
            closed[cell] = 1;
            ++result.expansions;
            if (cell == goal_cell)
            {
                found = true;
                break;
            }
            const int ix = cell % grid.nx;
            const int iy = cell / grid.nx;
            for (int n = 0; n < 8; ++n)
            {
                const int jx = ix + dx8[n];
                const int jy = iy + dy8[n];
                if (!grid.contains(jx, jy))
                {
                    continue;
                }
                const int ncell = grid.index(jx, jy);
                if (closed[ncell])
                {
                    continue;
                }
                const double step = (n < 4) ? grid.cell_size : diag;
                const double tentative = g_cost[cell] + step;
                if (tentative >= g_cost[ncell])
                {
                    continue;
                }
                const int yaw = firstFreeChannel(scene, masks, jx, jy, yaw_of[cell]);
                if (yaw < 0)
                {
                    continue;
                }
                g_cost[ncell] = tentative;
                yaw_of[ncell] = yaw;
                parent[ncell] = cell;
                open.push({tentative + heuristic(jx, jy), heuristic(jx, jy), ncell});
            }
        }

        if (!found)
        {
            result.status = AStarStatus::NoPath;
            return result;
        }

        std::vector<int> chain;
        for (int cell = goal_cell; cell >= 0; cell = parent[cell])
        {
            chain.push_back(cell);
        }
        std::reverse(chain.begin(), chain.end());
        result.nodes.reserve(chain.size());
        for (int cell : chain)
        {
            AStarNode node;
            node.ix = cell % grid.nx;
            node.iy = cell / grid.nx;
            node.yaw_index = yaw_of[cell];
            node.g_cost = g_cost[cell];
            node.f_cost = g_cost[cell] + heuristic(node.ix, node.iy);
            result.nodes.push_back(node);
        }
        result.status = AStarStatus::Success;
        return result;
    }

} // namespace svsdf
