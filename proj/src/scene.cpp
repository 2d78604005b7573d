#include "svsdf/scene.hpp"

#include <cmath>

namespace svsdf
{

    Scene Scene::fromOccupancy(const GridSpec &grid, std::vector<uint8_t> occupancy,
                               const Pose2 &start, const Pose2 &goal)
    {
        if (static_cast<int>(occupancy.size()) != grid.cellCount())
        {
            throw std::invalid_argument("occupancy size does not match the grid");
        }
        Scene scene;
        scene.grid = grid;
        scene.occupancy = std::move(occupancy);
        scene.start = start;
        scene.goal = goal;
        for (int iy = 0; iy < grid.ny; ++iy)
        {
            for (int ix = 0; ix < grid.nx; ++ix)
            {
                if (scene.occupancy[grid.index(ix, iy)])
                {
                    scene.obstacle_points.push_back(grid.cellCenter(ix, iy));
                }
            }
        }
        return scene;
    }

    PoseChannelMasks PoseChannelMasks::build(const Shape &shape, double cell_size, int channels)
    {
        if (channels < 1 || !(cell_size > 0.0))
        {
            throw std::invalid_argument("invalid mask parameters");
        }
        PoseChannelMasks m;
        m.channels = channels;
        m.cell_size = cell_size;
        m.half_extent = static_cast<int>(std::ceil(shape.boundingRadius() / cell_size)) + 1;
        m.yaw_values.resize(channels);
        m.masks.resize(channels);
        const int side = m.side();
        for (int k = 0; k < channels; ++k)
        {
            const double yaw = 2.0 * M_PI * k / channels;
            m.yaw_values[k] = yaw;
            m.masks[k].assign(static_cast<size_t>(side) * side, 0);
            const Mat2 to_body = rotationMatrix(-yaw);
            for (int dy = -m.half_extent; dy <= m.half_extent; ++dy)
            {
                for (int dx = -m.half_extent; dx <= m.half_extent; ++dx)
                {
                    const Vec2 offset(cell_size * dx, cell_size * dy);
                    if (shape.sdf(to_body * offset) <= 0.0)
                    {
                        m.masks[k][(dy + m.half_extent) * side + (dx + m.half_extent)] = 1;
                    }
                }
            }
        }
        return m;
    }

    int PoseChannelMasks::nearestChannel(double yaw) const
    {
        const double step = 2.0 * M_PI / channels;
        double wrapped = std::fmod(yaw, 2.0 * M_PI);
        if (wrapped < 0.0)
        {
            wrapped += 2.0 * M_PI;
        }
        const int k = static_cast<int>(std::lround(wrapped / step));
        return k % channels;
    }

    std::vector<int> PoseChannelMasks::scanOrder(int reference_channel) const
    {
        std::vector<int> order;
        order.reserve(channels);
        order.push_back(reference_channel);
        for (int d = 1; d <= channels / 2; ++d)
        {
            order.push_back((reference_channel + d) % channels);
            const int neg = (reference_channel - d + channels) % channels;
            if (neg != (reference_channel + d) % channels)
            {
                order.push_back(neg);
            }
        }
        return order;
    }

    bool collide(const PoseChannelMasks &masks, const Scene &scene,
                 int ix, int iy, int yaw_index)
    {
        const int h = masks.half_extent;
        for (int dy = -h; dy <= h; ++dy)
        {
            for (int dx = -h; dx <= h; ++dx)
            {
                if (!masks.cellSet(yaw_index, dx, dy))
                {
                    continue;
                }
                const int jx = ix + dx;
                const int jy = iy + dy;
                if (!scene.grid.contains(jx, jy))
                {
                    return true; // out of bounds counts as occupied
                }
                if (scene.occupancy[scene.grid.index(jx, jy)])
                {
                    return true;
                }
            }
        }
        return false;
    }

} // namespace svsdf
