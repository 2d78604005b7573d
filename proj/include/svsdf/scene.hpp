#ifndef SVSDF_SCENE_HPP
#define SVSDF_SCENE_HPP

#include "svsdf/geometry.hpp"
#include "svsdf/grid_field.hpp"

#include <cstdint>
#include <vector>

namespace svsdf
{

    // Workspace map: boolean occupancy plus the derived obstacle point set
    // (one point per occupied cell center) and the planning endpoints.
    struct Scene
    {
        GridSpec grid;
        std::vector<uint8_t> occupancy;
        std::vector<Vec2> obstacle_points;
        Pose2 start;
        Pose2 goal;

        static Scene fromOccupancy(const GridSpec &grid, std::vector<uint8_t> occupancy,
                                   const Pose2 &start, const Pose2 &goal);

        bool occupied(int ix, int iy) const
        {
            return grid.contains(ix, iy) && occupancy[grid.index(ix, iy)] != 0;
        }
    };

    // Shape footprints rasterized at map resolution for every discretized yaw
    // channel: a mask cell is set exactly when the shape SDF at the cell
    // center offset, rotated into the body frame, is non-positive.
    struct PoseChannelMasks
    {
        int channels{0};
        double cell_size{0.0};
        int half_extent{0}; // mask spans [-half_extent, half_extent]^2 cells
        std::vector<double> yaw_values;
        std::vector<std::vector<uint8_t>> masks;

        static PoseChannelMasks build(const Shape &shape, double cell_size, int channels = 36);

        int side() const { return 2 * half_extent + 1; }
        bool cellSet(int channel, int dx, int dy) const
        {
            return masks[channel][(dy + half_extent) * side() + (dx + half_extent)] != 0;
        }
        int nearestChannel(double yaw) const;
        // Channel scan order by increasing |yaw deviation| from a reference
        // channel, positive offsets first on ties.
        std::vector<int> scanOrder(int reference_channel) const;
    };

    // True when any set mask cell, translated to (ix, iy), lands on an
    // occupied or out-of-bounds map cell.
    bool collide(const PoseChannelMasks &masks, const Scene &scene,
                 int ix, int iy, int yaw_index);

} // namespace svsdf

#endif
