#ifndef SVSDF_GRID_FIELD_HPP
#define SVSDF_GRID_FIELD_HPP

#include "svsdf/gsip.hpp"

#include <cstdint>
#include <vector>

namespace svsdf
{

    struct GridSpec
    {
        Vec2 origin{0.0, 0.0}; // lower-left corner of cell (0, 0)
        double cell_size{0.1};
        int nx{0};
        int ny{0};

        int cellCount() const { return nx * ny; }
        int index(int ix, int iy) const { return iy * nx + ix; }
        bool contains(int ix, int iy) const
        {
            return ix >= 0 && iy >= 0 && ix < nx && iy < ny;
        }
        Vec2 cellCenter(int ix, int iy) const
        {
            return origin + cell_size * Vec2(ix + 0.5, iy + 0.5);
        }
        void cellOf(const Vec2 &p, int &ix, int &iy) const
        {
            ix = static_cast<int>(std::floor((p.x() - origin.x()) / cell_size));
            iy = static_cast<int>(std::floor((p.y() - origin.y()) / cell_size));
        }
        double diagonal() const { return cell_size * std::sqrt(2.0); }
    };

    struct SvsdfField
    {
        GridSpec grid;
        std::vector<double> value;
        std::vector<double> t_star;
        std::vector<int> iterations;
        std::vector<uint8_t> status; // QueryStatus per cell

        int failedCells() const;
        long totalIterations() const;
        double at(int ix, int iy) const { return value[grid.index(ix, iy)]; }
    };

    // Per-cell svsdfQuery over the grid. With warm_start, interior queries are
    // seeded from an already-solved interior neighbor as
    // |value(neighbor)| + distance(cell, neighbor); results match cold starts
    // within epsilon. Rows are processed in row-major order inside each
    // worker's contiguous block of rows; blocks cold-start their first cells,
    // so the output is identical for a fixed worker count.
    SvsdfField svsdfGrid(const SweepProblem &problem, const GsipConfig &config,
                         const GridSpec &grid, bool warm_start, int workers = 1);

    // Reference field: rasterizes swept occupancy over dense time samples and
    // converts to a signed distance via the exact two-pass Euclidean distance
    // transform. Accuracy is about one cell diagonal plus the per-step motion
    // bound.
    std::vector<double> bruteForceSvsdf(const SweepProblem &problem, const GridSpec &grid,
                                        int time_samples);

    // Swept-volume occupancy by dense time sampling (cell-center test).
    std::vector<uint8_t> bruteForceOccupancy(const SweepProblem &problem, const GridSpec &grid,
                                             int time_samples);

    // Exact squared Euclidean distance (in cells) to the nearest set cell.
    std::vector<double> squaredDistanceTransform(const std::vector<uint8_t> &occupied,
                                                 int nx, int ny);

    // Signed distance field (world units) from an occupancy grid: positive in
    // free cells, negative in occupied ones.
    std::vector<double> signedDistanceFromOccupancy(const std::vector<uint8_t> &occupied,
                                                    const GridSpec &grid);

} // namespace svsdf

#endif
