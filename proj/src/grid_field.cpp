#include "svsdf/grid_field.hpp"

#include <algorithm>
#include <limits>
#include <thread>

namespace svsdf
{

    int SvsdfField::failedCells() const
    {
        int n = 0;
        for (uint8_t s : status)
        {
            const QueryStatus q = static_cast<QueryStatus>(s);
            if (q == QueryStatus::NonConverged || q == QueryStatus::RadiusUnderflow)
            {
                ++n;
            }
        }
        return n;
    }

    long SvsdfField::totalIterations() const
    {
        long n = 0;
        for (int i : iterations)
        {
            n += i;
        }
        return n;
    }

    SvsdfField svsdfGrid(const SweepProblem &problem, const GsipConfig &config,
                         const GridSpec &grid, bool warm_start, int workers)
    {
        SvsdfField field;
        field.grid = grid;
        field.value.assign(grid.cellCount(), 0.0);
        field.t_star.assign(grid.cellCount(), 0.0);
        field.iterations.assign(grid.cellCount(), 0);
        field.status.assign(grid.cellCount(), 0);

        workers = std::max(1, std::min(workers, grid.ny));

        const auto interiorSeed = [&](int ix, int iy, int block_first_row) -> double
        {
            if (!warm_start)
            {
                return 0.0;
            }
            double seed = 0.0;
            const auto tryNeighbor = [&](int jx, int jy)
            {
                if (jx < 0 || jy < block_first_row || jx >= grid.nx)
                {
                    return;
                }
                const int idx = grid.index(jx, jy);
                if (static_cast<QueryStatus>(field.status[idx]) != QueryStatus::Interior)
                {
                    return;
                }
                const double candidate =
                    std::abs(field.value[idx]) +
                    (grid.cellCenter(ix, iy) - grid.cellCenter(jx, jy)).norm();
                if (seed == 0.0 || candidate < seed)
                {
                    seed = candidate;
                }
            };
            tryNeighbor(ix - 1, iy);
            tryNeighbor(ix, iy - 1);
            return seed;
        };

        const auto processRows = [&](int row_begin, int row_end)
        {
            for (int iy = row_begin; iy < row_end; ++iy)
            {
                for (int ix = 0; ix < grid.nx; ++ix)
                {
                    const Vec2 p = grid.cellCenter(ix, iy);
                    const double seed = interiorSeed(ix, iy, row_begin);
                    const SvsdfResult r = trySvsdfQuery(problem, config, p, seed);
                    const int idx = grid.index(ix, iy);
                    field.value[idx] = r.value;
                    field.t_star[idx] = r.t_star;
                    field.iterations[idx] = r.iterations;
                    field.status[idx] = static_cast<uint8_t>(r.status);
                }
            }
        };

        if (workers == 1)
        {
            processRows(0, grid.ny);
        }
        else
        {
            std::vector<std::thread> pool;
            const int rows_per_block = (grid.ny + workers - 1) / workers;
            for (int w = 0; w < workers; ++w)
            {
                const int begin = w * rows_per_block;
                const int end = std::min(grid.ny, begin + rows_per_block);
                if (begin < end)
                {
                    pool.emplace_back(processRows, begin, end);
                }
            }
            for (std::thread &t : pool)
            {
                t.join();
            }
        }
        return field;
    }

    std::vector<uint8_t> bruteForceOccupancy(const SweepProblem &problem, const GridSpec &grid,
                                             int time_samples)
    {
        if (time_samples < 2)
        {
            throw std::invalid_argument("need at least 2 time samples");
        }
        const Motion &motion = problem.motion();
        const double t0 = motion.tStart();
        const double dt = motion.duration() / (time_samples - 1);
        const double rb = problem.boundingRadius();

        std::vector<Pose2> poses(time_samples);
        std::vector<double> stimes(time_samples);
        for (int i = 0; i < time_samples; ++i)
        {
            const double t = t0 + dt * i;
            poses[i] = motion.poseAt(t, true);
            stimes[i] = motion.shapeTime(t);
        }

        std::vector<uint8_t> occupied(grid.cellCount(), 0);
        for (int iy = 0; iy < grid.ny; ++iy)
        {
            for (int ix = 0; ix < grid.nx; ++ix)
            {
                const Vec2 p = grid.cellCenter(ix, iy);
                if (metricLowerBound(problem, p) > 0.0)
                {
                    continue;
                }
                for (int i = 0; i < time_samples; ++i)
                {
                    if ((p - poses[i].translation).squaredNorm() > rb * rb)
                    {
                        continue;
                    }
                    if (problem.shape().sdf(poses[i].worldToBody(p), stimes[i]) <= 0.0)
                    {
                        occupied[grid.index(ix, iy)] = 1;
                        break;
                    }
                }
            }
        }
        return occupied;
    }

    namespace
    {

        // Felzenszwalb-Huttenlocher lower-envelope pass over one scanline.
        void edt1d(const std::vector<double> &f, std::vector<double> &d, int n,
                   std::vector<int> &v, std::vector<double> &z)
        {
            int k = 0;
            v[0] = 0;
            z[0] = -std::numeric_limits<double>::infinity();
            z[1] = std::numeric_limits<double>::infinity();
            for (int q = 1; q < n; ++q)
            {
                double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
                while (s <= z[k])
                {
                    --k;
                    s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
                }
                ++k;
                v[k] = q;
                z[k] = s;
                z[k + 1] = std::numeric_limits<double>::infinity();
            }
            k = 0;
            for (int q = 0; q < n; ++q)
            {
                while (z[k + 1] < q)
                {
                    ++k;
                }
                d[q] = (q - v[k]) * (q - v[k]) + f[v[k]];
            }
        }

    } // namespace

    std::vector<double> squaredDistanceTransform(const std::vector<uint8_t> &occupied,
                                                 int nx, int ny)
    {
        constexpr double kFar = 1e18;
        std::vector<double> dist(static_cast<size_t>(nx) * ny);
        for (size_t i = 0; i < dist.size(); ++i)
        {
            dist[i] = occupied[i] ? 0.0 : kFar;
        }

        const int n_max = std::max(nx, ny);
        std::vector<double> f(n_max), d(n_max), z(n_max + 1);
        std::vector<int> v(n_max);

        for (int ix = 0; ix < nx; ++ix)
        {
            for (int iy = 0; iy < ny; ++iy)
            {
                f[iy] = dist[static_cast<size_t>(iy) * nx + ix];
            }
            edt1d(f, d, ny, v, z);
            for (int iy = 0; iy < ny; ++iy)
            {
                dist[static_cast<size_t>(iy) * nx + ix] = d[iy];
            }
        }
        for (int iy = 0; iy < ny; ++iy)
        {
            for (int ix = 0; ix < nx; ++ix)
            {
                f[ix] = dist[static_cast<size_t>(iy) * nx + ix];
            }
            edt1d(f, d, nx, v, z);
            for (int ix = 0; ix < nx; ++ix)
            {
                dist[static_cast<size_t>(iy) * nx + ix] = d[ix];
            }
        }
        return dist;
    }

    std::vector<double> signedDistanceFromOccupancy(const std::vector<uint8_t> &occupied,
                                                    const GridSpec &grid)
    {
        std::vector<uint8_t> free_cells(occupied.size());
        bool any_occupied = false;
        for (size_t i = 0; i < occupied.size(); ++i)
        {
            free_cells[i] = occupied[i] ? 0 : 1;
            any_occupied = any_occupied || occupied[i];
        }
        std::vector<double> field(occupied.size());
        if (!any_occupied)
        {
            std::fill(field.begin(), field.end(), std::numeric_limits<double>::infinity());
            return field;
        }
        const std::vector<double> d_out = squaredDistanceTransform(occupied, grid.nx, grid.ny);
        const std::vector<double> d_in = squaredDistanceTransform(free_cells, grid.nx, grid.ny);
        for (size_t i = 0; i < field.size(); ++i)
        {
            field[i] = occupied[i] ? -grid.cell_size * std::sqrt(d_in[i])
                                   : grid.cell_size * std::sqrt(d_out[i]);
        }
        return field;
    }

    std::vector<double> bruteForceSvsdf(const SweepProblem &problem, const GridSpec &grid,
                                        int time_samples)
    {
        const std::vector<uint8_t> occupied = bruteForceOccupancy(problem, grid, time_samples);
        return signedDistanceFromOccupancy(occupied, grid);
    }

} // namespace svsdf
