#ifndef SVSDF_TEST_ORACLES_HPP
#define SVSDF_TEST_ORACLES_HPP

// Test-only reference implementations, independent of the library paths they
// check: dense time sampling for the sweep metric, quadrature, containment
// by crossing number, and the capsule closed form.

#include "svsdf/sweep_metric.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracles
{

    using svsdf::Vec2;

    struct TimeMinimum
    {
        double value;
        double t;
    };

    // Exhaustive scan of d(t) at fixed resolution; the reference for metricG.
    inline TimeMinimum denseTimeMinimum(const svsdf::SweepProblem &problem, const Vec2 &p,
                                        double dt = 1e-4)
    {
        const double t0 = problem.motion().tStart();
        const double t1 = problem.motion().tEnd();
        TimeMinimum best{problem.distanceAt(p, t0), t0};
        const long steps = static_cast<long>(std::ceil((t1 - t0) / dt));
        for (long i = 1; i <= steps; ++i)
        {
            const double t = std::min(t0 + dt * i, t1);
            const double d = problem.distanceAt(p, t);
            if (d < best.value)
            {
                best = {d, t};
            }
        }
        return best;
    }

    // Local minima of the dense scan, for the unique-minimizer filter.
    inline std::vector<TimeMinimum> denseLocalMinima(const svsdf::SweepProblem &problem,
                                                     const Vec2 &p, double dt = 1e-4)
    {
        const double t0 = problem.motion().tStart();
        const double t1 = problem.motion().tEnd();
        const long steps = static_cast<long>(std::ceil((t1 - t0) / dt));
        std::vector<double> d(steps + 1);
        for (long i = 0; i <= steps; ++i)
        {
            d[i] = problem.distanceAt(p, std::min(t0 + dt * i, t1));
        }
        std::vector<TimeMinimum> minima;
        for (long i = 0; i <= steps; ++i)
        {
            const bool left_ok = (i == 0) || d[i] <= d[i - 1];
            const bool right_ok = (i == steps) || d[i] <= d[i + 1];
            if (left_ok && right_ok)
            {
                minima.push_back({d[i], std::min(t0 + dt * i, t1)});
            }
        }
        return minima;
    }

    inline double capsuleSdf(const Vec2 &p, const Vec2 &a, const Vec2 &b, double r)
    {
        const Vec2 ab = b - a;
        const double h = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
        return (p - a - h * ab).norm() - r;
    }

    // Crossing-number containment, written apart from the library's parity
    // logic.
    inline bool pointInPolygon(const std::vector<Vec2> &verts, const Vec2 &p)
    {
        bool inside = false;
        const size_t n = verts.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++)
        {
            const Vec2 &a = verts[i];
            const Vec2 &b = verts[j];
            if ((a.y() > p.y()) != (b.y() > p.y()))
            {
                const double x_cross = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
                if (p.x() < x_cross)
                {
                    inside = !inside;
                }
            }
        }
        return inside;
    }

    // Unsigned distance to a polygon boundary by dense edge sampling.
    inline double polygonBoundaryDistance(const std::vector<Vec2> &verts, const Vec2 &p,
                                          int samples_per_edge = 4000)
    {
        double best = std::numeric_limits<double>::infinity();
        const size_t n = verts.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++)
        {
            for (int s = 0; s <= samples_per_edge; ++s)
            {
                const double u = static_cast<double>(s) / samples_per_edge;
                best = std::min(best, (p - (verts[j] + u * (verts[i] - verts[j]))).norm());
            }
        }
        return best;
    }

    inline double centralDifference(const std::function<double(double)> &f, double x,
                                    double h = 1e-6)
    {
        return (f(x + h) - f(x - h)) / (2.0 * h);
    }

    // Simpson quadrature for smooth integrands.
    inline double simpson(const std::function<double(double)> &f, double a, double b,
                          int intervals = 2000)
    {
        if (intervals % 2 != 0)
        {
            ++intervals;
        }
        const double h = (b - a) / intervals;
        double sum = f(a) + f(b);
        for (int i = 1; i < intervals; ++i)
        {
            sum += f(a + h * i) * ((i % 2 == 0) ? 2.0 : 4.0);
        }
        return sum * h / 3.0;
    }

    inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

    inline Vec2 randomPoint(std::mt19937_64 &gen, double lo, double hi)
    {
        std::uniform_real_distribution<double> u(lo, hi);
        return Vec2(u(gen), u(gen));
    }

} // namespace oracles

#endif
