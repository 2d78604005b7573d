#ifndef SVSDF_SWEEP_METRIC_HPP
#define SVSDF_SWEEP_METRIC_HPP

#include "svsdf/geometry.hpp"
#include "svsdf/motion.hpp"

#include <vector>

namespace svsdf
{

    // A shape moving along a motion, prepared for repeated distance metric
    // queries. Immutable after construction; concurrent queries are safe.
    class SweepProblem
    {
    public:
        SweepProblem(Shape shape, Motion motion,
                     int coarse_steps = 64, double descent_tolerance = 1e-8);

        const Shape &shape() const { return shape_; }
        const Motion &motion() const { return motion_; }
        int coarseSteps() const { return coarse_steps_; }
        double timeResolution() const { return time_resolution_; }
        double descentTolerance() const { return descent_tolerance_; }
        // Max over shape time for time-varying bodies.
        double boundingRadius() const { return bounding_radius_; }

        const std::vector<double> &gridTimes() const { return grid_times_; }
        const std::vector<Vec2> &gridTranslations() const { return grid_translations_; }

        // Instantaneous body-frame distance d(t) = sdf(T^{-1}(t) p, s(t)).
        double distanceAt(const Vec2 &p, double t) const
        {
            return shape_.sdf(motion_.poseAt(t).worldToBody(p), motion_.shapeTime(t));
        }

    private:
        Shape shape_;
        Motion motion_;
        int coarse_steps_;
        double time_resolution_;
        double descent_tolerance_;
        double bounding_radius_;
        std::vector<double> grid_times_;
        std::vector<Vec2> grid_translations_;
    };

    struct MetricResult
    {
        double g_value{0.0};
        double t_star{0.0};
        Vec2 local_point{0.0, 0.0}; // T^{-1}(t*) p
        Vec2 gradient{0.0, 0.0};    // d g / d p (envelope: rotation of the body-frame SDF gradient)
    };

    // Global minimum over trajectory time of the body-frame SDF at p,
    // bracketed on the coarse grid with bounding-circle band pruning and
    // refined by golden-section descent per surviving interval. Ties between
    // global minimizers resolve to the smallest time.
    MetricResult metricG(const SweepProblem &problem, const Vec2 &p, bool prune = true);

    // Cheap lower bound on d(t) over the whole domain:
    // min_t ||p - translation(t)|| - boundingRadius, from the cached grid with
    // a Lipschitz margin. Never above metricG(p).g_value.
    double metricLowerBound(const SweepProblem &problem, const Vec2 &p);

    // Lipschitz constant L with |d(t1) - d(t2)| <= L |t1 - t2| for queries at
    // p (exact for analytic motions, sampled with margin otherwise).
    double bodySpeedBound(const SweepProblem &problem, const Vec2 &p);
    // Point-free variant, valid for any query inside the motion's bounding box
    // inflated by the shape bounding radius plus one metre.
    double bodySpeedBound(const SweepProblem &problem);

} // namespace svsdf

#endif
