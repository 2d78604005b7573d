#include "svsdf/sweep_metric.hpp"

#include <algorithm>
#include <limits>

namespace svsdf
{

    namespace
    {

        // Sup of |d sdf / d shape_time|; zero for static bodies.
        double shapeTimeLipschitz(const Shape &shape)
        {
            switch (shape.kind())
            {
            case Shape::Kind::ScalingDisk:
                return std::abs(shape.radiusEnd() - shape.radiusStart());
            case Shape::Kind::Union:
            {
                double l = 0.0;
                for (const Shape &p : shape.parts())
                {
                    l = std::max(l, shapeTimeLipschitz(p));
                }
                return l;
            }
            default:
                return 0.0;
            }
        }

        struct GoldenResult
        {
            double t;
            double value;
        };

        // Golden-section minimization of d over [a, b] down to bracket width
        // tol; robust at SDF creases where derivatives are unreliable.
        GoldenResult goldenSection(const SweepProblem &problem, const Vec2 &p,
                                   double a, double b, double tol)
        {
            constexpr double inv_phi = 0.6180339887498949;
            double x1 = b - inv_phi * (b - a);
            double x2 = a + inv_phi * (b - a);
            double f1 = problem.distanceAt(p, x1);
            double f2 = problem.distanceAt(p, x2);
            while (b - a > tol)
            {
                if (f1 <= f2)
                {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - inv_phi * (b - a);
                    f1 = problem.distanceAt(p, x1);
                }
                else
                {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + inv_phi * (b - a);
                    f2 = problem.distanceAt(p, x2);
                }
            }
            const double tm = 0.5 * (a + b);
            return {tm, problem.distanceAt(p, tm)};
        }

    } // namespace

    SweepProblem::SweepProblem(Shape shape, Motion motion,
                               int coarse_steps, double descent_tolerance)
        : shape_(std::move(shape)),
          motion_(std::move(motion)),
          coarse_steps_(coarse_steps),
          descent_tolerance_(descent_tolerance)
    {
        if (coarse_steps_ < 1)
        {
            throw std::invalid_argument("coarse step count must be positive");
        }
        if (!(descent_tolerance_ > 0.0))
        {
            throw std::invalid_argument("descent tolerance must be positive");
        }
        if (!(motion_.duration() > 0.0))
        {
            throw std::domain_error("empty time domain");
        }
        time_resolution_ = motion_.duration() / coarse_steps_;
        bounding_radius_ = shape_.boundingRadius();

        grid_times_.resize(coarse_steps_ + 1);
        grid_translations_.resize(coarse_steps_ + 1);
        for (int i = 0; i <= coarse_steps_; ++i)
        {
            const double t = motion_.tStart() + time_resolution_ * i;
            grid_times_[i] = std::min(t, motion_.tEnd());
            grid_translations_[i] = motion_.poseAt(grid_times_[i]).translation;
        }
    }

    MetricResult metricG(const SweepProblem &problem, const Vec2 &p, bool prune)
    {
        if (!p.allFinite())
        {
            throw std::invalid_argument("query point must be finite");
        }
        const int n = problem.coarseSteps();
        const double rb = problem.boundingRadius();
        const std::vector<double> &times = problem.gridTimes();
        const std::vector<Vec2> &trans = problem.gridTranslations();

        // d'(t) = ||p - translation(t)|| - rb on the grid; the full distance
        // lies in the band [d', d' + 2 rb].
        std::vector<double> d_lo(n + 1);
        double min_band = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= n; ++i)
        {
            d_lo[i] = (p - trans[i]).norm() - rb;
            min_band = std::min(min_band, d_lo[i] + 2.0 * rb);
        }
        // d' is Lipschitz in t with the translation speed; that margin keeps
        // interval rejection sound against dips between grid nodes.
        const double margin =
            0.5 * problem.motion().maxSpeed() * problem.timeResolution() + 1e-12;

        // Surviving intervals, most promising first. Since d >= d', an
        // interval whose lower bound exceeds the best distance found so far
        // cannot contain the global minimizer, so the scan stops early.
        struct Interval
        {
            double key;
            int index;
        };
        std::vector<Interval> intervals;
        intervals.reserve(n);
        for (int i = 0; i < n; ++i)
        {
            const double key = std::min(d_lo[i], d_lo[i + 1]) - margin;
            if (!prune || key <= min_band)
            {
                intervals.push_back({key, i});
            }
        }
        std::sort(intervals.begin(), intervals.end(),
                  [](const Interval &a, const Interval &b)
                  { return a.key != b.key ? a.key < b.key : a.index < b.index; });

        double best_value = std::numeric_limits<double>::infinity();
        double best_t = times[0];

        const auto consider = [&](double t, double value)
        {
            if (value < best_value - 1e-12 ||
                (value < best_value + 1e-12 && t < best_t))
            {
                best_value = std::min(value, best_value);
                best_t = t;
            }
        };

        for (const Interval &iv : intervals)
        {
            if (prune && iv.key > best_value)
            {
                break;
            }
            const int i = iv.index;
            const double f_a = problem.distanceAt(p, times[i]);
            const double f_b = problem.distanceAt(p, times[i + 1]);
            consider(times[i], f_a);
            consider(times[i + 1], f_b);
            const GoldenResult g = goldenSection(problem, p, times[i], times[i + 1],
                                                 problem.descentTolerance());
            consider(g.t, g.value);
        }

        MetricResult result;
        result.t_star = best_t;
        const Pose2 pose = problem.motion().poseAt(best_t);
        result.local_point = pose.worldToBody(p);
        result.g_value = problem.shape().sdf(result.local_point,
                                             problem.motion().shapeTime(best_t));
        const Vec2 grad_local = problem.shape().sdfGradient(
            result.local_point, problem.motion().shapeTime(best_t));
        result.gradient = rotationMatrix(pose.yaw) * grad_local;
        return result;
    }

    double metricLowerBound(const SweepProblem &problem, const Vec2 &p)
    {
        const std::vector<Vec2> &trans = problem.gridTranslations();
        double lo = std::numeric_limits<double>::infinity();
        for (const Vec2 &t : trans)
        {
            lo = std::min(lo, (p - t).norm());
        }
        const double margin = 0.5 * problem.motion().maxSpeed() * problem.timeResolution();
        return lo - problem.boundingRadius() - margin;
    }

    double bodySpeedBound(const SweepProblem &problem, const Vec2 &p)
    {
        const Motion &motion = problem.motion();
        double reach = 0.0;
        for (const Vec2 &t : problem.gridTranslations())
        {
            reach = std::max(reach, (p - t).norm());
        }
        // Between grid nodes the translation moves at most maxSpeed * dt / 2.
        reach += 0.5 * motion.maxSpeed() * problem.timeResolution();
        const double shape_rate =
            motion.duration() > 0.0 ? shapeTimeLipschitz(problem.shape()) / motion.duration()
                                    : 0.0;
        return motion.maxSpeed() + motion.maxYawRate() * reach + shape_rate;
    }

    double bodySpeedBound(const SweepProblem &problem)
    {
        const Motion &motion = problem.motion();
        Vec2 lo = problem.gridTranslations().front();
        Vec2 hi = lo;
        for (const Vec2 &t : problem.gridTranslations())
        {
            lo = lo.cwiseMin(t);
            hi = hi.cwiseMax(t);
        }
        const double inflate = problem.boundingRadius() + 1.0 +
                               0.5 * motion.maxSpeed() * problem.timeResolution();
        const double reach = (hi - lo).norm() + 2.0 * inflate;
        const double shape_rate =
            motion.duration() > 0.0 ? shapeTimeLipschitz(problem.shape()) / motion.duration()
                                    : 0.0;
        return motion.maxSpeed() + motion.maxYawRate() * reach + shape_rate;
    }

} // namespace svsdf
