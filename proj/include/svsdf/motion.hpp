#ifndef SVSDF_MOTION_HPP
#define SVSDF_MOTION_HPP

#include "svsdf/geometry.hpp"
#include "svsdf/minco.hpp"

#include <memory>

namespace svsdf
{

    // A rigid pose trajectory over [tStart, tEnd]: either an analytic test
    // motion or a (x, y, yaw) polynomial trajectory.
    class Motion
    {
    public:
        Motion() = default;

        static Motion constant(const Pose2 &pose, double t_start = 0.0, double t_end = 1.0);
        // Linear interpolation of translation and yaw between two poses.
        static Motion linear(const Pose2 &from, const Pose2 &to,
                             double t_start = 0.0, double t_end = 1.0);
        // Interprets trajectory dimensions (x, y, yaw); domain [0, total duration].
        static Motion trajectory(std::shared_ptr<const Trajectory> traj);

        double tStart() const { return t_start_; }
        double tEnd() const { return t_end_; }
        double duration() const { return t_end_ - t_start_; }

        Pose2 poseAt(double t, bool clamp = false) const;
        Vec2 velocityAt(double t) const;
        double yawRateAt(double t) const;
        // Normalized shape time in [0, 1] for time-varying bodies.
        double shapeTime(const double t) const
        {
            const double span = t_end_ - t_start_;
            return span > 0.0 ? std::clamp((t - t_start_) / span, 0.0, 1.0) : 0.0;
        }

        Vec2 inverseTransform(double t, const Vec2 &world_point) const
        {
            return poseAt(t).worldToBody(world_point);
        }

        // Conservative upper bound on translation speed over the domain.
        double maxSpeed() const;
        // Conservative upper bound on |yaw rate| over the domain.
        double maxYawRate() const;
        // Total translation path length (upper bound for sampled motions).
        double pathLengthBound() const;

        bool isTrajectoryBacked() const { return traj_ != nullptr; }
        const std::shared_ptr<const Trajectory> &trajectoryPtr() const { return traj_; }

    private:
        enum class Source
        {
            Constant,
            Linear,
            TrajectoryBacked
        };

        void checkDomain(double t, bool clamp, double &t_eff) const;

        Source source_{Source::Constant};
        Pose2 from_{};
        Pose2 to_{};
        double t_start_{0.0};
        double t_end_{1.0};
        std::shared_ptr<const Trajectory> traj_;
        double max_speed_{0.0};
        double max_yaw_rate_{0.0};
        double path_length_{0.0};
    };

} // namespace svsdf

#endif
