#include "svsdf/motion.hpp"

#include <algorithm>

namespace svsdf
{

    Motion Motion::constant(const Pose2 &pose, double t_start, double t_end)
    {
        if (!(t_end > t_start))
        {
            throw std::invalid_argument("motion needs t_end > t_start");
        }
        Motion m;
        m.source_ = Source::Constant;
        m.from_ = m.to_ = pose;
        m.t_start_ = t_start;
        m.t_end_ = t_end;
        return m;
    }

    Motion Motion::linear(const Pose2 &from, const Pose2 &to, double t_start, double t_end)
    {
        if (!(t_end > t_start))
        {
            throw std::invalid_argument("motion needs t_end > t_start");
        }
        Motion m;
        m.source_ = Source::Linear;
        m.from_ = from;
        m.to_ = to;
        m.t_start_ = t_start;
        m.t_end_ = t_end;
        const double span = t_end - t_start;
        m.max_speed_ = (to.translation - from.translation).norm() / span;
        m.max_yaw_rate_ = std::abs(to.yaw - from.yaw) / span;
        m.path_length_ = (to.translation - from.translation).norm();
        return m;
    }

    Motion Motion::trajectory(std::shared_ptr<const Trajectory> traj)
    {
        if (!traj || traj->dims() < 3)
        {
            throw std::invalid_argument("trajectory motion needs dimensions (x, y, yaw)");
        }
        Motion m;
        m.source_ = Source::TrajectoryBacked;
        m.t_start_ = 0.0;
        m.t_end_ = traj->totalDuration();
        m.traj_ = std::move(traj);

        // Sampled bounds inflated by a curvature-aware margin: between samples
        // the derivative can move by at most max|second derivative| * dt / 2.
        const int per_segment = 32;
        const int steps = std::max(64, per_segment * m.traj_->segments());
        const double dt = (m.t_end_ - m.t_start_) / steps;
        double v_max = 0.0, w_max = 0.0, a_max = 0.0, wd_max = 0.0, length = 0.0;
        Vec2 prev = m.traj_->evalClamped(0.0, 0).head<2>();
        for (int i = 0; i <= steps; ++i)
        {
            const double t = m.t_start_ + dt * i;
            const Eigen::VectorXd vel = m.traj_->evalClamped(t, 1);
            const Eigen::VectorXd acc = m.traj_->evalClamped(t, 2);
            v_max = std::max(v_max, vel.head<2>().norm());
            w_max = std::max(w_max, std::abs(vel(2)));
            a_max = std::max(a_max, acc.head<2>().norm());
            wd_max = std::max(wd_max, std::abs(acc(2)));
            const Vec2 pos = m.traj_->evalClamped(t, 0).head<2>();
            length += (pos - prev).norm();
            prev = pos;
        }
        m.max_speed_ = v_max + 0.5 * a_max * dt;
        m.max_yaw_rate_ = w_max + 0.5 * wd_max * dt;
        m.path_length_ = length + 0.5 * a_max * dt * (m.t_end_ - m.t_start_);
        return m;
    }

    void Motion::checkDomain(double t, bool clamp, double &t_eff) const
    {
        if (clamp)
        {
            t_eff = std::clamp(t, t_start_, t_end_);
            return;
        }
        if (t < t_start_ - 1e-12 || t > t_end_ + 1e-12)
        {
            throw std::domain_error("time outside motion domain");
        }
        t_eff = std::clamp(t, t_start_, t_end_);
    }

    Pose2 Motion::poseAt(double t, bool clamp) const
    {
        double te = t;
        checkDomain(t, clamp, te);
        switch (source_)
        {
        case Source::Constant:
            return from_;
        case Source::Linear:
        {
            const double u = (te - t_start_) / (t_end_ - t_start_);
            return Pose2(from_.translation + u * (to_.translation - from_.translation),
                         from_.yaw + u * (to_.yaw - from_.yaw));
        }
        case Source::TrajectoryBacked:
        {
            double x, y, yaw;
            traj_->evalPose(te, x, y, yaw);
            return Pose2(Vec2(x, y), yaw);
        }
        }
        return from_;
    }

    Vec2 Motion::velocityAt(double t) const
    {
        double te = t;
        checkDomain(t, true, te);
        switch (source_)
        {
        case Source::Constant:
            return Vec2::Zero();
        case Source::Linear:
            return (to_.translation - from_.translation) / (t_end_ - t_start_);
        case Source::TrajectoryBacked:
            return traj_->evalClamped(te, 1).head<2>();
        }
        return Vec2::Zero();
    }

    double Motion::yawRateAt(double t) const
    {
        double te = t;
        checkDomain(t, true, te);
        switch (source_)
        {
        case Source::Constant:
            return 0.0;
        case Source::Linear:
            return (to_.yaw - from_.yaw) / (t_end_ - t_start_);
        case Source::TrajectoryBacked:
            return traj_->evalClamped(te, 1)(2);
        }
        return 0.0;
    }

    double Motion::maxSpeed() const { return max_speed_; }
    double Motion::maxYawRate() const { return max_yaw_rate_; }
    double Motion::pathLengthBound() const { return path_length_; }

} // namespace svsdf
