#ifndef SVSDF_GEOMETRY_HPP
#define SVSDF_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace svsdf
{

    using Vec2 = Eigen::Vector2d;
    using Mat2 = Eigen::Matrix2d;

    inline Mat2 rotationMatrix(double yaw)
    {
        const double c = std::cos(yaw);
        const double s = std::sin(yaw);
        Mat2 r;
        r << c, -s,
            s, c;
        return r;
    }

    // Planar rigid transform: x_world = rot(yaw) * x_body + translation.
    struct Pose2
    {
        Vec2 translation{0.0, 0.0};
        double yaw{0.0};

        Pose2() = default;
        Pose2(const Vec2 &t, double y) : translation(t), yaw(y) {}
        Pose2(double x, double y, double psi) : translation(x, y), yaw(psi) {}

        inline Vec2 bodyToWorld(const Vec2 &p) const
        {
            const double c = std::cos(yaw), s = std::sin(yaw);
            return Vec2(c * p.x() - s * p.y() + translation.x(),
                        s * p.x() + c * p.y() + translation.y());
        }

        inline Vec2 worldToBody(const Vec2 &p) const
        {
            const double c = std::cos(yaw), s = std::sin(yaw);
            const double dx = p.x() - translation.x();
            const double dy = p.y() - translation.y();
            return Vec2(c * dx + s * dy, -s * dx + c * dy);
        }
    };

    // A rigid (or minimally deformable) body with an exact signed distance
    // function in its own frame. shape_time in [0, 1] selects the instantaneous
    // geometry of time-varying bodies and is ignored by static kinds.
    class Shape
    {
    public:
        enum class Kind
        {
            Disk,
            Box,
            ConvexPolygon,
            Polygon,
            Union,
            ScalingDisk
        };

        Shape() = default;

        static Shape disk(double radius);
        static Shape box(const Vec2 &half_extents);
        static Shape convexPolygon(std::vector<Vec2> vertices);
        static Shape polygon(std::vector<Vec2> vertices);
        // Disk whose radius varies affinely over normalized shape time:
        // r(s) = r_start + (r_end - r_start) * s.
        static Shape scalingDisk(double r_start, double r_end);
        // Union of parts, each placed by a fixed local pose. The SDF is the
        // min over parts: exact outside the union, a (correct-sign) upper
        // bound on depth inside overlapping regions.
        static Shape unionOf(std::vector<Shape> parts, std::vector<Pose2> poses);

        Kind kind() const { return kind_; }
        double boundingRadius() const { return bounding_radius_; }
        bool isTimeVarying() const;

        double sdf(const Vec2 &local_point, double shape_time = 0.0) const;
        // Subgradient of the SDF, unit norm away from the medial axis. At
        // non-smooth points the nearest feature with the lowest index wins.
        Vec2 sdfGradient(const Vec2 &local_point, double shape_time = 0.0) const;

        const std::vector<Vec2> &vertices() const { return vertices_; }
        double diskRadius() const { return radius_start_; }
        double radiusStart() const { return radius_start_; }
        double radiusEnd() const { return radius_end_; }
        const Vec2 &halfExtents() const { return half_extents_; }
        const std::vector<Shape> &parts() const { return parts_; }
        const std::vector<Pose2> &partPoses() const { return part_poses_; }

    private:
        double polygonSdf(const Vec2 &p) const;
        Vec2 polygonGradient(const Vec2 &p) const;

        Kind kind_{Kind::Disk};
        double radius_start_{1.0};
        double radius_end_{1.0};
        Vec2 half_extents_{0.5, 0.5};
        std::vector<Vec2> vertices_;
        std::vector<Shape> parts_;
        std::vector<Pose2> part_poses_;
        double bounding_radius_{1.0};
    };

} // namespace svsdf

#endif
