#include "svsdf/geometry.hpp"

#include <algorithm>
#include <limits>

namespace svsdf
{

    namespace
    {

        double polygonSignedArea(const std::vector<Vec2> &v)
        {
            double a = 0.0;
            const size_t n = v.size();
            for (size_t i = 0, j = n - 1; i < n; j = i++)
            {
                a += v[j].x() * v[i].y() - v[i].x() * v[j].y();
            }
            return 0.5 * a;
        }

        bool segmentsIntersect(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d)
        {
            const auto cross = [](const Vec2 &u, const Vec2 &v)
            { return u.x() * v.y() - u.y() * v.x(); };
            const double d1 = cross(b - a, c - a);
            const double d2 = cross(b - a, d - a);
            const double d3 = cross(d - c, a - c);
            const double d4 = cross(d - c, b - c);
            return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
        }

        void validateSimplePolygon(const std::vector<Vec2> &v)
        {
            const size_t n = v.size();
            if (n < 3)
            {
                throw std::invalid_argument("polygon needs at least 3 vertices");
            }
            for (size_t i = 0, j = n - 1; i < n; j = i++)
            {
                if ((v[i] - v[j]).squaredNorm() < 1e-24)
                {
                    throw std::invalid_argument("polygon has a zero-length edge");
                }
            }
            if (std::abs(polygonSignedArea(v)) < 1e-12)
            {
                throw std::invalid_argument("polygon is degenerate (zero area)");
            }
            // Non-adjacent edge pairs must not cross.
            for (size_t i = 0; i < n; ++i)
            {
                const Vec2 &a = v[i];
                const Vec2 &b = v[(i + 1) % n];
                for (size_t j = i + 1; j < n; ++j)
                {
                    if (j == i || (j + 1) % n == i || (i + 1) % n == j)
                    {
                        continue;
                    }
                    if (segmentsIntersect(a, b, v[j], v[(j + 1) % n]))
                    {
                        throw std::invalid_argument("polygon is self-intersecting");
                    }
                }
            }
        }

        void validateConvex(const std::vector<Vec2> &v)
        {
            const size_t n = v.size();
            for (size_t i = 0; i < n; ++i)
            {
                const Vec2 e0 = v[(i + 1) % n] - v[i];
                const Vec2 e1 = v[(i + 2) % n] - v[(i + 1) % n];
                if (e0.x() * e1.y() - e0.y() * e1.x() < -1e-12)
                {
                    throw std::invalid_argument("vertices do not form a convex CCW polygon");
                }
            }
        }

        double maxVertexNorm(const std::vector<Vec2> &v)
        {
            double r = 0.0;
            for (const Vec2 &p : v)
            {
                r = std::max(r, p.norm());
            }
            return r;
        }

    } // namespace

    Shape Shape::disk(double radius)
    {
        if (!(radius > 0.0))
        {
            throw std::invalid_argument("disk radius must be positive");
        }
        Shape s;
        s.kind_ = Kind::Disk;
        s.radius_start_ = s.radius_end_ = radius;
        s.bounding_radius_ = radius;
        return s;
    }

    Shape Shape::box(const Vec2 &half_extents)
    {
        if (!(half_extents.x() > 0.0) || !(half_extents.y() > 0.0))
        {
            throw std::invalid_argument("box half extents must be positive");
        }
        Shape s;
        s.kind_ = Kind::Box;
        s.half_extents_ = half_extents;
        s.bounding_radius_ = half_extents.norm();
        return s;
    }

    Shape Shape::convexPolygon(std::vector<Vec2> vertices)
    {
        validateSimplePolygon(vertices);
        if (polygonSignedArea(vertices) < 0.0)
        {
            std::reverse(vertices.begin(), vertices.end());
        }
        validateConvex(vertices);
        Shape s;
        s.kind_ = Kind::ConvexPolygon;
        s.bounding_radius_ = maxVertexNorm(vertices);
        s.vertices_ = std::move(vertices);
        return s;
    }

    Shape Shape::polygon(std::vector<Vec2> vertices)
    {
        validateSimplePolygon(vertices);
        if (polygonSignedArea(vertices) < 0.0)
        {
            std::reverse(vertices.begin(), vertices.end());
        }
        Shape s;
        s.kind_ = Kind::Polygon;
        s.bounding_radius_ = maxVertexNorm(vertices);
        s.vertices_ = std::move(vertices);
        return s;
    }

    Shape Shape::scalingDisk(double r_start, double r_end)
    {
        if (!(r_start > 0.0) || !(r_end > 0.0))
        {
            throw std::invalid_argument("scaling disk radii must be positive");
        }
        Shape s;
        s.kind_ = Kind::ScalingDisk;
        s.radius_start_ = r_start;
        s.radius_end_ = r_end;
        s.bounding_radius_ = std::max(r_start, r_end);
        return s;
    }

    Shape Shape::unionOf(std::vector<Shape> parts, std::vector<Pose2> poses)
    {
        if (parts.empty() || parts.size() != poses.size())
        {
            throw std::invalid_argument("union needs one pose per part and at least one part");
        }
        Shape s;
        s.kind_ = Kind::Union;
        s.bounding_radius_ = 0.0;
        for (size_t i = 0; i < parts.size(); ++i)
        {
            s.bounding_radius_ = std::max(
                s.bounding_radius_, poses[i].translation.norm() + parts[i].boundingRadius());
        }
        s.parts_ = std::move(parts);
        s.part_poses_ = std::move(poses);
        return s;
    }

    bool Shape::isTimeVarying() const
    {
        if (kind_ == Kind::ScalingDisk)
        {
            return radius_start_ != radius_end_;
        }
        if (kind_ == Kind::Union)
        {
            for (const Shape &p : parts_)
            {
                if (p.isTimeVarying())
                {
                    return true;
                }
            }
        }
        return false;
    }

    double Shape::sdf(const Vec2 &p, double shape_time) const
    {
        switch (kind_)
        {
        case Kind::Disk:
            return p.norm() - radius_start_;
        case Kind::ScalingDisk:
            return p.norm() - (radius_start_ + (radius_end_ - radius_start_) * shape_time);
        case Kind::Box:
        {
            const Vec2 q = p.cwiseAbs() - half_extents_;
            const Vec2 q_out = q.cwiseMax(0.0);
            return q_out.norm() + std::min(std::max(q.x(), q.y()), 0.0);
        }
        case Kind::ConvexPolygon:
        case Kind::Polygon:
            return polygonSdf(p);
        case Kind::Union:
        {
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < parts_.size(); ++i)
            {
                best = std::min(best, parts_[i].sdf(part_poses_[i].worldToBody(p), shape_time));
            }
            return best;
        }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    Vec2 Shape::sdfGradient(const Vec2 &p, double shape_time) const
    {
        switch (kind_)
        {
        case Kind::Disk:
        case Kind::ScalingDisk:
        {
            const double n = p.norm();
            return n > 1e-12 ? Vec2(p / n) : Vec2(1.0, 0.0);
        }
        case Kind::Box:
        {
            const Vec2 sgn(p.x() < 0.0 ? -1.0 : 1.0, p.y() < 0.0 ? -1.0 : 1.0);
            const Vec2 q = p.cwiseAbs() - half_extents_;
            if (q.x() > 0.0 || q.y() > 0.0)
            {
                const Vec2 q_out = q.cwiseMax(0.0);
                const Vec2 g = q_out / q_out.norm();
                return Vec2(sgn.x() * g.x(), sgn.y() * g.y());
            }
            // Interior: nearest face, x preferred on ties.
            if (q.x() >= q.y())
            {
                return Vec2(sgn.x(), 0.0);
            }
            return Vec2(0.0, sgn.y());
        }
        case Kind::ConvexPolygon:
        case Kind::Polygon:
            return polygonGradient(p);
        case Kind::Union:
        {
            double best = std::numeric_limits<double>::infinity();
            size_t best_i = 0;
            for (size_t i = 0; i < parts_.size(); ++i)
            {
                const double v = parts_[i].sdf(part_poses_[i].worldToBody(p), shape_time);
                if (v < best)
                {
                    best = v;
                    best_i = i;
                }
            }
            const Vec2 local = part_poses_[best_i].worldToBody(p);
            const Vec2 g = parts_[best_i].sdfGradient(local, shape_time);
            return rotationMatrix(part_poses_[best_i].yaw) * g;
        }
        }
        return Vec2(1.0, 0.0);
    }

    // Distance to the nearest edge, sign by crossing parity. Exact for any
    // simple polygon regardless of convexity.
    double Shape::polygonSdf(const Vec2 &p) const
    {
        const std::vector<Vec2> &v = vertices_;
        const size_t n = v.size();
        double d2 = (p - v[0]).squaredNorm();
        double sign = 1.0;
        for (size_t i = 0, j = n - 1; i < n; j = i++)
        {
            const Vec2 e = v[j] - v[i];
            const Vec2 w = p - v[i];
            const double h = std::clamp(w.dot(e) / e.squaredNorm(), 0.0, 1.0);
            d2 = std::min(d2, (w - e * h).squaredNorm());
            const bool c0 = p.y() >= v[i].y();
            const bool c1 = p.y() < v[j].y();
            const bool c2 = e.x() * w.y() > e.y() * w.x();
            if ((c0 && c1 && c2) || (!c0 && !c1 && !c2))
            {
                sign = -sign;
            }
        }
        return sign * std::sqrt(d2);
    }

    Vec2 Shape::polygonGradient(const Vec2 &p) const
    {
        const std::vector<Vec2> &v = vertices_;
        const size_t n = v.size();
        double best_d2 = std::numeric_limits<double>::infinity();
        Vec2 best_cp(0.0, 0.0);
        size_t best_edge = 0;
        double sign = 1.0;
        for (size_t i = 0, j = n - 1; i < n; j = i++)
        {
            const Vec2 e = v[j] - v[i];
            const Vec2 w = p - v[i];
            const double h = std::clamp(w.dot(e) / e.squaredNorm(), 0.0, 1.0);
            const Vec2 cp = v[i] + e * h;
            const double d2 = (p - cp).squaredNorm();
            if (d2 < best_d2)
            {
                best_d2 = d2;
                best_cp = cp;
                best_edge = i;
            }
            const bool c0 = p.y() >= v[i].y();
            const bool c1 = p.y() < v[j].y();
            const bool c2 = e.x() * w.y() > e.y() * w.x();
            if ((c0 && c1 && c2) || (!c0 && !c1 && !c2))
            {
                sign = -sign;
            }
        }
        const double d = std::sqrt(best_d2);
        if (d > 1e-12)
        {
            return sign * (p - best_cp) / d;
        }
        // On the boundary: outward normal of the nearest edge (CCW storage).
        const Vec2 e = v[(best_edge + n - 1) % n] - v[best_edge];
        const Vec2 normal(e.y(), -e.x());
        const double en = normal.norm();
        return en > 1e-12 ? Vec2(-normal / en) : Vec2(1.0, 0.0);
    }

} // namespace svsdf
