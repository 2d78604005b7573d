#include "svsdf/minco.hpp"

#include <algorithm>

namespace svsdf
{

    namespace
    {

        // Assembles the 6N x 6N constraint matrix for given durations. Row
        // blocks per interior junction i (between segments i and i+1):
        //   jerk continuity, snap continuity, waypoint position, position
        //   continuity, velocity continuity, acceleration continuity,
        // bracketed by p/v/a rows at both trajectory ends. Bandwidth (6, 6).
        void assembleSystem(BandedSystem &A, const Eigen::VectorXd &T)
        {
            const int N = static_cast<int>(T.size());
            A.create(6 * N, 6, 6);

            A(0, 0) = 1.0;
            A(1, 1) = 1.0;
            A(2, 2) = 2.0;

            for (int i = 0; i < N - 1; ++i)
            {
                const double t1 = T(i);
                const double t2 = t1 * t1;
                const double t3 = t2 * t1;
                const double t4 = t2 * t2;
                const double t5 = t4 * t1;

                A(6 * i + 3, 6 * i + 3) = 6.0;
                A(6 * i + 3, 6 * i + 4) = 24.0 * t1;
                A(6 * i + 3, 6 * i + 5) = 60.0 * t2;
                A(6 * i + 3, 6 * i + 9) = -6.0;
                A(6 * i + 4, 6 * i + 4) = 24.0;
                A(6 * i + 4, 6 * i + 5) = 120.0 * t1;
                A(6 * i + 4, 6 * i + 10) = -24.0;
                A(6 * i + 5, 6 * i) = 1.0;
                A(6 * i + 5, 6 * i + 1) = t1;
                A(6 * i + 5, 6 * i + 2) = t2;
                A(6 * i + 5, 6 * i + 3) = t3;
                A(6 * i + 5, 6 * i + 4) = t4;
                A(6 * i + 5, 6 * i + 5) = t5;
                A(6 * i + 6, 6 * i) = 1.0;
                A(6 * i + 6, 6 * i + 1) = t1;
                A(6 * i + 6, 6 * i + 2) = t2;
                A(6 * i + 6, 6 * i + 3) = t3;
                A(6 * i + 6, 6 * i + 4) = t4;
                A(6 * i + 6, 6 * i + 5) = t5;
                A(6 * i + 6, 6 * i + 6) = -1.0;
                A(6 * i + 7, 6 * i + 1) = 1.0;
                A(6 * i + 7, 6 * i + 2) = 2.0 * t1;
                A(6 * i + 7, 6 * i + 3) = 3.0 * t2;
                A(6 * i + 7, 6 * i + 4) = 4.0 * t3;
                A(6 * i + 7, 6 * i + 5) = 5.0 * t4;
                A(6 * i + 7, 6 * i + 7) = -1.0;
                A(6 * i + 8, 6 * i + 2) = 2.0;
                A(6 * i + 8, 6 * i + 3) = 6.0 * t1;
                A(6 * i + 8, 6 * i + 4) = 12.0 * t2;
                A(6 * i + 8, 6 * i + 5) = 20.0 * t3;
                A(6 * i + 8, 6 * i + 8) = -2.0;
            }

            const double t1 = T(N - 1);
            const double t2 = t1 * t1;
            const double t3 = t2 * t1;
            const double t4 = t2 * t2;
            const double t5 = t4 * t1;
            A(6 * N - 3, 6 * N - 6) = 1.0;
            A(6 * N - 3, 6 * N - 5) = t1;
            A(6 * N - 3, 6 * N - 4) = t2;
            A(6 * N - 3, 6 * N - 3) = t3;
            A(6 * N - 3, 6 * N - 2) = t4;
            A(6 * N - 3, 6 * N - 1) = t5;
            A(6 * N - 2, 6 * N - 5) = 1.0;
            A(6 * N - 2, 6 * N - 4) = 2.0 * t1;
            A(6 * N - 2, 6 * N - 3) = 3.0 * t2;
            A(6 * N - 2, 6 * N - 2) = 4.0 * t3;
            A(6 * N - 2, 6 * N - 1) = 5.0 * t4;
            A(6 * N - 1, 6 * N - 4) = 2.0;
            A(6 * N - 1, 6 * N - 3) = 6.0 * t1;
            A(6 * N - 1, 6 * N - 2) = 12.0 * t2;
            A(6 * N - 1, 6 * N - 1) = 20.0 * t3;

            A.factorizeLU();
        }

        void checkBoundary(const BoundaryState &s, int dims, const char *which)
        {
            if (s.position.size() != dims || s.velocity.size() != dims ||
                s.acceleration.size() != dims)
            {
                throw std::invalid_argument(std::string(which) +
                                            " boundary state has inconsistent dimensions");
            }
        }

    } // namespace

    int Trajectory::segmentIndex(double t, double &local) const
    {
        const int N = segments();
        const auto it = std::upper_bound(starts_.begin() + 1, starts_.end(), t);
        int idx = static_cast<int>(it - starts_.begin()) - 1;
        idx = std::clamp(idx, 0, N - 1);
        local = std::clamp(t - starts_[idx], 0.0, durations_(idx));
        return idx;
    }

    Eigen::VectorXd Trajectory::evalSegment(int segment, double local, int order) const
    {
        Eigen::VectorXd value = Eigen::VectorXd::Zero(dims());
        // Horner over the surviving powers of the differentiated basis.
        for (int k = 5; k >= order; --k)
        {
            double factor = 1.0;
            for (int d = 0; d < order; ++d)
            {
                factor *= static_cast<double>(k - d);
            }
            value = value * local + factor * coeffs_.row(6 * segment + k).transpose();
        }
        return value;
    }

    Eigen::VectorXd Trajectory::eval(double t, int order) const
    {
        if (order < 0 || order > 5)
        {
            throw std::domain_error("derivative order must be in [0, 5]");
        }
        if (t < -1e-9 || t > total_duration_ + 1e-9)
        {
            throw std::domain_error("evaluation time outside trajectory domain");
        }
        double local = 0.0;
        const int idx = segmentIndex(std::clamp(t, 0.0, total_duration_), local);
        return evalSegment(idx, local, order);
    }

    Eigen::VectorXd Trajectory::evalClamped(double t, int order) const
    {
        return eval(std::clamp(t, 0.0, total_duration_), order);
    }

    Eigen::MatrixXd Trajectory::waypoints() const
    {
        const int N = segments();
        Eigen::MatrixXd q(dims(), std::max(N - 1, 0));
        for (int i = 0; i + 1 < N; ++i)
        {
            q.col(i) = evalSegment(i, durations_(i), 0);
        }
        return q;
    }

    Trajectory mincoConstruct(const BoundaryState &head, const BoundaryState &tail,
                              const Eigen::MatrixXd &waypoints,
                              const Eigen::VectorXd &durations)
    {
        const int N = static_cast<int>(durations.size());
        const int m = static_cast<int>(head.position.size());
        if (N < 1)
        {
            throw std::invalid_argument("trajectory needs at least one segment");
        }
        checkBoundary(head, m, "head");
        checkBoundary(tail, m, "tail");
        if (waypoints.size() > 0 && waypoints.rows() != m)
        {
            throw std::invalid_argument("waypoint dimension mismatch");
        }
        if (static_cast<int>(waypoints.cols()) != N - 1 && !(N == 1 && waypoints.size() == 0))
        {
            throw std::invalid_argument("need exactly N-1 waypoints");
        }
        for (int i = 0; i < N; ++i)
        {
            if (!(durations(i) > 1e-9) || !std::isfinite(durations(i)))
            {
                throw std::invalid_argument("segment durations must be positive");
            }
        }

        BandedSystem A;
        assembleSystem(A, durations);

        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6 * N, m);
        b.row(0) = head.position.transpose();
        b.row(1) = head.velocity.transpose();
        b.row(2) = head.acceleration.transpose();
        for (int i = 0; i < N - 1; ++i)
        {
            b.row(6 * i + 5) = waypoints.col(i).transpose();
        }
        b.row(6 * N - 3) = tail.position.transpose();
        b.row(6 * N - 2) = tail.velocity.transpose();
        b.row(6 * N - 1) = tail.acceleration.transpose();
        A.solve(b);

        Trajectory traj;
        traj.coeffs_ = std::move(b);
        traj.durations_ = durations;
        traj.starts_.resize(N);
        double acc = 0.0;
        for (int i = 0; i < N; ++i)
        {
            traj.starts_[i] = acc;
            acc += durations(i);
        }
        traj.total_duration_ = acc;
        traj.head_ = head;
        traj.tail_ = tail;
        return traj;
    }

    WaypointGradient propagateGradient(const Trajectory &traj,
                                       const Eigen::MatrixXd &dJ_dc,
                                       const Eigen::VectorXd &dJ_dT)
    {
        const int N = traj.segments();
        const int m = traj.dims();
        if (dJ_dc.rows() != 6 * N || dJ_dc.cols() != m || dJ_dT.size() != N)
        {
            throw std::invalid_argument("gradient dimensions do not match the trajectory");
        }

        BandedSystem A;
        assembleSystem(A, traj.durations());
        Eigen::MatrixXd adj = dJ_dc;
        A.solveAdj(adj);

        WaypointGradient out;
        out.dq.resize(m, std::max(N - 1, 0));
        out.dT = dJ_dT;

        const Eigen::MatrixXd &c = traj.coeffs();
        // dH/dT_i collects -adj^T d(Ac)/dT_i; only rows evaluating segment i
        // at its own duration depend on T_i, and their duration derivative is
        // the next-higher time derivative of the segment polynomial.
        for (int i = 0; i < N - 1; ++i)
        {
            out.dq.col(i) = adj.row(6 * i + 5).transpose();

            const double t1 = traj.durations()(i);
            const double t2 = t1 * t1;
            const double t3 = t2 * t1;
            const double t4 = t2 * t2;
            Eigen::MatrixXd rate(6, m);
            // Ordered as the junction rows: jerk cont -> snap, snap cont ->
            // crackle, waypoint and position cont -> velocity, velocity cont
            // -> acceleration, acceleration cont -> jerk.
            rate.row(0) = 24.0 * c.row(6 * i + 4) + 120.0 * t1 * c.row(6 * i + 5);
            rate.row(1) = 120.0 * c.row(6 * i + 5);
            rate.row(2) = c.row(6 * i + 1) + 2.0 * t1 * c.row(6 * i + 2) +
                          3.0 * t2 * c.row(6 * i + 3) + 4.0 * t3 * c.row(6 * i + 4) +
                          5.0 * t4 * c.row(6 * i + 5);
            rate.row(3) = rate.row(2);
            rate.row(4) = 2.0 * c.row(6 * i + 2) + 6.0 * t1 * c.row(6 * i + 3) +
                          12.0 * t2 * c.row(6 * i + 4) + 20.0 * t3 * c.row(6 * i + 5);
            rate.row(5) = 6.0 * c.row(6 * i + 3) + 24.0 * t1 * c.row(6 * i + 4) +
                          60.0 * t2 * c.row(6 * i + 5);
            out.dT(i) -= rate.cwiseProduct(adj.block(6 * i + 3, 0, 6, m)).sum();
        }

        const double t1 = traj.durations()(N - 1);
        const double t2 = t1 * t1;
        const double t3 = t2 * t1;
        const double t4 = t2 * t2;
        Eigen::MatrixXd rate(3, m);
        rate.row(0) = c.row(6 * N - 5) + 2.0 * t1 * c.row(6 * N - 4) +
                      3.0 * t2 * c.row(6 * N - 3) + 4.0 * t3 * c.row(6 * N - 2) +
                      5.0 * t4 * c.row(6 * N - 1);
        rate.row(1) = 2.0 * c.row(6 * N - 4) + 6.0 * t1 * c.row(6 * N - 3) +
                      12.0 * t2 * c.row(6 * N - 2) + 20.0 * t3 * c.row(6 * N - 1);
        rate.row(2) = 6.0 * c.row(6 * N - 3) + 24.0 * t1 * c.row(6 * N - 2) +
                      60.0 * t2 * c.row(6 * N - 1);
        out.dT(N - 1) -= rate.cwiseProduct(adj.block(6 * N - 3, 0, 3, m)).sum();

        return out;
    }

    double controlEffort(const Trajectory &traj,
                         Eigen::MatrixXd *dJ_dc, Eigen::VectorXd *dJ_dT)
    {
        const int N = traj.segments();
        const int m = traj.dims();
        const Eigen::MatrixXd &c = traj.coeffs();
        if (dJ_dc != nullptr)
        {
            dJ_dc->setZero(6 * N, m);
        }
        if (dJ_dT != nullptr)
        {
            dJ_dT->setZero(N);
        }

        double energy = 0.0;
        for (int i = 0; i < N; ++i)
        {
            const double t1 = traj.durations()(i);
            const double t2 = t1 * t1;
            const double t3 = t2 * t1;
            const double t4 = t2 * t2;
            const double t5 = t4 * t1;
            const auto c3 = c.row(6 * i + 3);
            const auto c4 = c.row(6 * i + 4);
            const auto c5 = c.row(6 * i + 5);
            energy += 36.0 * c3.squaredNorm() * t1 +
                      144.0 * c4.dot(c3) * t2 +
                      192.0 * c4.squaredNorm() * t3 +
                      240.0 * c5.dot(c3) * t3 +
                      720.0 * c5.dot(c4) * t4 +
                      720.0 * c5.squaredNorm() * t5;
            if (dJ_dc != nullptr)
            {
                dJ_dc->row(6 * i + 3) = 72.0 * c3 * t1 + 144.0 * c4 * t2 + 240.0 * c5 * t3;
                dJ_dc->row(6 * i + 4) = 144.0 * c3 * t2 + 384.0 * c4 * t3 + 720.0 * c5 * t4;
                dJ_dc->row(6 * i + 5) = 240.0 * c3 * t3 + 720.0 * c4 * t4 + 1440.0 * c5 * t5;
            }
            if (dJ_dT != nullptr)
            {
                // d/dT of the segment integral is the squared jerk at T.
                (*dJ_dT)(i) = 36.0 * c3.squaredNorm() +
                              288.0 * c4.dot(c3) * t1 +
                              576.0 * c4.squaredNorm() * t2 +
                              720.0 * c5.dot(c3) * t2 +
                              2880.0 * c5.dot(c4) * t3 +
                              3600.0 * c5.squaredNorm() * t4;
            }
        }
        return energy;
    }

} // namespace svsdf
