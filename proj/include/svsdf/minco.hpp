#ifndef SVSDF_MINCO_HPP
#define SVSDF_MINCO_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace svsdf
{

    // Unconstrained surrogate for positive segment durations:
    // T = softplus(tau) + kMinDuration.
    constexpr double kMinDuration = 0.01;

    inline double tauToDuration(double tau)
    {
        const double sp = tau > 0.0 ? tau + std::log1p(std::exp(-tau))
                                    : std::log1p(std::exp(tau));
        return sp + kMinDuration;
    }

    inline double durationToTau(double duration)
    {
        const double sp = duration - kMinDuration;
        if (!(sp > 0.0))
        {
            throw std::invalid_argument("duration must exceed the minimum duration");
        }
        // Inverse softplus, stable for large sp.
        return sp > 30.0 ? sp : std::log(std::expm1(sp));
    }

    inline double tauToDurationDerivative(double tau)
    {
        return 1.0 / (1.0 + std::exp(-tau));
    }

    // Banded LU without pivoting; storage and elimination follow the classic
    // band layout so factorization and solves stay O(N) in the segment count.
    class BandedSystem
    {
    public:
        BandedSystem() = default;
        BandedSystem(int n, int lower_bw, int upper_bw) { create(n, lower_bw, upper_bw); }

        void create(int n, int lower_bw, int upper_bw)
        {
            n_ = n;
            lower_ = lower_bw;
            upper_ = upper_bw;
            data_.assign(static_cast<size_t>(n) * (lower_ + upper_ + 1), 0.0);
        }

        void reset() { std::fill(data_.begin(), data_.end(), 0.0); }

        double &operator()(int i, int j)
        {
            return data_[static_cast<size_t>(i - j + upper_) * n_ + j];
        }
        double operator()(int i, int j) const
        {
            return data_[static_cast<size_t>(i - j + upper_) * n_ + j];
        }

        void factorizeLU()
        {
            for (int k = 0; k <= n_ - 2; ++k)
            {
                const int i_max = std::min(k + lower_, n_ - 1);
                const double pivot = operator()(k, k);
                if (std::abs(pivot) < 1e-300)
                {
                    throw std::runtime_error("banded system is singular");
                }
                for (int i = k + 1; i <= i_max; ++i)
                {
                    if (operator()(i, k) != 0.0)
                    {
                        operator()(i, k) /= pivot;
                    }
                }
                const int j_max = std::min(k + upper_, n_ - 1);
                for (int j = k + 1; j <= j_max; ++j)
                {
                    const double v = operator()(k, j);
                    if (v != 0.0)
                    {
                        for (int i = k + 1; i <= i_max; ++i)
                        {
                            if (operator()(i, k) != 0.0)
                            {
                                operator()(i, j) -= operator()(i, k) * v;
                            }
                        }
                    }
                }
            }
        }

        // Solves A x = b in place; b holds one right-hand side per column.
        template <typename Mat>
        void solve(Mat &b) const
        {
            for (int j = 0; j <= n_ - 1; ++j)
            {
                const int i_max = std::min(j + lower_, n_ - 1);
                for (int i = j + 1; i <= i_max; ++i)
                {
                    if (operator()(i, j) != 0.0)
                    {
                        b.row(i) -= operator()(i, j) * b.row(j);
                    }
                }
            }
            for (int j = n_ - 1; j >= 0; --j)
            {
                b.row(j) /= operator()(j, j);
                const int i_min = std::max(0, j - upper_);
                for (int i = i_min; i <= j - 1; ++i)
                {
                    if (operator()(i, j) != 0.0)
                    {
                        b.row(i) -= operator()(i, j) * b.row(j);
                    }
                }
            }
        }

        // Solves A^T x = b in place (adjoint pass for gradient propagation).
        template <typename Mat>
        void solveAdj(Mat &b) const
        {
            for (int j = 0; j <= n_ - 1; ++j)
            {
                b.row(j) /= operator()(j, j);
                const int i_max = std::min(j + upper_, n_ - 1);
                for (int i = j + 1; i <= i_max; ++i)
                {
                    if (operator()(j, i) != 0.0)
                    {
                        b.row(i) -= operator()(j, i) * b.row(j);
                    }
                }
            }
            for (int j = n_ - 1; j >= 0; --j)
            {
                const int i_min = std::max(0, j - lower_);
                for (int i = i_min; i <= j - 1; ++i)
                {
                    if (operator()(j, i) != 0.0)
                    {
                        b.row(i) -= operator()(j, i) * b.row(j);
                    }
                }
            }
        }

    private:
        int n_{0};
        int lower_{0};
        int upper_{0};
        std::vector<double> data_;
    };

    struct BoundaryState
    {
        Eigen::VectorXd position;
        Eigen::VectorXd velocity;
        Eigen::VectorXd acceleration;

        BoundaryState() = default;
        explicit BoundaryState(const Eigen::VectorXd &p)
            : position(p),
              velocity(Eigen::VectorXd::Zero(p.size())),
              acceleration(Eigen::VectorXd::Zero(p.size())) {}
        BoundaryState(const Eigen::VectorXd &p, const Eigen::VectorXd &v, const Eigen::VectorXd &a)
            : position(p), velocity(v), acceleration(a) {}
    };

    // Piecewise quintic p_i(t) = sum_k c_{i,k} t^k on [0, T_i], C^4 across
    // junctions; the unique minimizer of the integrated squared jerk under
    // boundary and waypoint interpolation constraints.
    class Trajectory
    {
    public:
        Trajectory() = default;

        int dims() const { return static_cast<int>(coeffs_.cols()); }
        int segments() const { return static_cast<int>(durations_.size()); }
        double totalDuration() const { return total_duration_; }
        const Eigen::MatrixXd &coeffs() const { return coeffs_; }
        const Eigen::VectorXd &durations() const { return durations_; }
        const BoundaryState &head() const { return head_; }
        const BoundaryState &tail() const { return tail_; }

        // Segment containing t; also returns the segment-local time.
        // Right-continuous at junctions, the final instant maps into the last
        // segment.
        int segmentIndex(double t, double &local) const;

        // k-th time derivative, k in [0, 5].
        Eigen::VectorXd eval(double t, int order = 0) const;
        Eigen::VectorXd evalClamped(double t, int order = 0) const;

        // Allocation-free position evaluation of the first three dimensions
        // (x, y, yaw), clamped to the domain; the hot path for sweep queries.
        void evalPose(double t, double &x, double &y, double &yaw) const
        {
            double local = 0.0;
            const int i = segmentIndex(std::clamp(t, 0.0, total_duration_), local);
            const int row = 6 * i;
            x = y = yaw = 0.0;
            for (int k = 5; k >= 0; --k)
            {
                x = x * local + coeffs_(row + k, 0);
                y = y * local + coeffs_(row + k, 1);
                yaw = yaw * local + coeffs_(row + k, 2);
            }
        }

        Eigen::MatrixXd waypoints() const; // dims x (segments-1)

    private:
        friend Trajectory mincoConstruct(const BoundaryState &, const BoundaryState &,
                                         const Eigen::MatrixXd &, const Eigen::VectorXd &);

        Eigen::VectorXd evalSegment(int segment, double local, int order) const;

        Eigen::MatrixXd coeffs_;     // 6N x m, row 6i+k holds the t^k coefficient
        Eigen::VectorXd durations_;  // N
        std::vector<double> starts_; // N, cumulative start times
        double total_duration_{0.0};
        BoundaryState head_, tail_;
    };

    // Maps waypoints and durations to quintic coefficients by solving the
    // banded interpolation/continuity system. waypoints is dims x (N-1) and
    // may be empty for N = 1.
    Trajectory mincoConstruct(const BoundaryState &head, const BoundaryState &tail,
                              const Eigen::MatrixXd &waypoints,
                              const Eigen::VectorXd &durations);

    struct WaypointGradient
    {
        Eigen::MatrixXd dq; // dims x (N-1)
        Eigen::VectorXd dT; // N
    };

    // Back-propagates a cost gradient expressed in coefficient space
    // (dJ_dc: 6N x m, dJ_dT: direct duration sensitivity) to waypoint and
    // duration space through the construction mapping.
    WaypointGradient propagateGradient(const Trajectory &traj,
                                       const Eigen::MatrixXd &dJ_dc,
                                       const Eigen::VectorXd &dJ_dT);

    // Integrated squared jerk in closed form; optional analytic gradients in
    // coefficient/duration space.
    double controlEffort(const Trajectory &traj,
                         Eigen::MatrixXd *dJ_dc = nullptr,
                         Eigen::VectorXd *dJ_dT = nullptr);

} // namespace svsdf

#endif
