#include "svsdf/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace svsdf
{

    namespace
    {

        using Basis = Eigen::Matrix<double, 6, 1>;
        using SegmentCoeffs = Eigen::Matrix<double, 6, 3>;

        inline double wrapToPi(double a)
        {
            a = std::fmod(a + M_PI, 2.0 * M_PI);
            if (a < 0.0)
            {
                a += 2.0 * M_PI;
            }
            return a - M_PI;
        }

        inline Basis basis(double t, int order)
        {
            Basis b = Basis::Zero();
            switch (order)
            {
            case 0:
                b << 1.0, t, t * t, t * t * t, t * t * t * t, t * t * t * t * t;
                break;
            case 1:
                b << 0.0, 1.0, 2.0 * t, 3.0 * t * t, 4.0 * t * t * t, 5.0 * t * t * t * t;
                break;
            case 2:
                b << 0.0, 0.0, 2.0, 6.0 * t, 12.0 * t * t, 20.0 * t * t * t;
                break;
            case 3:
                b << 0.0, 0.0, 0.0, 6.0, 24.0 * t, 60.0 * t * t;
                break;
            default:
                b << 0.0, 0.0, 0.0, 0.0, 24.0, 120.0 * t;
                break;
            }
            return b;
        }

        Eigen::VectorXd packVariables(const Eigen::MatrixXd &q, const Eigen::VectorXd &tau)
        {
            Eigen::VectorXd x(q.size() + tau.size());
            int at = 0;
            for (int c = 0; c < q.cols(); ++c)
            {
                for (int r = 0; r < q.rows(); ++r)
                {
                    x(at++) = q(r, c);
                }
            }
            x.tail(tau.size()) = tau;
            return x;
        }

        void unpackVariables(const Eigen::VectorXd &x, int segments,
                             Eigen::MatrixXd &q, Eigen::VectorXd &tau)
        {
            q.resize(3, std::max(segments - 1, 0));
            int at = 0;
            for (int c = 0; c < q.cols(); ++c)
            {
                for (int r = 0; r < 3; ++r)
                {
                    q(r, c) = x(at++);
                }
            }
            tau = x.tail(segments);
        }

        Eigen::VectorXd durationsFromTau(const Eigen::VectorXd &tau)
        {
            Eigen::VectorXd T(tau.size());
            for (int i = 0; i < tau.size(); ++i)
            {
                T(i) = tauToDuration(tau(i));
            }
            return T;
        }

        // Smoothness + total-time terms shared by both stages.
        double smoothnessAndTime(const Trajectory &traj, const PlannerConfig &cfg,
                                 Eigen::MatrixXd *dc, Eigen::VectorXd *dT,
                                 StageCosts *costs)
        {
            Eigen::MatrixXd jerk_dc;
            Eigen::VectorXd jerk_dT;
            const double jm = controlEffort(traj, dc ? &jerk_dc : nullptr, dT ? &jerk_dT : nullptr);
            const double jt = traj.totalDuration();
            if (dc)
            {
                *dc += cfg.lambda_m * jerk_dc;
            }
            if (dT)
            {
                *dT += cfg.lambda_m * jerk_dT;
                dT->array() += cfg.lambda_t;
            }
            if (costs)
            {
                costs->smoothness = jm;
                costs->time = jt;
            }
            return cfg.lambda_m * jm + cfg.lambda_t * jt;
        }

        WaypointGradient toWaypointSpace(const Trajectory &traj, const Eigen::MatrixXd &dc,
                                         const Eigen::VectorXd &dT, const Eigen::VectorXd &tau)
        {
            WaypointGradient g = propagateGradient(traj, dc, dT);
            for (int i = 0; i < tau.size(); ++i)
            {
                g.dT(i) *= tauToDurationDerivative(tau(i));
            }
            return g;
        }

    } // namespace

    bool PlannerConfig::set(const std::string &key, double value)
    {
        if (key == "lambda_m")
        {
            lambda_m = value;
        }
        else if (key == "lambda_t")
        {
            lambda_t = value;
        }
        else if (key == "lambda_p")
        {
            lambda_p = value;
        }
        else if (key == "lambda_R")
        {
            lambda_R = value;
        }
        else if (key == "lambda_o")
        {
            lambda_o = value;
        }
        else if (key == "lambda_v")
        {
            lambda_v = value;
        }
        else if (key == "lambda_a")
        {
            lambda_a = value;
        }
        else if (key == "lambda_j")
        {
            lambda_j = value;
        }
        else if (key == "v_max")
        {
            v_max = value;
        }
        else if (key == "a_max")
        {
            a_max = value;
        }
        else if (key == "j_max")
        {
            j_max = value;
        }
        else if (key == "s_thr")
        {
            s_thr = value;
            gsip.epsilon = value / 2.0;
        }
        else if (key == "kappa")
        {
            kappa = static_cast<int>(value);
        }
        else if (key == "mu")
        {
            mu = value;
        }
        else if (key == "yaw_channels")
        {
            yaw_channels = static_cast<int>(value);
        }
        else if (key == "waypoint_spacing")
        {
            waypoint_spacing = value;
        }
        else if (key == "midend_max_evals")
        {
            midend_max_evals = static_cast<int>(value);
        }
        else if (key == "backend_max_evals")
        {
            backend_max_evals = static_cast<int>(value);
        }
        else if (key == "cull_margin")
        {
            cull_margin = value;
        }
        else if (key == "cca_time_samples")
        {
            cca_time_samples = static_cast<int>(value);
        }
        else if (key == "epsilon")
        {
            gsip.epsilon = value;
        }
        else if (key == "samples_angular")
        {
            gsip.samples_angular = static_cast<int>(value);
        }
        else if (key == "samples_radial")
        {
            gsip.samples_radial = static_cast<int>(value);
        }
        else if (key == "refine_steps")
        {
            gsip.refine_steps = static_cast<int>(value);
        }
        else if (key == "max_iterations")
        {
            gsip.max_iterations = static_cast<int>(value);
        }
        else
        {
            return false;
        }
        return true;
    }

    // ------------------------------------------------------------------ midend

    MidendObjective::MidendObjective(const PlannerConfig &config, InitialGuess guess)
        : config_(config), guess_(std::move(guess)) {}

    Eigen::VectorXd MidendObjective::pack(const Eigen::MatrixXd &q, const Eigen::VectorXd &tau) const
    {
        return packVariables(q, tau);
    }

    void MidendObjective::unpack(const Eigen::VectorXd &x, Eigen::MatrixXd &q,
                                 Eigen::VectorXd &tau) const
    {
        unpackVariables(x, segments(), q, tau);
    }

    Eigen::VectorXd MidendObjective::initialVariables() const
    {
        Eigen::VectorXd tau(guess_.durations.size());
        for (int i = 0; i < tau.size(); ++i)
        {
            tau(i) = durationToTau(guess_.durations(i));
        }
        return packVariables(guess_.waypoints, tau);
    }

    Trajectory MidendObjective::build(const Eigen::VectorXd &x) const
    {
        Eigen::MatrixXd q;
        Eigen::VectorXd tau;
        unpack(x, q, tau);
        return mincoConstruct(guess_.head, guess_.tail, q, durationsFromTau(tau));
    }

    StageCosts MidendObjective::costs(const Eigen::VectorXd &x) const
    {
        StageCosts c;
        evaluate(x, nullptr, &c);
        return c;
    }

    double MidendObjective::operator()(const Eigen::VectorXd &x, Eigen::VectorXd &grad) const
    {
        return evaluate(x, &grad, nullptr);
    }

    double MidendObjective::evaluate(const Eigen::VectorXd &x, Eigen::VectorXd *grad,
                                     StageCosts *costs) const
    {
        Eigen::MatrixXd q;
        Eigen::VectorXd tau;
        unpack(x, q, tau);
        const Eigen::VectorXd T = durationsFromTau(tau);
        const Trajectory traj = mincoConstruct(guess_.head, guess_.tail, q, T);
        const int N = segments();
        const int kappa = config_.kappa;

        Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(6 * N, 3);
        Eigen::VectorXd dT = Eigen::VectorXd::Zero(N);

        double total = smoothnessAndTime(traj, config_,
                                         grad ? &dc : nullptr, grad ? &dT : nullptr, costs);

        double pos_cost = 0.0;
        double yaw_cost = 0.0;
        for (int i = 0; i < N; ++i)
        {
            const SegmentCoeffs Ci = traj.coeffs().block<6, 3>(6 * i, 0);
            for (int j = 0; j <= kappa; ++j)
            {
                const double frac = static_cast<double>(j) / kappa;
                const double t_loc = T(i) * frac;
                const double omega = (j == 0 || j == kappa) ? 0.5 : 1.0;
                const double w = omega * T(i) / kappa;
                const Basis b0 = basis(t_loc, 0);
                const Basis b1 = basis(t_loc, 1);
                const Eigen::Vector3d p = Ci.transpose() * b0;
                const Eigen::Vector3d v = Ci.transpose() * b1;
                const size_t slot = static_cast<size_t>(i) * (kappa + 1) + j;

                const Vec2 e = p.head<2>() - guess_.ref_positions[slot];
                const SmoothedL1 lp = smoothedL1(e.squaredNorm(), config_.mu);
                pos_cost += config_.lambda_p * w * lp.value;

                const double dyaw = p(2) - guess_.ref_yaws[slot];
                // ||rot(d) - I||_F^2 = 4 (1 - cos d)
                const SmoothedL1 lr = smoothedL1(4.0 * (1.0 - std::cos(dyaw)), config_.mu);
                yaw_cost += config_.lambda_R * w * lr.value;

                if (grad)
                {
                    const double cp = config_.lambda_p * w * lp.derivative * 2.0;
                    dc.block<6, 1>(6 * i, 0) += cp * e.x() * b0;
                    dc.block<6, 1>(6 * i, 1) += cp * e.y() * b0;
                    const double cr =
                        config_.lambda_R * w * lr.derivative * 4.0 * std::sin(dyaw);
                    dc.block<6, 1>(6 * i, 2) += cr * b0;
                    dT(i) += config_.lambda_p * (omega / kappa) * lp.value +
                             cp * (e.dot(v.head<2>())) * frac +
                             config_.lambda_R * (omega / kappa) * lr.value +
                             cr * v(2) * frac;
                }
            }
        }
        total += pos_cost + yaw_cost;

        if (costs)
        {
            costs->position_residual = pos_cost;
            costs->yaw_residual = yaw_cost;
            costs->total = total;
        }
        if (grad)
        {
            const WaypointGradient g = toWaypointSpace(traj, dc, dT, tau);
            *grad = packVariables(g.dq, g.dT);
        }
        return total;
    }

    // ----------------------------------------------------------------- backend

    BackendObjective::BackendObjective(const Shape &shape, const PlannerConfig &config,
                                       BoundaryState head, BoundaryState tail,
                                       std::vector<Vec2> obstacle_points)
        : shape_(shape), config_(config), head_(std::move(head)), tail_(std::move(tail)),
          obstacles_(std::move(obstacle_points))
    {
        warm_radius_.assign(obstacles_.size(), 0.0);
    }

    Eigen::VectorXd BackendObjective::pack(const Eigen::MatrixXd &q,
                                           const Eigen::VectorXd &tau) const
    {
        return packVariables(q, tau);
    }

    void BackendObjective::unpack(const Eigen::VectorXd &x, Eigen::MatrixXd &q,
                                  Eigen::VectorXd &tau) const
    {
        unpackVariables(x, segments_, q, tau);
    }

    Trajectory BackendObjective::build(const Eigen::VectorXd &x) const
    {
        Eigen::MatrixXd q;
        Eigen::VectorXd tau;
        unpack(x, q, tau);
        return mincoConstruct(head_, tail_, q, durationsFromTau(tau));
    }

    StageCosts BackendObjective::costs(const Eigen::VectorXd &x) const
    {
        StageCosts c;
        evaluate(x, nullptr, &c);
        return c;
    }

    double BackendObjective::operator()(const Eigen::VectorXd &x, Eigen::VectorXd &grad) const
    {
        return evaluate(x, &grad, nullptr);
    }

    SweepProblem BackendObjective::makeProblem(const Trajectory &traj) const
    {
        auto shared = std::make_shared<Trajectory>(traj);
        const int steps = std::max(64, config_.metric_steps_per_segment * traj.segments());
        return SweepProblem(shape_, Motion::trajectory(shared), steps,
                            config_.metric_time_tolerance);
    }

    double BackendObjective::evaluate(const Eigen::VectorXd &x, Eigen::VectorXd *grad,
                                      StageCosts *costs) const
    {
        Eigen::MatrixXd q;
        Eigen::VectorXd tau;
        unpack(x, q, tau);
        const Eigen::VectorXd T = durationsFromTau(tau);
        const Trajectory traj = mincoConstruct(head_, tail_, q, T);
        const int N = segments_;
        const int kappa = config_.kappa;

        Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(6 * N, 3);
        Eigen::VectorXd dT = Eigen::VectorXd::Zero(N);

        double total = smoothnessAndTime(traj, config_,
                                         grad ? &dc : nullptr, grad ? &dT : nullptr, costs);

        // Flat-output derivative limits on the translation channels.
        double dyn_cost = 0.0;
        const double v2_max = config_.v_max * config_.v_max;
        const double a2_max = config_.a_max * config_.a_max;
        const double j2_max = config_.j_max * config_.j_max;
        for (int i = 0; i < N; ++i)
        {
            const SegmentCoeffs Ci = traj.coeffs().block<6, 3>(6 * i, 0);
            for (int j = 0; j <= kappa; ++j)
            {
                const double frac = static_cast<double>(j) / kappa;
                const double t_loc = T(i) * frac;
                const double omega = (j == 0 || j == kappa) ? 0.5 : 1.0;
                const double w = omega * T(i) / kappa;
                const Basis b1 = basis(t_loc, 1);
                const Basis b2 = basis(t_loc, 2);
                const Basis b3 = basis(t_loc, 3);
                const Basis b4 = basis(t_loc, 4);
                const Vec2 v = (Ci.transpose() * b1).head<2>();
                const Vec2 a = (Ci.transpose() * b2).head<2>();
                const Vec2 jk = (Ci.transpose() * b3).head<2>();
                const Vec2 sn = (Ci.transpose() * b4).head<2>();

                const auto addTerm = [&](double weight, double norm2, double limit2,
                                         const Vec2 &deriv, const Vec2 &next, const Basis &bk)
                {
                    const SmoothedL1 l = smoothedL1(norm2 - limit2, config_.mu);
                    if (l.value == 0.0)
                    {
                        return;
                    }
                    dyn_cost += weight * w * l.value;
                    if (grad)
                    {
                        const double cw = weight * w * l.derivative * 2.0;
                        dc.block<6, 1>(6 * i, 0) += cw * deriv.x() * bk;
                        dc.block<6, 1>(6 * i, 1) += cw * deriv.y() * bk;
                        dT(i) += weight * (omega / kappa) * l.value +
                                 cw * deriv.dot(next) * frac;
                    }
                };
                addTerm(config_.lambda_v, v.squaredNorm(), v2_max, v, a, b1);
                addTerm(config_.lambda_a, a.squaredNorm(), a2_max, a, jk, b2);
                addTerm(config_.lambda_j, jk.squaredNorm(), j2_max, jk, sn, b3);
            }
        }
        total += dyn_cost;

        // Obstacle penalty through the swept-volume SDF. The gradient is
        // transported with the minimizing time held fixed; duration
        // sensitivity vanishes because the swept geometry depends on the
        // coefficients only.
        double obs_cost = 0.0;
        if (!obstacles_.empty() && config_.lambda_o > 0.0)
        {
            const SweepProblem problem = makeProblem(traj);
            const Motion &motion = problem.motion();
            for (size_t idx = 0; idx < obstacles_.size(); ++idx)
            {
                const Vec2 &ob = obstacles_[idx];
                if (metricLowerBound(problem, ob) > config_.s_thr)
                {
                    continue;
                }
                const double seed = warm_ ? warm_radius_[idx] : 0.0;
                const SvsdfResult res = trySvsdfQuery(problem, config_.gsip, ob, seed);
                if (warm_)
                {
                    // Margin absorbs trajectory movement between evaluations.
                    warm_radius_[idx] = std::abs(res.value) + config_.s_thr;
                }
                const double violation = config_.s_thr - res.value;
                if (violation <= 0.0)
                {
                    continue;
                }
                const SmoothedL1 l = smoothedL1(violation, config_.mu);
                obs_cost += config_.lambda_o * l.value;
                if (!grad)
                {
                    continue;
                }
                const Vec2 y = (res.status == QueryStatus::Interior) ? res.tangent_point : ob;
                const Pose2 pose = motion.poseAt(res.t_star, true);
                const Vec2 local = pose.worldToBody(y);
                const Vec2 gl = shape_.sdfGradient(local, motion.shapeTime(res.t_star));
                const Vec2 d_trans = -(rotationMatrix(pose.yaw) * gl);
                const double d_yaw = gl.x() * local.y() - gl.y() * local.x();

                double t_loc = 0.0;
                const int seg = traj.segmentIndex(
                    std::clamp(res.t_star, 0.0, traj.totalDuration()), t_loc);
                const Basis b0 = basis(t_loc, 0);
                const double factor = -config_.lambda_o * l.derivative;
                dc.block<6, 1>(6 * seg, 0) += factor * d_trans.x() * b0;
                dc.block<6, 1>(6 * seg, 1) += factor * d_trans.y() * b0;
                dc.block<6, 1>(6 * seg, 2) += factor * d_yaw * b0;
            }
        }
        total += obs_cost;

        if (costs)
        {
            costs->dynamic = dyn_cost;
            costs->obstacle = obs_cost;
            costs->total = total;
        }
        if (grad)
        {
            const WaypointGradient g = toWaypointSpace(traj, dc, dT, tau);
            *grad = packVariables(g.dq, g.dT);
        }
        return total;
    }

    BackendObjective::ObstacleMetrics BackendObjective::obstacleMetrics(const Trajectory &traj) const
    {
        ObstacleMetrics metrics;
        if (obstacles_.empty())
        {
            metrics.g_o = 0.0;
            return metrics;
        }
        const SweepProblem problem = makeProblem(traj);
        for (const Vec2 &ob : obstacles_)
        {
            double value;
            if (metricLowerBound(problem, ob) > config_.s_thr)
            {
                value = metricLowerBound(problem, ob);
            }
            else
            {
                value = trySvsdfQuery(problem, config_.gsip, ob).value;
            }
            metrics.min_svsdf = std::min(metrics.min_svsdf, value);
            const double violation = config_.s_thr - value;
            if (violation > 0.0)
            {
                metrics.g_o += smoothedL1(violation, config_.mu).value;
            }
        }
        return metrics;
    }

    // --------------------------------------------------------------- verifier

    CcaResult ccaVerify(const Trajectory &traj, const Scene &scene, const Shape &shape,
                        int time_samples)
    {
        if (time_samples < 2)
        {
            throw std::invalid_argument("need at least 2 time samples");
        }
        CcaResult result;
        if (scene.obstacle_points.empty())
        {
            result.pass = true;
            result.min_clearance = std::numeric_limits<double>::infinity();
            return result;
        }

        const double total = traj.totalDuration();
        const double dt = total / (time_samples - 1);
        std::vector<Pose2> poses(time_samples);
        std::vector<double> stimes(time_samples);
        for (int i = 0; i < time_samples; ++i)
        {
            const double t = dt * i;
            const Eigen::VectorXd v = traj.evalClamped(t, 0);
            poses[i] = Pose2(Vec2(v(0), v(1)), v(2));
            stimes[i] = total > 0.0 ? t / total : 0.0;
        }

        const double rb = shape.boundingRadius();
        double best = std::numeric_limits<double>::infinity();
        for (const Vec2 &ob : scene.obstacle_points)
        {
            for (int i = 0; i < time_samples; ++i)
            {
                const double center_dist = (ob - poses[i].translation).norm();
                if (center_dist - rb >= best)
                {
                    continue;
                }
                const double d = shape.sdf(poses[i].worldToBody(ob), stimes[i]);
                best = std::min(best, d);
            }
        }
        result.min_clearance = best;
        result.pass = best > 0.0;
        return result;
    }

    // ---------------------------------------------------------------- planner

    Planner::Planner(Scene scene, Shape shape, PlannerConfig config)
        : scene_(std::move(scene)), shape_(std::move(shape)), config_(config),
          masks_(PoseChannelMasks::build(shape_, scene_.grid.cell_size, config.yaw_channels))
    {
    }

    InitialGuess Planner::initialGuess(const AStarResult &astar) const
    {
        if (astar.status != AStarStatus::Success || astar.nodes.empty())
        {
            throw std::invalid_argument("initial guess needs a successful search");
        }
        const size_t n = astar.nodes.size();
        std::vector<Vec2> pos(n);
        std::vector<double> yaw(n);
        double prev_yaw = scene_.start.yaw;
        for (size_t k = 0; k < n; ++k)
        {
            pos[k] = scene_.grid.cellCenter(astar.nodes[k].ix, astar.nodes[k].iy);
            const double raw = masks_.yaw_values[astar.nodes[k].yaw_index];
            yaw[k] = prev_yaw + wrapToPi(raw - prev_yaw);
            prev_yaw = yaw[k];
        }
        pos.front() = scene_.start.translation;
        yaw.front() = scene_.start.yaw;
        pos.back() = scene_.goal.translation;
        if (n >= 2)
        {
            yaw.back() = yaw[n - 2] + wrapToPi(scene_.goal.yaw - yaw[n - 2]);
        }
        else
        {
            yaw.back() = scene_.start.yaw + wrapToPi(scene_.goal.yaw - scene_.start.yaw);
        }

        std::vector<double> cumlen(n, 0.0);
        for (size_t k = 1; k < n; ++k)
        {
            cumlen[k] = cumlen[k - 1] + (pos[k] - pos[k - 1]).norm();
        }

        // Waypoints every waypoint_spacing metres of arc length.
        std::vector<size_t> picks{0};
        double mark = config_.waypoint_spacing;
        for (size_t k = 1; k + 1 < n; ++k)
        {
            if (cumlen[k] >= mark)
            {
                picks.push_back(k);
                mark = cumlen[k] + config_.waypoint_spacing;
            }
        }
        if (cumlen.back() - cumlen[picks.back()] < 0.5 * config_.waypoint_spacing &&
            picks.size() > 1)
        {
            picks.pop_back(); // avoid a stub final segment
        }
        picks.push_back(n - 1);

        InitialGuess guess;
        const int N = static_cast<int>(picks.size()) - 1;
        Eigen::Vector3d head_p(pos.front().x(), pos.front().y(), yaw.front());
        Eigen::Vector3d tail_p(pos.back().x(), pos.back().y(), yaw.back());
        guess.head = BoundaryState(head_p);
        guess.tail = BoundaryState(tail_p);
        guess.waypoints.resize(3, std::max(N - 1, 0));
        for (int i = 1; i < N; ++i)
        {
            const size_t k = picks[i];
            guess.waypoints.col(i - 1) = Eigen::Vector3d(pos[k].x(), pos[k].y(), yaw[k]);
        }
        guess.durations.resize(N);
        const double v_ref = std::max(0.1, config_.reference_speed_fraction * config_.v_max);
        for (int i = 0; i < N; ++i)
        {
            const double len = cumlen[picks[i + 1]] - cumlen[picks[i]];
            const double dyaw = std::abs(yaw[picks[i + 1]] - yaw[picks[i]]);
            guess.durations(i) = std::max({len / v_ref, dyaw / 3.0, 0.05});
        }

        // Frozen per-sample references: each node gets a timestamp by arc
        // length within its segment; a sample maps to the node whose
        // timestamp is nearest.
        std::vector<double> node_time(n, 0.0);
        std::vector<double> seg_start(N + 1, 0.0);
        for (int i = 0; i < N; ++i)
        {
            seg_start[i + 1] = seg_start[i] + guess.durations(i);
        }
        for (int i = 0; i < N; ++i)
        {
            const size_t k0 = picks[i];
            const size_t k1 = picks[i + 1];
            const double len = std::max(cumlen[k1] - cumlen[k0], 1e-12);
            for (size_t k = k0; k <= k1; ++k)
            {
                node_time[k] =
                    seg_start[i] + guess.durations(i) * (cumlen[k] - cumlen[k0]) / len;
            }
        }

        const int kappa = config_.kappa;
        guess.ref_positions.resize(static_cast<size_t>(N) * (kappa + 1));
        guess.ref_yaws.resize(static_cast<size_t>(N) * (kappa + 1));
        size_t cursor = 0;
        for (int i = 0; i < N; ++i)
        {
            for (int j = 0; j <= kappa; ++j)
            {
                const double t = seg_start[i] +
                                 guess.durations(i) * static_cast<double>(j) / kappa;
                while (cursor + 1 < n &&
                       std::abs(node_time[cursor + 1] - t) <= std::abs(node_time[cursor] - t))
                {
                    ++cursor;
                }
                const size_t slot = static_cast<size_t>(i) * (kappa + 1) + j;
                guess.ref_positions[slot] = pos[cursor];
                guess.ref_yaws[slot] = yaw[cursor];
            }
        }
        return guess;
    }

    std::vector<Vec2> Planner::cullObstacles(const Trajectory &traj) const
    {
        Vec2 lo(std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
        Vec2 hi = -lo;
        const int samples = std::max(32, 8 * traj.segments());
        for (int i = 0; i <= samples; ++i)
        {
            const double t = traj.totalDuration() * i / samples;
            const Eigen::VectorXd v = traj.evalClamped(t, 0);
            lo = lo.cwiseMin(Vec2(v(0), v(1)));
            hi = hi.cwiseMax(Vec2(v(0), v(1)));
        }
        const double pad = shape_.boundingRadius() + config_.s_thr + config_.cull_margin;
        std::vector<Vec2> culled;
        for (const Vec2 &ob : scene_.obstacle_points)
        {
            if (ob.x() >= lo.x() - pad && ob.x() <= hi.x() + pad &&
                ob.y() >= lo.y() - pad && ob.y() <= hi.y() + pad)
            {
                culled.push_back(ob);
            }
        }
        return culled;
    }

    PlanResult Planner::plan(bool run_midend, bool run_backend) const
    {
        const auto t_begin = std::chrono::steady_clock::now();
        PlanResult result;
        result.astar = astarSearch(scene_, masks_);
        result.report.astar_expansions = result.astar.expansions;

        const auto finish = [&]() -> PlanResult &
        {
            result.report.wall_time_ms =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                          t_begin)
                    .count();
            return result;
        };

        switch (result.astar.status)
        {
        case AStarStatus::Success:
            break;
        case AStarStatus::NoPath:
            result.report.failure = "no_path";
            return finish();
        case AStarStatus::InvalidStart:
            result.report.failure = "invalid_start";
            return finish();
        case AStarStatus::InvalidGoal:
            result.report.failure = "invalid_goal";
            return finish();
        }

        const InitialGuess guess = initialGuess(result.astar);
        MidendObjective midend(config_, guess);

        Eigen::VectorXd x = midend.initialVariables();
        if (run_midend)
        {
            LbfgsConfig lc;
            lc.grad_tolerance = config_.midend_grad_tol;
            lc.max_evaluations = config_.midend_max_evals;
            const LbfgsResult r = lbfgsMinimize(
                [&](const Eigen::VectorXd &v, Eigen::VectorXd &g)
                { return midend(v, g); },
                x, lc);
            x = r.x;
            result.report.midend_iterations = r.iterations;
            if (r.status == LbfgsStatus::InvalidInput)
            {
                result.report.warning = "midend_invalid_input";
            }
        }
        result.report.midend_costs = midend.costs(x);
        auto initial = std::make_shared<Trajectory>(midend.build(x));
        result.initial = initial;

        std::shared_ptr<const Trajectory> final_traj = initial;
        BackendObjective backend(shape_, config_, guess.head, guess.tail,
                                 cullObstacles(*initial));
        backend.setSegments(initial->segments());
        result.report.culled_obstacles = static_cast<int>(backend.obstacles().size());
        if (run_backend)
        {
            Eigen::VectorXd tau(initial->segments());
            for (int i = 0; i < tau.size(); ++i)
            {
                tau(i) = durationToTau(initial->durations()(i));
            }
            Eigen::VectorXd xb = backend.pack(initial->waypoints(), tau);
            LbfgsConfig lc;
            lc.grad_tolerance = config_.backend_grad_tol;
            lc.max_evaluations = config_.backend_max_evals;
            const LbfgsResult r = lbfgsMinimize(
                [&](const Eigen::VectorXd &v, Eigen::VectorXd &g)
                { return backend(v, g); },
                xb, lc);
            result.report.backend_iterations = r.iterations;
            if (r.status == LbfgsStatus::MaxEvaluations)
            {
                result.report.warning = "backend_eval_budget";
            }
            else if (r.status == LbfgsStatus::LineSearchFailed)
            {
                result.report.warning = "backend_line_search";
            }
            result.report.backend_costs = backend.costs(r.x);
            final_traj = std::make_shared<Trajectory>(backend.build(r.x));
        }
        result.final = final_traj;

        const BackendObjective::ObstacleMetrics metrics = backend.obstacleMetrics(*final_traj);
        result.report.final_obstacle_cost = metrics.g_o;
        result.report.min_obstacle_svsdf =
            backend.obstacles().empty() ? std::numeric_limits<double>::infinity()
                                        : metrics.min_svsdf;
        // The planner's own claim of continuous collision freedom: every
        // obstacle point clears the safety threshold up to the smoothing band.
        result.report.success = backend.obstacles().empty() ||
                                metrics.min_svsdf >= config_.s_thr - config_.mu;

        const CcaResult cca = ccaVerify(*final_traj, scene_, shape_, config_.cca_time_samples);
        result.report.cca_pass = cca.pass;
        result.report.min_clearance = cca.min_clearance;
        return finish();
    }

} // namespace svsdf
