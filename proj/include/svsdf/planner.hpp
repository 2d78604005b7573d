#ifndef SVSDF_PLANNER_HPP
#define SVSDF_PLANNER_HPP

#include "svsdf/astar.hpp"
#include "svsdf/gsip.hpp"
#include "svsdf/minco.hpp"
#include "svsdf/motion.hpp"
#include "svsdf/optim.hpp"
#include "svsdf/scene.hpp"

#include <memory>
#include <optional>
#include <string>

namespace svsdf
{

    struct PlannerConfig
    {
        // Cost weights and limits.
        double lambda_m = 1.0;
        double lambda_t = 20.0;
        double lambda_p = 1000.0;
        double lambda_R = 32000.0;
        double lambda_o = 4000.0;
        double lambda_v = 1000.0;
        double lambda_a = 1000.0;
        double lambda_j = 1000.0;
        double v_max = 10.0;
        double a_max = 5.0;
        double j_max = 10.0;
        double s_thr = 0.366;
        int kappa = 32;
        double mu = 0.01;

        // Front-end discretization.
        int yaw_channels = 36;

        // Initial-guess shaping.
        double waypoint_spacing = 0.6; // metres of arc length per segment
        double reference_speed_fraction = 0.5;

        // Optimizer budgets.
        int midend_max_evals = 300;
        int backend_max_evals = 160;
        double midend_grad_tol = 1e-3;
        double backend_grad_tol = 1e-3;

        // Obstacle handling.
        double cull_margin = 1.0;
        int metric_steps_per_segment = 16;
        // Golden-section time tolerance for back-end metric queries; coarser
        // than the library default because epsilon dominates the error there.
        double metric_time_tolerance = 1e-5;
        int cca_time_samples = 10000;

        GsipConfig gsip{}; // epsilon kept at s_thr / 2 by defaults()

        static PlannerConfig defaults()
        {
            PlannerConfig c;
            c.gsip.epsilon = c.s_thr / 2.0;
            return c;
        }

        // Named override for CLI --set key=value; false if the key is unknown.
        bool set(const std::string &key, double value);
    };

    struct StageCosts
    {
        double total{0.0};
        double smoothness{0.0};
        double time{0.0};
        double position_residual{0.0};
        double yaw_residual{0.0};
        double obstacle{0.0};
        double dynamic{0.0};
    };

    struct PlanReport
    {
        bool success{false};
        bool cca_pass{false};
        double min_clearance{0.0};
        int astar_expansions{0};
        int midend_iterations{0};
        int backend_iterations{0};
        double final_obstacle_cost{0.0}; // G_o at the final trajectory, cold evaluation
        double min_obstacle_svsdf{0.0};  // min over culled obstacle points
        int culled_obstacles{0};
        StageCosts midend_costs{};
        StageCosts backend_costs{};
        double wall_time_ms{0.0};
        std::string warning;
        std::string failure;
    };

    struct PlanResult
    {
        AStarResult astar;
        std::shared_ptr<const Trajectory> initial; // mid-end output
        std::shared_ptr<const Trajectory> final;   // back-end output
        PlanReport report;
    };

    // Seed data distilled from the front-end path: MINCO boundary states,
    // waypoints and durations, plus frozen per-sample references for the
    // fitting residuals (nearest key node by initial timestamp).
    struct InitialGuess
    {
        BoundaryState head;
        BoundaryState tail;
        Eigen::MatrixXd waypoints; // 3 x (N-1)
        Eigen::VectorXd durations; // N
        std::vector<Vec2> ref_positions; // N * (kappa + 1) sample slots
        std::vector<double> ref_yaws;
    };

    // Mid-end cost: lambda_m J_m + lambda_t J_t + lambda_p G_p + lambda_R G_R
    // over (q, tau), with residuals pushed through the C^2 smoothing penalty
    // at kappa + 1 samples per segment (trapezoid-weighted time integral).
    class MidendObjective
    {
    public:
        MidendObjective(const PlannerConfig &config, InitialGuess guess);

        int segments() const { return static_cast<int>(guess_.durations.size()); }
        int variableCount() const { return 3 * (segments() - 1) + segments(); }

        Eigen::VectorXd pack(const Eigen::MatrixXd &q, const Eigen::VectorXd &tau) const;
        void unpack(const Eigen::VectorXd &x, Eigen::MatrixXd &q, Eigen::VectorXd &tau) const;
        Eigen::VectorXd initialVariables() const;

        double operator()(const Eigen::VectorXd &x, Eigen::VectorXd &grad) const;
        Trajectory build(const Eigen::VectorXd &x) const;
        StageCosts costs(const Eigen::VectorXd &x) const;

    private:
        double evaluate(const Eigen::VectorXd &x, Eigen::VectorXd *grad, StageCosts *costs) const;

        PlannerConfig config_;
        InitialGuess guess_;
    };

    // Back-end cost: G_d + lambda_o G_o + lambda_m J_m + lambda_t J_t over
    // (q, tau). Obstacle terms query the swept-volume SDF at culled obstacle
    // points with the current trajectory as the motion; their parameter
    // gradient is transported through the minimizing time and tangent point
    // (envelope rule), so only the coefficients of the active segment receive
    // obstacle gradient.
    class BackendObjective
    {
    public:
        BackendObjective(const Shape &shape, const PlannerConfig &config,
                         BoundaryState head, BoundaryState tail,
                         std::vector<Vec2> obstacle_points);

        int segments() const { return segments_; }
        void setSegments(int n) { segments_ = n; }
        int variableCount() const { return 3 * (segments_ - 1) + segments_; }

        Eigen::VectorXd pack(const Eigen::MatrixXd &q, const Eigen::VectorXd &tau) const;
        void unpack(const Eigen::VectorXd &x, Eigen::MatrixXd &q, Eigen::VectorXd &tau) const;

        // Warm seeding of per-point query radii across evaluations (safe
        // margin added); disable for finite-difference verification.
        void setWarmStart(bool on) { warm_ = on; }

        double operator()(const Eigen::VectorXd &x, Eigen::VectorXd &grad) const;
        Trajectory build(const Eigen::VectorXd &x) const;
        StageCosts costs(const Eigen::VectorXd &x) const;

        struct ObstacleMetrics
        {
            double g_o{0.0};
            double min_svsdf{std::numeric_limits<double>::infinity()};
        };
        // Cold full-precision pass over the obstacle points.
        ObstacleMetrics obstacleMetrics(const Trajectory &traj) const;

        SweepProblem makeProblem(const Trajectory &traj) const;
        const std::vector<Vec2> &obstacles() const { return obstacles_; }

    private:
        double evaluate(const Eigen::VectorXd &x, Eigen::VectorXd *grad, StageCosts *costs) const;

        Shape shape_;
        PlannerConfig config_;
        BoundaryState head_, tail_;
        std::vector<Vec2> obstacles_;
        int segments_{0};
        bool warm_{true};
        mutable std::vector<double> warm_radius_;
    };

    struct CcaResult
    {
        bool pass{false};
        double min_clearance{0.0};
    };

    // Independent continuous-collision check: dense time sampling of the
    // body-frame SDF at every obstacle point, no shrinking-ball machinery.
    CcaResult ccaVerify(const Trajectory &traj, const Scene &scene, const Shape &shape,
                        int time_samples = 10000);

    class Planner
    {
    public:
        Planner(Scene scene, Shape shape, PlannerConfig config = PlannerConfig::defaults());

        const Scene &scene() const { return scene_; }
        const Shape &shape() const { return shape_; }
        const PlannerConfig &config() const { return config_; }
        const PoseChannelMasks &masks() const { return masks_; }

        InitialGuess initialGuess(const AStarResult &astar) const;
        // Obstacle points within the trajectory bounding box inflated by the
        // shape bounding radius, the safety threshold and the culling margin.
        std::vector<Vec2> cullObstacles(const Trajectory &traj) const;

        PlanResult plan(bool run_midend = true, bool run_backend = true) const;

    private:
        Scene scene_;
        Shape shape_;
        PlannerConfig config_;
        PoseChannelMasks masks_;
    };

} // namespace svsdf

#endif
