#ifndef SVSDF_OPTIM_HPP
#define SVSDF_OPTIM_HPP

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace svsdf
{

    struct SmoothedL1
    {
        double value;
        double derivative;
    };

    // C^2 one-sided penalty:
    //   0                     x <= 0
    //   (mu - x/2)(x/mu)^3    0 < x <= mu
    //   x - mu/2              x > mu
    inline SmoothedL1 smoothedL1(double x, double mu)
    {
        if (x <= 0.0)
        {
            return {0.0, 0.0};
        }
        if (x <= mu)
        {
            const double ratio = x / mu;
            const double r2 = ratio * ratio;
            return {(mu - 0.5 * x) * r2 * ratio,
                    r2 * (3.0 * mu - 2.0 * x) / mu};
        }
        return {x - 0.5 * mu, 1.0};
    }

    enum class LbfgsStatus
    {
        Converged,
        MaxEvaluations,
        LineSearchFailed,
        InvalidInput
    };

    struct LbfgsConfig
    {
        int memory = 8;
        double grad_tolerance = 1e-6; // infinity norm
        int max_evaluations = 10000;
        int max_iterations = 1000;
        int max_line_search = 60;
        double c1 = 1e-4; // sufficient decrease
        double c2 = 0.9;  // curvature
        double step_max = 1e10;
        double step_min = 1e-20;
        // Optional per-iteration callback (accepted iterates only); return
        // false to stop early with the current best.
        std::function<bool(const Eigen::VectorXd &, double, int)> callback;
    };

    struct LbfgsResult
    {
        Eigen::VectorXd x;
        double value{0.0};
        LbfgsStatus status{LbfgsStatus::Converged};
        int iterations{0};
        int evaluations{0};
    };

    using Objective = std::function<double(const Eigen::VectorXd &, Eigen::VectorXd &)>;

    // Limited-memory BFGS with a strong-Wolfe cubic-interpolation line search.
    // Accepted iterates are non-increasing in objective value; a failed line
    // search returns the best point found so far rather than throwing.
    LbfgsResult lbfgsMinimize(const Objective &objective, const Eigen::VectorXd &x0,
                              const LbfgsConfig &config = {});

} // namespace svsdf

#endif
