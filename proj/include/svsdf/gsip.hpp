#ifndef SVSDF_GSIP_HPP
#define SVSDF_GSIP_HPP

#include "svsdf/sweep_metric.hpp"

#include <stdexcept>
#include <vector>

namespace svsdf
{

    struct GsipConfig
    {
        // Convergence tolerance on the sampled constraint violation.
        double epsilon = 0.183;
        // Starting ball radius; non-positive selects a per-query sound
        // overestimate (min of "2 bounding radii + path length" and
        // "max reach to the sampled path + bounding radius").
        double initial_radius = 0.0;
        int samples_angular = 32;
        int samples_radial = 4;
        // Projected-ascent budget per refined sample, and how many of the
        // best samples receive it.
        int refine_steps = 8;
        int refine_top = 8;
        int max_iterations = 64;

        void validate() const
        {
            if (!(epsilon > 0.0))
            {
                throw std::invalid_argument("epsilon must be positive");
            }
            if (samples_angular < 8 || samples_radial < 2)
            {
                throw std::invalid_argument("need samples_angular >= 8 and samples_radial >= 2");
            }
            if (max_iterations < 1 || refine_steps < 0 || refine_top < 1)
            {
                throw std::invalid_argument("invalid iteration budget");
            }
        }
    };

    enum class QueryStatus
    {
        Exterior,     // positive distance, returned directly from the metric
        Interior,     // negative distance from the converged shrinking ball
        Boundary,     // |g(p)| within epsilon of the surface
        NonConverged, // iteration budget exhausted
        RadiusUnderflow
    };

    struct SvsdfResult
    {
        double value{0.0};
        double t_star{0.0};
        Vec2 tangent_point{0.0, 0.0};
        Vec2 gradient{0.0, 0.0};
        int iterations{0};
        QueryStatus status{QueryStatus::Exterior};
        // Sampled constraint violation at the last iteration (interior case).
        double violation{0.0};
        // False only near the medial axis where the direction is ambiguous.
        bool gradient_defined{true};
        // Shrinking-ball trace: radius entering each iteration and the
        // violation found there. radius_history[k+1] ==
        // radius_history[k] - violation_history[k] for every shrink step.
        std::vector<double> radius_history;
        std::vector<double> violation_history;
    };

    class GsipError : public std::runtime_error
    {
    public:
        GsipError(const std::string &what, double last_radius, double violation)
            : std::runtime_error(what), last_radius(last_radius), violation(violation) {}
        double last_radius;
        double violation;
    };

    // Sound per-query overestimate of |SVSDF(p)| used to seed the shrinking
    // ball.
    double initialRadiusBound(const SweepProblem &problem, const Vec2 &p);

    // Signed distance to the swept volume at p. Positive values come straight
    // from the conservative metric (exact outside); negative values from the
    // shrinking-ball iteration: sample the ball, refine the best samples by
    // projected ascent on g, stop once the largest violation drops under
    // epsilon, otherwise shrink the radius by exactly that violation.
    // warm_radius, when positive, overrides the initial radius (it must
    // overestimate |SVSDF(p)| for the result to remain exact).
    SvsdfResult trySvsdfQuery(const SweepProblem &problem, const GsipConfig &config,
                              const Vec2 &p, double warm_radius = 0.0);

    // As above but throws GsipError instead of returning a non-converged or
    // inconsistent status.
    SvsdfResult svsdfQuery(const SweepProblem &problem, const GsipConfig &config,
                           const Vec2 &p, double warm_radius = 0.0);

} // namespace svsdf

#endif
