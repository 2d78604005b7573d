#include "svsdf/gsip.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace svsdf
{

    namespace
    {

        constexpr double kGoldenAngle = 2.3999632297286533;

        struct Candidate
        {
            double g;
            Vec2 point;
            double t_star;
            Vec2 gradient;
        };

        // Projected gradient ascent on g inside the closed ball around p.
        // Step halves on failure; the start step covers the angular sample gap.
        Candidate refineCandidate(const SweepProblem &problem, const Vec2 &p, double radius,
                                  Candidate c, int steps, int samples_angular)
        {
            double step = radius * M_PI / samples_angular;
            for (int s = 0; s < steps && step > 1e-12 * radius; ++s)
            {
                Vec2 next = c.point + step * c.gradient;
                const double dist = (next - p).norm();
                if (dist > radius)
                {
                    next = p + (next - p) * (radius / dist);
                }
                const MetricResult trial = metricG(problem, next);
                if (trial.g_value > c.g)
                {
                    c.g = trial.g_value;
                    c.point = next;
                    c.t_star = trial.t_star;
                    c.gradient = trial.gradient;
                }
                else
                {
                    step *= 0.5;
                }
            }
            return c;
        }

    } // namespace

    double initialRadiusBound(const SweepProblem &problem, const Vec2 &p)
    {
        // Every swept point stays within the bounding radius of the sampled
        // path, so |SVSDF(p)| <= max reach + bounding radius. The path-length
        // bound is an alternative overestimate; take the tighter one.
        double reach = 0.0;
        for (const Vec2 &t : problem.gridTranslations())
        {
            reach = std::max(reach, (p - t).norm());
        }
        reach += 0.5 * problem.motion().maxSpeed() * problem.timeResolution();
        const double by_reach = reach + problem.boundingRadius();
        const double by_path =
            2.0 * problem.boundingRadius() + problem.motion().pathLengthBound();
        return std::min(by_reach, by_path) + 1e-9;
    }

    SvsdfResult trySvsdfQuery(const SweepProblem &problem, const GsipConfig &config,
                              const Vec2 &p, double warm_radius)
    {
        config.validate();
        SvsdfResult result;

        const MetricResult at_p = metricG(problem, p);
        if (at_p.g_value > config.epsilon)
        {
            result.value = at_p.g_value;
            result.t_star = at_p.t_star;
            result.gradient = at_p.gradient;
            result.tangent_point = p - at_p.g_value * at_p.gradient;
            result.status = QueryStatus::Exterior;
            return result;
        }
        if (at_p.g_value > -config.epsilon)
        {
            result.value = at_p.g_value;
            result.t_star = at_p.t_star;
            result.gradient = at_p.gradient;
            result.tangent_point = p - at_p.g_value * at_p.gradient;
            result.status = QueryStatus::Boundary;
            return result;
        }

        double radius = warm_radius > 0.0
                            ? warm_radius
                            : (config.initial_radius > 0.0 ? config.initial_radius
                                                           : initialRadiusBound(problem, p));
        // The ball may never start smaller than the depth already certified
        // by g(p).
        radius = std::max(radius, -at_p.g_value);

        const int n_theta = config.samples_angular;
        const int n_alpha = config.samples_radial;
        std::vector<Candidate> candidates;
        candidates.reserve(static_cast<size_t>(n_theta) * n_alpha);
        Candidate last_best{-std::numeric_limits<double>::infinity(), p, at_p.t_star,
                            at_p.gradient};

        for (int k = 0; k < config.max_iterations; ++k)
        {
            result.radius_history.push_back(radius);
            candidates.clear();
            const double offset = kGoldenAngle * k;
            for (int j = 1; j <= n_alpha; ++j)
            {
                const double alpha = static_cast<double>(j) / n_alpha;
                for (int i = 0; i < n_theta; ++i)
                {
                    const double theta = offset + 2.0 * M_PI * i / n_theta;
                    const Vec2 q = p + alpha * radius * Vec2(std::cos(theta), std::sin(theta));
                    const MetricResult m = metricG(problem, q);
                    candidates.push_back({m.g_value, q, m.t_star, m.gradient});
                }
            }

            const int top = std::min<int>(config.refine_top, static_cast<int>(candidates.size()));
            std::partial_sort(candidates.begin(), candidates.begin() + top, candidates.end(),
                              [](const Candidate &a, const Candidate &b)
                              { return a.g > b.g; });
            Candidate best = candidates[0];
            for (int i = 0; i < top; ++i)
            {
                const Candidate refined = refineCandidate(problem, p, radius, candidates[i],
                                                          config.refine_steps, n_theta);
                if (refined.g > best.g)
                {
                    best = refined;
                }
            }

            result.iterations = k + 1;
            result.violation = best.g;
            result.violation_history.push_back(best.g);
            last_best = best;
            if (best.g < config.epsilon)
            {
                result.value = -radius;
                result.t_star = best.t_star;
                result.tangent_point = best.point;
                const Vec2 dir = best.point - p;
                const double dn = dir.norm();
                if (dn > 1e-9)
                {
                    result.gradient = dir / dn;
                }
                else
                {
                    result.gradient = at_p.gradient;
                    result.gradient_defined = false;
                }
                result.status = QueryStatus::Interior;
                return result;
            }

            const double next_radius = radius - best.g;
            if (next_radius <= 0.0)
            {
                result.value = -radius;
                result.status = QueryStatus::RadiusUnderflow;
                return result;
            }
            radius = next_radius;
        }

        // Budget exhausted: expose the best state so callers that degrade
        // gracefully still get a usable (conservative) depth and direction.
        result.value = -radius;
        result.t_star = last_best.t_star;
        result.tangent_point = last_best.point;
        const Vec2 dir = last_best.point - p;
        result.gradient = dir.norm() > 1e-9 ? Vec2(dir / dir.norm()) : at_p.gradient;
        result.status = QueryStatus::NonConverged;
        return result;
    }

    SvsdfResult svsdfQuery(const SweepProblem &problem, const GsipConfig &config,
                           const Vec2 &p, double warm_radius)
    {
        SvsdfResult result = trySvsdfQuery(problem, config, p, warm_radius);
        if (result.status == QueryStatus::NonConverged)
        {
            throw GsipError("svsdf query did not converge within the iteration budget",
                            -result.value, result.violation);
        }
        if (result.status == QueryStatus::RadiusUnderflow)
        {
            throw GsipError("svsdf radius update underflowed (inconsistent metric)",
                            -result.value, result.violation);
        }
        return result;
    }

} // namespace svsdf
