#include "svsdf/optim.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace svsdf
{

    namespace
    {

        struct LinePoint
        {
            double alpha;
            double value;
            double slope;
        };

        // Minimizer of the cubic through two (alpha, value, slope) samples,
        // safeguarded to the interior of the bracket.
        double cubicStep(const LinePoint &a, const LinePoint &b)
        {
            const double d1 = a.slope + b.slope - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
            const double disc = d1 * d1 - a.slope * b.slope;
            const double lo = std::min(a.alpha, b.alpha);
            const double hi = std::max(a.alpha, b.alpha);
            double candidate = 0.5 * (lo + hi);
            if (disc >= 0.0)
            {
                const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
                const double denom = b.slope - a.slope + 2.0 * d2;
                if (std::abs(denom) > 1e-300)
                {
                    candidate = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / denom;
                }
            }
            const double guard = 0.1 * (hi - lo);
            if (!std::isfinite(candidate) || candidate < lo + guard || candidate > hi - guard)
            {
                candidate = 0.5 * (lo + hi);
            }
            return candidate;
        }

    } // namespace

    LbfgsResult lbfgsMinimize(const Objective &objective, const Eigen::VectorXd &x0,
                              const LbfgsConfig &config)
    {
        const int n = static_cast<int>(x0.size());
        LbfgsResult result;
        result.x = x0;

        Eigen::VectorXd grad(n);
        int evaluations = 0;
        const auto evaluate = [&](const Eigen::VectorXd &x, Eigen::VectorXd &g)
        {
            ++evaluations;
            return objective(x, g);
        };

        double f = evaluate(result.x, grad);
        if (!std::isfinite(f) || !grad.allFinite())
        {
            result.status = LbfgsStatus::InvalidInput;
            result.evaluations = evaluations;
            return result;
        }
        result.value = f;

        std::deque<Eigen::VectorXd> s_hist, y_hist;
        std::deque<double> rho_hist;
        double gamma = 1.0;

        Eigen::VectorXd x = x0;
        Eigen::VectorXd direction(n), x_new(n), grad_new(n);

        for (int iter = 0; iter < config.max_iterations; ++iter)
        {
            if (grad.lpNorm<Eigen::Infinity>() <= config.grad_tolerance)
            {
                result.status = LbfgsStatus::Converged;
                break;
            }
            if (evaluations >= config.max_evaluations)
            {
                result.status = LbfgsStatus::MaxEvaluations;
                break;
            }

            // Two-loop recursion.
            direction = -grad;
            const int mem = static_cast<int>(s_hist.size());
            std::vector<double> alpha_corr(mem);
            for (int i = mem - 1; i >= 0; --i)
            {
                alpha_corr[i] = rho_hist[i] * s_hist[i].dot(direction);
                direction -= alpha_corr[i] * y_hist[i];
            }
            direction *= gamma;
            for (int i = 0; i < mem; ++i)
            {
                const double beta = rho_hist[i] * y_hist[i].dot(direction);
                direction += (alpha_corr[i] - beta) * s_hist[i];
            }

            double slope0 = grad.dot(direction);
            if (slope0 >= 0.0)
            {
                // Stale curvature made the direction non-descending; restart
                // from steepest descent.
                s_hist.clear();
                y_hist.clear();
                rho_hist.clear();
                gamma = 1.0;
                direction = -grad;
                slope0 = grad.dot(direction);
            }

            // Strong-Wolfe line search with bracketing + cubic zoom. The
            // Armijo test carries a floating-point noise margin so nearly
            // exact steps remain acceptable when the true decrease drops
            // under the representable resolution of f.
            const double f0 = f;
            const double f_noise = 1e-14 * (std::abs(f0) + 1.0);
            double alpha = (iter == 0) ? std::min(1.0, 1.0 / std::max(1e-12, grad.norm()))
                                       : 1.0;
            alpha = std::min(alpha, config.step_max);

            LinePoint prev{0.0, f0, slope0};
            LinePoint lo{0.0, f0, slope0}, hi{0.0, f0, slope0};
            bool bracketed = false;
            bool accepted = false;
            bool have_fallback = false;
            LinePoint fallback{0.0, f0, slope0};
            double f_alpha = f0;
            int ls_evals = 0;

            while (ls_evals < config.max_line_search && evaluations < config.max_evaluations)
            {
                x_new = x + alpha * direction;
                f_alpha = evaluate(x_new, grad_new);
                ++ls_evals;
                if (!std::isfinite(f_alpha) || !grad_new.allFinite())
                {
                    // Step into a non-finite region: shrink hard.
                    alpha *= 0.25;
                    if (alpha < config.step_min)
                    {
                        break;
                    }
                    continue;
                }
                const double slope = grad_new.dot(direction);
                if (f_alpha > f0 + config.c1 * alpha * slope0 + f_noise ||
                    (ls_evals > 1 && f_alpha >= prev.value + f_noise))
                {
                    lo = prev;
                    hi = {alpha, f_alpha, slope};
                    bracketed = true;
                    break;
                }
                if (std::abs(slope) <= -config.c2 * slope0)
                {
                    // Strong Wolfe holds. With the slope still steep the
                    // minimizer along the line is far from here; keep this
                    // point as a fallback and continue so the zoom phase can
                    // interpolate toward it (exactly, for quadratics).
                    if (std::abs(slope) <= 0.3 * (-slope0))
                    {
                        accepted = true;
                        break;
                    }
                    have_fallback = true;
                    fallback = {alpha, f_alpha, slope};
                }
                if (slope >= 0.0)
                {
                    lo = {alpha, f_alpha, slope};
                    hi = prev;
                    bracketed = true;
                    break;
                }
                prev = {alpha, f_alpha, slope};
                if (alpha >= config.step_max)
                {
                    accepted = true; // Wolfe not satisfiable within the cap
                    break;
                }
                alpha = std::min(2.0 * alpha, config.step_max);
            }

            if (bracketed && !accepted)
            {
                while (ls_evals < config.max_line_search && evaluations < config.max_evaluations)
                {
                    alpha = cubicStep(lo, hi);
                    if (std::abs(hi.alpha - lo.alpha) * std::abs(slope0) <
                        1e-16 * std::max(1.0, std::abs(f0)))
                    {
                        break;
                    }
                    x_new = x + alpha * direction;
                    f_alpha = evaluate(x_new, grad_new);
                    ++ls_evals;
                    if (!std::isfinite(f_alpha))
                    {
                        hi = {alpha, std::numeric_limits<double>::max(), 0.0};
                        continue;
                    }
                    const double slope = grad_new.dot(direction);
                    if (f_alpha > f0 + config.c1 * alpha * slope0 + f_noise || f_alpha >= lo.value + f_noise)
                    {
                        hi = {alpha, f_alpha, slope};
                    }
                    else
                    {
                        if (std::abs(slope) <= -config.c2 * slope0)
                        {
                            accepted = true;
                            break;
                        }
                        if (slope * (hi.alpha - lo.alpha) >= 0.0)
                        {
                            hi = lo;
                        }
                        lo = {alpha, f_alpha, slope};
                    }
                }
                if (!accepted && have_fallback && fallback.value <= lo.value)
                {
                    alpha = fallback.alpha;
                    x_new = x + alpha * direction;
                    f_alpha = evaluate(x_new, grad_new);
                    accepted = std::isfinite(f_alpha) && f_alpha <= f0 + f_noise;
                }
                if (!accepted && lo.alpha > 0.0 && lo.value < f0)
                {
                    // Wolfe curvature unmet but decrease achieved: take it.
                    alpha = lo.alpha;
                    x_new = x + alpha * direction;
                    f_alpha = evaluate(x_new, grad_new);
                    accepted = std::isfinite(f_alpha) && f_alpha < f0;
                }
            }
            else if (!accepted && have_fallback)
            {
                alpha = fallback.alpha;
                x_new = x + alpha * direction;
                f_alpha = evaluate(x_new, grad_new);
                accepted = std::isfinite(f_alpha) && f_alpha <= f0 + f_noise;
            }

            if (!accepted || f_alpha > f0 + f_noise)
            {
                result.status = LbfgsStatus::LineSearchFailed;
                break;
            }

            // Curvature update.
            const Eigen::VectorXd s = x_new - x;
            const Eigen::VectorXd y = grad_new - grad;
            const double sy = s.dot(y);
            if (sy > 1e-10 * s.norm() * y.norm())
            {
                s_hist.push_back(s);
                y_hist.push_back(y);
                rho_hist.push_back(1.0 / sy);
                if (static_cast<int>(s_hist.size()) > config.memory)
                {
                    s_hist.pop_front();
                    y_hist.pop_front();
                    rho_hist.pop_front();
                }
                gamma = sy / y.squaredNorm();
            }

            x = x_new;
            grad = grad_new;
            f = f_alpha;
            result.x = x;
            result.value = f;
            result.iterations = iter + 1;

            if (config.callback && !config.callback(x, f, iter + 1))
            {
                result.status = LbfgsStatus::Converged;
                break;
            }
            if (evaluations >= config.max_evaluations)
            {
                result.status = LbfgsStatus::MaxEvaluations;
                break;
            }
        }

        if (grad.lpNorm<Eigen::Infinity>() <= config.grad_tolerance)
        {
            result.status = LbfgsStatus::Converged;
        }
        result.evaluations = evaluations;
        return result;
    }

} // namespace svsdf
