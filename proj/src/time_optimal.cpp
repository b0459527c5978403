#include "idcais/time_optimal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace idcais {

namespace {

struct Defect {
    const Vec2& a;
    const Vec2& b;
    const Vec2& w;
    double bound;
    double drag;

    Vec2 at(double t) const
    {
        const auto [e1, e2] = growth_factors(t, drag);
        return a + e1 * b + e2 * w;
    }

    // Positive once the target lies inside the reachable disc.
    double gap(double t) const { return growth_factors(t, drag).e2 * bound - at(t).norm(); }

    // d/dt of gap; E1' = exp(-ct), E2' = E1.
    double slope(double t) const
    {
        const auto [e1, e2] = growth_factors(t, drag);
        const Vec2 p = a + e1 * b + e2 * w;
        const Vec2 dp = std::exp(-drag * t) * b + e1 * w;
        const double n = p.norm();
        return e1 * bound - (n > 0.0 ? p.dot(dp) / n : dp.norm());
    }

    // Upper bound on the second derivative of gap over t >= 0.
    double curvature() const { return bound + drag * b.norm() + w.norm(); }

    double scale(double t) const
    {
        const auto [e1, e2] = growth_factors(t, drag);
        return a.norm() + e1 * b.norm() + e2 * (w.norm() + bound);
    }
};

}  // namespace

MinTimeSolution solve_constant_heading(const Vec2& offset, const Vec2& velocity, const Vec2& drift, double bound,
                                       double drag, const MinTimeOptions& opts)
{
    if (!offset.allFinite() || !velocity.allFinite() || !drift.allFinite() || !std::isfinite(bound) ||
        !std::isfinite(drag))
        throw ValidationError("solve_constant_heading: non-finite input");
    if (!(bound > 0.0) || !(drag > 0.0))
        throw ValidationError("solve_constant_heading: bound and drag must be positive");

    const double initial_distance = offset.norm();
    const double tol = std::max(opts.absolute_floor, opts.relative_tolerance * initial_distance);
    if (initial_distance <= opts.absolute_floor)
        return {0.0, 0.0, initial_distance, false};

    const Defect defect{offset, velocity, drift, bound, drag};
    const double curvature = defect.curvature();
    constexpr double eps = std::numeric_limits<double>::epsilon();

    double t = 0.0;
    double g = defect.gap(t);
    std::size_t iterations = 0;
    for (;;) {
        const double slack = opts.gap_ulps * eps * defect.scale(t) + opts.absolute_floor;
        const double d = defect.slope(t);
        // Smallest positive root of g + d s + curvature s^2 / 2 (g < 0).
        const double step = -2.0 * g / (d + std::sqrt(std::max(0.0, d * d - 2.0 * curvature * g)));
        if (-g <= slack) {
            t += std::isfinite(step) ? step : 0.0;
            break;
        }
        t += step;
        if (!(t <= opts.max_horizon) || ++iterations > opts.max_iterations)
            throw SolverError("solve_constant_heading: no root within horizon (bound does not dominate drift)");
        g = defect.gap(t);
        if (g >= 0.0)
            break;
    }
    const double t_f = t;

    const Vec2 q = defect.at(t_f);
    MinTimeSolution sol;
    sol.terminal_time = t_f;
    if (q.norm() <= tol) {
        sol.heading = 0.0;
        sol.degenerate = true;
    } else {
        sol.heading = std::atan2(-q.y(), -q.x());
    }
    const double e2 = growth_factors(t_f, drag).e2;
    sol.residual = (q + e2 * bound * heading_vector(sol.heading)).norm();
    return sol;
}

MinTimeSolution solve_min_time(const AgentState& start, const Vec2& target, double bound, double drag,
                               const MinTimeOptions& opts)
{
    if (!start.finite() || !target.allFinite())
        throw ValidationError("solve_min_time: non-finite input");
    return solve_constant_heading(start.position - target, start.velocity, Vec2::Zero(), bound, drag, opts);
}

}  // namespace idcais
