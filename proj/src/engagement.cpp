#include "idcais/engagement.hpp"

#include <cmath>

namespace idcais {

AttackerPlan solve_attacker(const AgentState& attacker, const WorldParams& world, const AgentParams& pa,
                            const MinTimeOptions& opts)
{
    const auto sol = solve_min_time(attacker, world.protected_center, pa.effective_bound(), pa.drag, opts);
    return {sol.heading, sol.terminal_time};
}

EngagementSolution solve_defender(const AgentState& defender, const AgentState& attacker, const WorldParams& world,
                                  const AgentParams& pd, const AgentParams& pa, const MinTimeOptions& opts)
{
    if (pa.drag != pd.drag)
        throw ValidationError("solve_defender: attacker and defender must share the drag coefficient");
    if (pa.effective_bound() > pd.effective_bound())
        throw ValidationError("solve_defender: attacker bound exceeds the defender's effective bound");

    const AttackerPlan plan = solve_attacker(attacker, world, pa, opts);
    const Vec2 attacker_control = pa.effective_bound() * heading_vector(plan.heading);

    const auto intercept = solve_constant_heading(defender.position - attacker.position,
                                                  defender.velocity - attacker.velocity, -attacker_control,
                                                  pd.effective_bound(), pd.drag, opts);

    EngagementSolution sol;
    sol.attacker_heading = plan.heading;
    sol.attacker_time = plan.time;
    sol.defender_time = intercept.terminal_time;
    // Co-located with zero relative velocity: chase along the attacker's heading.
    sol.defender_heading = intercept.terminal_time == 0.0 ? plan.heading : intercept.heading;
    sol.tau = sol.defender_time - sol.attacker_time;
    return sol;
}

WinningRegionTest in_winning_region(const AgentState& defender, const AgentState& attacker, const WorldParams& world,
                                    const AgentParams& pd, const AgentParams& pa)
{
    const auto sol = solve_defender(defender, attacker, world, pd, pa);
    return {sol.tau <= 0.0, sol.tau};
}

BoundaryDiagnostic tau_dot_on_boundary(const AgentState& defender, const AgentState& attacker,
                                       const WorldParams& world, const AgentParams& pd, const AgentParams& pa,
                                       const Vec2& deviation, const BoundaryOptions& opts)
{
    const auto sol = solve_defender(defender, attacker, world, pd, pa);
    if (std::abs(sol.tau) > opts.tolerance)
        throw ValidationError("tau_dot_on_boundary: state is not on the winning-region boundary");

    const double ua = pa.effective_bound();
    const double ud = pd.effective_bound();
    const Vec2 ua_hat = heading_vector(sol.attacker_heading);
    const Vec2 ud_hat = heading_vector(sol.defender_heading);
    if ((ua * ua_hat + deviation).norm() > ua * (1.0 + 1e-12))
        throw ValidationError("tau_dot_on_boundary: deviated control exceeds the attacker bound");

    const double c = pa.drag;
    const auto [e1a, e2a] = growth_factors(sol.attacker_time, c);
    const auto [e1d, e2d] = growth_factors(sol.defender_time, c);
    const double decay_a = std::exp(-c * sol.attacker_time);
    const double decay_d = std::exp(-c * sol.defender_time);
    const Vec2 rel_velocity = defender.velocity - attacker.velocity;

    BoundaryDiagnostic diag;
    diag.solution = sol;
    diag.gamma_a = decay_a * attacker.velocity.dot(ua_hat) + e1a * ua;
    diag.gamma_d = decay_d * defender.velocity.dot(ud_hat) + e1d * ud;
    diag.gamma_d0 = decay_d * rel_velocity.dot(ud_hat) +
                    e1d * (ud - ua * std::cos(sol.defender_heading - sol.attacker_heading));
    diag.gamma = e1d * diag.gamma_d / (diag.gamma_a * diag.gamma_d0);
    diag.tau_dot = diag.gamma * ua_hat.dot(deviation);
    return diag;
}

}  // namespace idcais
