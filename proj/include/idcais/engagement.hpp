#pragma once

#include "idcais/dynamics.hpp"
#include "idcais/time_optimal.hpp"

namespace idcais {

/// Attacker's time-optimal dash to the protected center.
struct AttackerPlan {
    double heading = 0.0;
    double time = 0.0;
};

/// Constant-heading policy pair of a 1v1 engagement.
///
/// The attacker heads for the protected center in minimum time; the defender
/// intercepts that worst-case attacker in minimum time using its effective
/// (margin-reduced) bound.
struct EngagementSolution {
    double attacker_heading = 0.0;
    double attacker_time = 0.0;
    double defender_heading = 0.0;
    double defender_time = 0.0;
    /// defender_time - attacker_time; non-positive means the defender wins.
    double tau = 0.0;

    Vec2 attacker_control(const AgentParams& pa) const { return pa.effective_bound() * heading_vector(attacker_heading); }
    Vec2 defender_control(const AgentParams& pd) const { return pd.effective_bound() * heading_vector(defender_heading); }
};

AttackerPlan solve_attacker(const AgentState& attacker, const WorldParams& world, const AgentParams& pa,
                            const MinTimeOptions& opts = {});

/// Requires pa.accel_bound <= pd.effective_bound().
EngagementSolution solve_defender(const AgentState& defender, const AgentState& attacker, const WorldParams& world,
                                  const AgentParams& pd, const AgentParams& pa, const MinTimeOptions& opts = {});

struct WinningRegionTest {
    bool defender_wins;
    double tau;
};

/// Membership of the attacker state in the defender's winning region (tau <= 0).
WinningRegionTest in_winning_region(const AgentState& defender, const AgentState& attacker, const WorldParams& world,
                                    const AgentParams& pd, const AgentParams& pa);

/// Terms of the rate of tau along the winning-region boundary.
struct BoundaryDiagnostic {
    double gamma_a;
    double gamma_d;
    double gamma_d0;
    double gamma;
    double tau_dot;
    EngagementSolution solution;
};

struct BoundaryOptions {
    double tolerance = 1e-6;  ///< |tau| band accepted as the boundary [s]
};

/// Rate of tau when the attacker deviates by `deviation` from its optimal
/// control while on the boundary of the defender's winning region:
///   tau_dot = Gamma * u_hat_a . deviation,
/// with u_hat_a the attacker's optimal heading. Throws ValidationError when
/// |tau| exceeds the boundary band or the deviated control leaves the
/// attacker's control disc.
BoundaryDiagnostic tau_dot_on_boundary(const AgentState& defender, const AgentState& attacker,
                                       const WorldParams& world, const AgentParams& pd, const AgentParams& pa,
                                       const Vec2& deviation, const BoundaryOptions& opts = {});

}  // namespace idcais
