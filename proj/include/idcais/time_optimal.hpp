#pragma once

#include "idcais/dynamics.hpp"

namespace idcais {

struct MinTimeOptions {
    /// Residual tolerance relative to the initial distance.
    double relative_tolerance = 1e-9;
    double absolute_floor = 1e-12;
    /// The march stops once the gap is within this many ulps of the defect scale.
    double gap_ulps = 64.0;
    /// Gives up beyond this horizon [s].
    double max_horizon = 1e7;
    std::size_t max_iterations = 1000000;
};

/// Constant-heading minimum-time solution.
struct MinTimeSolution {
    double heading = 0.0;        ///< [rad]
    double terminal_time = 0.0;  ///< [s]
    double residual = 0.0;       ///< [m]
    /// Set when the defect vanished at a positive terminal time, leaving the heading undetermined.
    bool degenerate = false;
};

/// Solves ||a + E1(t) b + E2(t) w|| = E2(t) * bound for the smallest t >= 0
/// and returns the heading that cancels the defect at that time.
///
/// The smallest root is reached by marching forward with steps that can
/// never overshoot it: each step solves g + g' s + M s^2 / 2 = 0 where M
/// bounds the second derivative of the gap g, so short windows in which the
/// target briefly enters the reachable disc are not skipped.
///
/// Both the single-agent minimum-time problem (w = 0) and the defender's
/// interception of a constant-control attacker (w = -attacker control) reduce
/// to this scalar equation. A root exists whenever bound > ||w||.
MinTimeSolution solve_constant_heading(const Vec2& offset, const Vec2& velocity, const Vec2& drift, double bound,
                                       double drag, const MinTimeOptions& opts = {});

/// Time-optimal steering of `start` to the point `target` with ||u|| <= bound.
MinTimeSolution solve_min_time(const AgentState& start, const Vec2& target, double bound, double drag,
                               const MinTimeOptions& opts = {});

}  // namespace idcais
