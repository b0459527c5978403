#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace idcais {

using Vec2 = Eigen::Vector2d;

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Role { Attacker, Defender };

const char* to_string(Role role);

/// Planar position and velocity of one agent.
struct AgentState {
    Vec2 position = Vec2::Zero();
    Vec2 velocity = Vec2::Zero();

    bool finite() const { return position.allFinite() && velocity.allFinite(); }
    bool operator==(const AgentState& o) const { return position == o.position && velocity == o.velocity; }
};

/// Actuation and body parameters of one agent.
///
/// The drag term caps the reachable speed at accel_bound / drag. Defenders
/// plan their interception with the slightly reduced bound
/// accel_bound - margin so that the full bound is never active at the
/// nominal control; the safety filter relies on this slack.
struct AgentParams {
    double accel_bound = 3.0;
    double drag = 0.5;
    double body_radius = 0.5;
    Role role = Role::Attacker;
    /// Strictly positive planning margin; only used for defenders.
    double margin = 0.0;

    double speed_cap() const { return accel_bound / drag; }
    /// Control magnitude used by the time-optimal policy.
    double effective_bound() const { return role == Role::Defender ? accel_bound - margin : accel_bound; }

    void validate() const;
    bool operator==(const AgentParams&) const = default;

    static AgentParams attacker(double accel_bound = 3.0, double drag = 0.5, double body_radius = 0.5);
    /// Margin defaults to 1e-3 * accel_bound.
    static AgentParams defender(double accel_bound = 3.4, double drag = 0.5, double body_radius = 0.5);
};

struct WorldParams {
    Vec2 protected_center = Vec2::Zero();
    double protected_radius = 2.0;
    double capture_radius = 1.0;
    double collision_radius = 2.0;

    void validate() const;
    bool operator==(const WorldParams& o) const
    {
        return protected_center == o.protected_center && protected_radius == o.protected_radius &&
               capture_radius == o.capture_radius && collision_radius == o.collision_radius;
    }
};

/// E1(t) = (1 - exp(-C_D t)) / C_D and E2(t) = (t - E1(t)) / C_D.
struct GrowthFactors {
    double e1;
    double e2;
};

GrowthFactors growth_factors(double t, double drag);

/// Exact zero-order-hold solution of the damped double integrator
///   r' = v,  v' = -C_D v + u
/// over [0, dt] with u held constant.
AgentState propagate(const AgentState& state, const Vec2& control, double dt, double drag);

/// Position at time t under constant control (no velocity).
Vec2 position_at(const AgentState& state, const Vec2& control, double t, double drag);

inline Vec2 heading_vector(double theta) { return {std::cos(theta), std::sin(theta)}; }

}  // namespace idcais
