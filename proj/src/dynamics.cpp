#include "idcais/dynamics.hpp"

#include <cmath>

namespace idcais {

const char* to_string(Role role) { return role == Role::Attacker ? "attacker" : "defender"; }

void AgentParams::validate() const
{
    if (!(accel_bound > 0.0) || !std::isfinite(accel_bound))
        throw ValidationError("accel_bound must be positive and finite");
    if (!(drag > 0.0) || !std::isfinite(drag))
        throw ValidationError("drag must be positive and finite");
    if (!(body_radius >= 0.0) || !std::isfinite(body_radius))
        throw ValidationError("body_radius must be non-negative");
    if (role == Role::Defender && !(margin > 0.0 && margin < accel_bound))
        throw ValidationError("defender margin must lie in (0, accel_bound)");
    if (role == Role::Attacker && margin != 0.0)
        throw ValidationError("attacker margin must be zero");
}

AgentParams AgentParams::attacker(double accel_bound, double drag, double body_radius)
{
    return {accel_bound, drag, body_radius, Role::Attacker, 0.0};
}

AgentParams AgentParams::defender(double accel_bound, double drag, double body_radius)
{
    return {accel_bound, drag, body_radius, Role::Defender, 1e-3 * accel_bound};
}

void WorldParams::validate() const
{
    if (!protected_center.allFinite())
        throw ValidationError("protected_center must be finite");
    if (!(protected_radius > 0.0))
        throw ValidationError("protected_radius must be positive");
    if (!(capture_radius > 0.0))
        throw ValidationError("capture_radius must be positive");
    if (!(collision_radius > 0.0))
        throw ValidationError("collision_radius must be positive");
}

GrowthFactors growth_factors(double t, double drag)
{
    if (!(t >= 0.0))
        throw ValidationError("growth_factors: time must be non-negative");
    if (!(drag > 0.0))
        throw ValidationError("growth_factors: drag must be positive");
    if (std::isinf(t))
        return {1.0 / drag, t};

    const double x = drag * t;
    const double e1 = -std::expm1(-x) / drag;
    double e2;
    if (x < 0.05) {
        // t^2/2 * sum_{n>=0} (-x)^n * 2/(n+2)!; (t - E1) cancels badly here
        double term = 1.0;
        double sum = 0.0;
        for (int n = 0; n < 12; ++n) {
            sum += term;
            term *= -x / static_cast<double>(n + 3);
        }
        e2 = 0.5 * t * t * sum;
    } else {
        e2 = (t - e1) / drag;
    }
    return {e1, e2};
}

AgentState propagate(const AgentState& state, const Vec2& control, double dt, double drag)
{
    if (!state.finite() || !control.allFinite() || !std::isfinite(dt))
        throw ValidationError("propagate: non-finite input");
    const auto [e1, e2] = growth_factors(dt, drag);
    AgentState out;
    out.position = state.position + e1 * state.velocity + e2 * control;
    out.velocity = std::exp(-drag * dt) * state.velocity + e1 * control;
    return out;
}

Vec2 position_at(const AgentState& state, const Vec2& control, double t, double drag)
{
    const auto [e1, e2] = growth_factors(t, drag);
    return state.position + e1 * state.velocity + e2 * control;
}

}  // namespace idcais
