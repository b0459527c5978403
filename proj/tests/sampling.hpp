// Random instance generators shared by the unit tests and the acceptance run.
#pragma once

#include "idcais/assignment.hpp"
#include "idcais/engagement.hpp"

#include <cmath>
#include <optional>
#include <random>

namespace sampling {

using namespace idcais;

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Vec2 in_disc(std::mt19937_64& rng, double radius)
{
    const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
    const double th = uniform(rng, 0.0, 2 * std::acos(-1.0));
    return r * heading_vector(th);
}

struct BoundaryState {
    AgentState defender;
    AgentState attacker;
    double tau;
};

// Slides the defender along a ray from the protected center until tau
// changes sign, then bisects onto the boundary.
inline std::optional<BoundaryState> boundary_state(std::mt19937_64& rng, const WorldParams& world,
                                                   const AgentParams& pd, const AgentParams& pa,
                                                   double band = 1e-10)
{
    const double pi = std::acos(-1.0);
    const AgentState attacker{world.protected_center + uniform(rng, 8.0, 25.0) * heading_vector(uniform(rng, 0, 2 * pi)),
                              in_disc(rng, 0.8 * pa.speed_cap())};
    const Vec2 dir = heading_vector(uniform(rng, 0, 2 * pi));
    const Vec2 vel = in_disc(rng, 0.8 * pd.speed_cap());
    auto tau = [&](double s) {
        return solve_defender({world.protected_center + s * dir, vel}, attacker, world, pd, pa).tau;
    };
    double lo = 0.0;
    double hi = 5.0;
    if (!(tau(lo) < 0.0))
        return std::nullopt;
    while (tau(hi) <= 0.0) {
        hi *= 2;
        if (hi > 500.0)
            return std::nullopt;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double t = tau(mid);
        if (std::abs(t) <= band)
            return BoundaryState{{world.protected_center + mid * dir, vel}, attacker, t};
        (t < 0.0 ? lo : hi) = mid;
    }
    const double t = tau(lo);
    if (std::abs(t) <= band)
        return BoundaryState{{world.protected_center + lo * dir, vel}, attacker, t};
    return std::nullopt;
}

// Interception costs in [1, 20] with some losing pairs, collision costs
// 1 / t for roughly a third of the symmetric pairs.
inline CostTables random_tables(std::mt19937_64& rng, std::size_t nd, std::size_t na, double weight)
{
    CostTables t = CostTables::zeros(nd, na, weight);
    for (auto& c : t.interception_costs)
        c = uniform(rng, 0.0, 1.0) < 0.1 ? t.large_cost : uniform(rng, 1.0, 20.0);
    for (std::size_t j = 0; j < nd; ++j)
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t jp = j + 1; jp < nd; ++jp)
                for (std::size_t ip = 0; ip < na; ++ip)
                    if (ip != i && uniform(rng, 0.0, 1.0) < 0.35) {
                        const double c = 1.0 / uniform(rng, 0.05, 10.0);
                        t.collision_ref(j, i, jp, ip) = c;
                        t.collision_ref(jp, ip, j, i) = c;
                    }
    return t;
}

// Two defenders closing on each other with nominal controls that trigger
// the barrier row, filtered to instances whose row and discs are jointly
// feasible.
struct FilterInstance {
    std::vector<AgentState> defenders;
    std::vector<Vec2> nominal;
    double gain;
};

inline FilterInstance random_filter_instance(std::mt19937_64& rng, const AgentParams& pd, double collision_radius,
                                             double gain)
{
    const double pi = std::acos(-1.0);
    const double u = pd.effective_bound();
    for (;;) {
        const double sep = uniform(rng, collision_radius + 0.05, 4.0 * collision_radius);
        const double phi = uniform(rng, 0, 2 * pi);
        const Vec2 axis = heading_vector(phi);
        const Vec2 c = in_disc(rng, 10.0);
        FilterInstance inst;
        inst.defenders = {{c - 0.5 * sep * axis, in_disc(rng, 0.7 * pd.speed_cap()) + uniform(rng, 0, 3) * axis},
                          {c + 0.5 * sep * axis, in_disc(rng, 0.7 * pd.speed_cap()) - uniform(rng, 0, 3) * axis}};
        for (auto& d : inst.defenders)
            if (d.velocity.norm() > 0.95 * pd.speed_cap())
                d.velocity *= 0.95 * pd.speed_cap() / d.velocity.norm();
        inst.nominal = {u * heading_vector(phi + uniform(rng, -1.2, 1.2)),
                        u * heading_vector(phi + pi + uniform(rng, -1.2, 1.2))};
        inst.gain = gain;

        const Vec2 dr = inst.defenders[0].position - inst.defenders[1].position;
        const Vec2 dv = inst.defenders[0].velocity - inst.defenders[1].velocity;
        const double h = collision_radius * collision_radius - dr.squaredNorm();
        const double hd = -2 * dr.dot(dv);
        const Vec2 acc = inst.nominal[0] - pd.drag * inst.defenders[0].velocity - inst.nominal[1] +
                         pd.drag * inst.defenders[1].velocity;
        const double hdd = -2 * (dv.squaredNorm() + dr.dot(acc));
        const double lhs = hdd + 2 * gain * hd + gain * gain * h;  // <= 0 required
        if (lhs <= 0)
            continue;
        // Largest achievable reduction of lhs inside the discs: -2 dr.(du0 - du1) with
        // ||u + du|| <= bound.
        const double reach = 2 * (-dr.dot(inst.nominal[0]) + dr.norm() * pd.accel_bound) +
                             2 * (dr.dot(inst.nominal[1]) + dr.norm() * pd.accel_bound);
        if (lhs < 0.9 * reach)
            return inst;
    }
}

}  // namespace sampling
