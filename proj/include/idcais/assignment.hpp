#pragma once

#include "idcais/collision_forecast.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace idcais {

/// Interception and collision costs of every defender-to-attacker pairing.
///
/// interception(j, i) is the defender's interception time when the attacker
/// lies in its winning region and `large_cost` otherwise. collision(j, i, j', i')
/// is 1 / t_col when defender j chasing i and defender j' chasing i' come
/// within the collision radius, 0 otherwise.
struct CostTables {
    std::size_t num_defenders = 0;
    std::size_t num_attackers = 0;
    std::vector<double> interception_costs;  // row-major [j][i]
    std::vector<double> collision_costs;     // [(j*na+i)*nd*na + (j'*na+i')]
    double large_cost = 1e6;
    double weight = 0.5;

    double interception(std::size_t j, std::size_t i) const { return interception_costs[j * num_attackers + i]; }
    double collision(std::size_t j, std::size_t i, std::size_t jp, std::size_t ip) const
    {
        return collision_costs[(j * num_attackers + i) * num_defenders * num_attackers + jp * num_attackers + ip];
    }
    double& collision_ref(std::size_t j, std::size_t i, std::size_t jp, std::size_t ip)
    {
        return collision_costs[(j * num_attackers + i) * num_defenders * num_attackers + jp * num_attackers + ip];
    }

    static CostTables zeros(std::size_t nd, std::size_t na, double weight = 0.5, double large_cost = 1e6);
    void validate() const;
};

struct CostBuildOptions {
    double weight = 0.5;
    double large_cost = 1e6;
    ForecastOptions forecast;
};

struct CostBuildResult {
    CostTables tables;
    EngagementTable engagements;
    CollisionTable collisions;
    ForecastStats stats;
};

CostBuildResult build_cost_tables(const std::vector<AgentState>& defenders, const std::vector<AgentState>& attackers,
                                  const WorldParams& world, const AgentParams& pd, const AgentParams& pa,
                                  const CostBuildOptions& opts = {});

/// Defender-to-attacker map. defender_target[j] is the attacker index or nullopt (idle).
struct Assignment {
    std::vector<std::optional<std::size_t>> defender_target;
    /// Full objective (1-w) * sum C_int + w * sum C_col under the tables' weight.
    double objective = 0.0;
    double interception_cost = 0.0;
    double collision_cost = 0.0;

    /// Row-major binary vector delta[j * na + i].
    std::vector<int> delta(std::size_t num_attackers) const;
    /// attacker_defender[i] = j
    std::vector<std::size_t> attacker_defender(std::size_t num_attackers) const;
    bool operator==(const Assignment&) const = default;
};

struct ObjectiveParts {
    double interception;
    double collision;
    double total;
};

/// Evaluates the assignment objective; each attacker must be covered exactly
/// once and each defender at most once.
ObjectiveParts evaluate_objective(const CostTables& tables, const std::vector<std::size_t>& attacker_defender,
                                  double weight);

/// Exact collision-aware assignment by depth-first branch and bound.
Assignment solve_cadaa(const CostTables& tables);

/// Collision-unaware assignment: minimizes the interception cost only.
Assignment solve_cudaa(const CostTables& tables);

/// Enumerates every injective attacker-to-defender map.
Assignment solve_exhaustive(const CostTables& tables, double weight);

}  // namespace idcais
