#include "idcais/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace idcais {

CostTables CostTables::zeros(std::size_t nd, std::size_t na, double weight, double large_cost)
{
    CostTables t;
    t.num_defenders = nd;
    t.num_attackers = na;
    t.interception_costs.assign(nd * na, 0.0);
    t.collision_costs.assign(nd * na * nd * na, 0.0);
    t.weight = weight;
    t.large_cost = large_cost;
    return t;
}

void CostTables::validate() const
{
    if (num_attackers == 0)
        throw ValidationError("cost tables: need at least one attacker");
    if (num_defenders < num_attackers)
        throw ValidationError("cost tables: fewer defenders than attackers");
    if (interception_costs.size() != num_defenders * num_attackers)
        throw ValidationError("cost tables: interception matrix has the wrong size");
    if (collision_costs.size() != num_defenders * num_attackers * num_defenders * num_attackers)
        throw ValidationError("cost tables: collision tensor has the wrong size");
    if (!(weight >= 0.0 && weight < 1.0))
        throw ValidationError("cost tables: weight must lie in [0, 1)");
    for (double c : interception_costs)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ValidationError("cost tables: interception costs must be finite and non-negative");
    for (double c : collision_costs)
        if (!(c >= 0.0) || !std::isfinite(c))
            throw ValidationError("cost tables: collision costs must be finite and non-negative");
    for (std::size_t j = 0; j < num_defenders; ++j)
        for (std::size_t i = 0; i < num_attackers; ++i)
            for (std::size_t jp = 0; jp < num_defenders; ++jp)
                for (std::size_t ip = 0; ip < num_attackers; ++ip) {
                    const double c = collision(j, i, jp, ip);
                    if ((j == jp || i == ip) && c != 0.0)
                        throw ValidationError("cost tables: collision cost must vanish for a shared defender or attacker");
                    if (c != collision(jp, ip, j, i))
                        throw ValidationError("cost tables: collision tensor must be symmetric");
                }
}

CostBuildResult build_cost_tables(const std::vector<AgentState>& defenders, const std::vector<AgentState>& attackers,
                                  const WorldParams& world, const AgentParams& pd, const AgentParams& pa,
                                  const CostBuildOptions& opts)
{
    CostBuildResult out;
    out.engagements = build_engagement_table(defenders, attackers, world, pd, pa);
    out.collisions = all_pairs_collision_times(out.engagements, world.collision_radius, opts.forecast, &out.stats);

    const std::size_t nd = defenders.size();
    const std::size_t na = attackers.size();
    out.tables = CostTables::zeros(nd, na, opts.weight, opts.large_cost);
    for (std::size_t j = 0; j < nd; ++j) {
        for (std::size_t i = 0; i < na; ++i) {
            const auto& sol = out.engagements.at(j, i).solution;
            out.tables.interception_costs[j * na + i] = sol.tau <= 0.0 ? sol.defender_time : opts.large_cost;
            for (std::size_t jp = 0; jp < nd; ++jp)
                for (std::size_t ip = 0; ip < na; ++ip)
                    if (const auto& e = out.collisions.at(j, i, jp, ip))
                        out.tables.collision_ref(j, i, jp, ip) = 1.0 / e->time;
        }
    }
    out.tables.validate();
    return out;
}

std::vector<int> Assignment::delta(std::size_t num_attackers) const
{
    std::vector<int> d(defender_target.size() * num_attackers, 0);
    for (std::size_t j = 0; j < defender_target.size(); ++j)
        if (defender_target[j])
            d[j * num_attackers + *defender_target[j]] = 1;
    return d;
}

std::vector<std::size_t> Assignment::attacker_defender(std::size_t num_attackers) const
{
    std::vector<std::size_t> out(num_attackers, std::numeric_limits<std::size_t>::max());
    for (std::size_t j = 0; j < defender_target.size(); ++j)
        if (defender_target[j])
            out[*defender_target[j]] = j;
    return out;
}

ObjectiveParts evaluate_objective(const CostTables& tables, const std::vector<std::size_t>& attacker_defender,
                                  double weight)
{
    const std::size_t na = tables.num_attackers;
    if (attacker_defender.size() != na)
        throw ValidationError("evaluate_objective: map must cover every attacker");
    std::vector<bool> used(tables.num_defenders, false);
    for (std::size_t j : attacker_defender) {
        if (j >= tables.num_defenders || used[j])
            throw ValidationError("evaluate_objective: defenders must be distinct and in range");
        used[j] = true;
    }
    ObjectiveParts parts{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < na; ++i) {
        parts.interception += tables.interception(attacker_defender[i], i);
        for (std::size_t ip = 0; ip < na; ++ip)
            parts.collision += tables.collision(attacker_defender[i], i, attacker_defender[ip], ip);
    }
    parts.total = (1.0 - weight) * parts.interception + weight * parts.collision;
    return parts;
}

namespace {

Assignment make_assignment(const CostTables& tables, const std::vector<std::size_t>& attacker_defender)
{
    Assignment a;
    a.defender_target.assign(tables.num_defenders, std::nullopt);
    for (std::size_t i = 0; i < attacker_defender.size(); ++i)
        a.defender_target[attacker_defender[i]] = i;
    const auto parts = evaluate_objective(tables, attacker_defender, tables.weight);
    a.objective = parts.total;
    a.interception_cost = parts.interception;
    a.collision_cost = parts.collision;
    return a;
}

bool strictly_better(double candidate, double incumbent)
{
    return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

// Attackers are assigned in index order; defenders are tried in index order,
// so the first optimum reached is the lexicographically smallest map.
class BranchAndBound {
public:
    BranchAndBound(const CostTables& tables, double weight) : t_(tables), w_(weight)
    {
        current_.assign(t_.num_attackers, 0);
        used_.assign(t_.num_defenders, false);
    }

    std::vector<std::size_t> solve()
    {
        descend(0, 0.0);
        return best_;
    }

private:
    // Cost of pairing attacker i with defender j counted against the
    // committed attackers [0, committed). With committed == i this is the
    // exact increment.
    double increment(std::size_t i, std::size_t j, std::size_t committed) const
    {
        double pair = 0.0;
        for (std::size_t k = 0; k < committed; ++k)
            pair += t_.collision(j, i, current_[k], k) + t_.collision(current_[k], k, j, i);
        return (1.0 - w_) * t_.interception(j, i) + w_ * pair;
    }

    // Each remaining attacker pays at least its cheapest free defender's
    // interception cost plus its collision cost against committed pairs.
    double lower_bound(std::size_t depth) const
    {
        double bound = 0.0;
        for (std::size_t i = depth; i < t_.num_attackers; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < t_.num_defenders; ++j)
                if (!used_[j])
                    best = std::min(best, increment(i, j, depth));
            bound += best;
        }
        return bound;
    }

    void descend(std::size_t depth, double cost)
    {
        if (depth == t_.num_attackers) {
            if (best_.empty() || strictly_better(cost, best_cost_)) {
                best_ = current_;
                best_cost_ = cost;
            }
            return;
        }
        if (!best_.empty() && !strictly_better(cost + lower_bound(depth), best_cost_))
            return;
        for (std::size_t j = 0; j < t_.num_defenders; ++j) {
            if (used_[j])
                continue;
            const double next = cost + increment(depth, j, depth);
            if (!best_.empty() && !strictly_better(next, best_cost_))
                continue;
            used_[j] = true;
            current_[depth] = j;
            descend(depth + 1, next);
            used_[j] = false;
        }
    }

    const CostTables& t_;
    double w_;
    std::vector<std::size_t> current_;
    std::vector<bool> used_;
    std::vector<std::size_t> best_;
    double best_cost_ = std::numeric_limits<double>::infinity();
};

}  // namespace

Assignment solve_cadaa(const CostTables& tables)
{
    tables.validate();
    return make_assignment(tables, BranchAndBound(tables, tables.weight).solve());
}

Assignment solve_cudaa(const CostTables& tables)
{
    tables.validate();
    return make_assignment(tables, BranchAndBound(tables, 0.0).solve());
}

Assignment solve_exhaustive(const CostTables& tables, double weight)
{
    tables.validate();
    const std::size_t nd = tables.num_defenders;
    const std::size_t na = tables.num_attackers;
    std::vector<std::size_t> current(na);
    std::vector<bool> used(nd, false);
    std::vector<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();

    auto recurse = [&](auto&& self, std::size_t i) -> void {
        if (i == na) {
            const double cost = evaluate_objective(tables, current, weight).total;
            if (best.empty() || strictly_better(cost, best_cost)) {
                best = current;
                best_cost = cost;
            }
            return;
        }
        for (std::size_t j = 0; j < nd; ++j) {
            if (used[j])
                continue;
            used[j] = true;
            current[i] = j;
            self(self, i + 1);
            used[j] = false;
        }
    };
    recurse(recurse, 0);
    return make_assignment(tables, best);
}

}  // namespace idcais
