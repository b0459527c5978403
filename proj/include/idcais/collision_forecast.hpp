#pragma once

#include "idcais/dynamics.hpp"
#include "idcais/engagement.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace idcais {

/// Triangle enclosing a constant-control trajectory segment. When
/// `degenerate` is set the hull is the segment vertices[0]-vertices[1] and
/// vertices[2] duplicates vertices[1].
struct TrajectoryTriangle {
    std::array<Vec2, 3> vertices;
    bool degenerate = false;

    bool contains(const Vec2& p, double tol = 1e-9) const;
};

/// Closed-form trajectory of one agent under a held constant control.
struct ConstantControlPath {
    AgentState start;
    Vec2 control = Vec2::Zero();
    double drag = 0.5;

    Vec2 position(double t) const { return position_at(start, control, t, drag); }
    Vec2 velocity(double t) const { return std::exp(-drag * t) * start.velocity + growth_factors(t, drag).e1 * control; }
};

TrajectoryTriangle bounding_triangle(const AgentState& start, double heading, double t_final, double bound,
                                     double drag);
TrajectoryTriangle bounding_triangle(const ConstantControlPath& path, double t_final);

/// True iff the two hulls are closer than `separation` (strictly).
bool triangles_conflict(const TrajectoryTriangle& a, const TrajectoryTriangle& b, double separation);

/// Minimum distance between the two hulls (0 when they overlap).
double triangle_distance(const TrajectoryTriangle& a, const TrajectoryTriangle& b);

struct CollisionScanOptions {
    double scan_step = 1e-2;     ///< [s]
    double time_tolerance = 1e-9;  ///< refinement bracket [s]
};

/// Earliest t in [0, horizon] with ||a(t) - b(t)|| <= separation.
/// Both trajectories hold their control past their own interception time.
std::optional<double> collision_time(const ConstantControlPath& a, const ConstantControlPath& b, double separation,
                                     double horizon, const CollisionScanOptions& opts = {});

/// Defender j's interception path towards attacker i.
struct InterceptionPlan {
    ConstantControlPath path;
    double intercept_time = 0.0;
    EngagementSolution solution;
};

/// Engagement solutions for every (defender, attacker) pair, indexed [j][i].
struct EngagementTable {
    std::size_t num_defenders = 0;
    std::size_t num_attackers = 0;
    std::vector<InterceptionPlan> plans;  // row-major, j * num_attackers + i

    const InterceptionPlan& at(std::size_t j, std::size_t i) const { return plans[j * num_attackers + i]; }
};

EngagementTable build_engagement_table(const std::vector<AgentState>& defenders,
                                       const std::vector<AgentState>& attackers, const WorldParams& world,
                                       const AgentParams& pd, const AgentParams& pa);

struct CollisionEntry {
    double time = 0.0;
    bool clamped = false;  ///< raw time was below t_eps
};

/// Collision times over the 4-index (j, i, j', i') space; absent entries mean no collision.
class CollisionTable {
public:
    CollisionTable() = default;
    CollisionTable(std::size_t num_defenders, std::size_t num_attackers);

    std::size_t num_defenders() const { return nd_; }
    std::size_t num_attackers() const { return na_; }

    const std::optional<CollisionEntry>& at(std::size_t j, std::size_t i, std::size_t jp, std::size_t ip) const
    {
        return entries_[index(j, i, jp, ip)];
    }
    void set(std::size_t j, std::size_t i, std::size_t jp, std::size_t ip, std::optional<CollisionEntry> e);
    std::size_t count() const;

    bool operator==(const CollisionTable&) const;

private:
    std::size_t index(std::size_t j, std::size_t i, std::size_t jp, std::size_t ip) const
    {
        return ((j * na_ + i) * nd_ + jp) * na_ + ip;
    }
    std::size_t nd_ = 0;
    std::size_t na_ = 0;
    std::vector<std::optional<CollisionEntry>> entries_;
};

bool operator==(const CollisionEntry& a, const CollisionEntry& b);

struct ForecastOptions {
    bool use_triangle_pruning = true;
    double min_time = 1e-3;  ///< t_eps [s]
    CollisionScanOptions scan;
};

struct ForecastStats {
    std::size_t candidate_pairs = 0;   ///< unordered pairs with j != j' and i != i'
    std::size_t collision_time_calls = 0;
    std::size_t collisions = 0;
    std::size_t clamped = 0;
};

/// Collision times between every pair of defender plans. Hulls are tested
/// first; the exact scan runs only on conflicting hulls.
CollisionTable all_pairs_collision_times(const EngagementTable& table, double separation,
                                         const ForecastOptions& opts = {}, ForecastStats* stats = nullptr);

}  // namespace idcais
