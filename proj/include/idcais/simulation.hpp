#pragma once

#include "idcais/assignment.hpp"
#include "idcais/scenario.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace idcais {

enum class AgentStatus { Active, Captured, Breached, Idle };
const char* to_string(AgentStatus s);

struct StepRecord {
    double t;
    std::size_t agent_id;  ///< index within its role
    Role role;
    Vec2 position;
    Vec2 velocity;
    Vec2 control;  ///< applied over [t, t + dt]
    AgentStatus status;

    bool operator==(const StepRecord& o) const
    {
        return t == o.t && agent_id == o.agent_id && role == o.role && position == o.position &&
               velocity == o.velocity && control == o.control && status == o.status;
    }
};

enum class EventKind { Assignment, Capture, Breach, SeparationMinimum, RelaxedFilter, TooManyActiveRows };
const char* to_string(EventKind k);

struct Event {
    double t = 0.0;
    EventKind kind = EventKind::Capture;
    std::optional<std::size_t> attacker;
    std::optional<std::size_t> defender;
    std::optional<std::size_t> other_defender;
    double value = 0.0;  ///< objective, separation or distance depending on the kind
    std::vector<std::optional<std::size_t>> map;  ///< defender targets for Assignment events

    bool operator==(const Event&) const = default;
};

struct TrajectoryLog {
    std::vector<StepRecord> records;
    std::vector<Event> events;

    bool operator==(const TrajectoryLog&) const = default;
    void write_csv(std::ostream& out) const;
    void write_events_json(std::ostream& out) const;
};

struct Outcome {
    std::size_t captures = 0;
    std::size_t breaches = 0;
    std::size_t still_active = 0;
    double min_defender_separation = std::numeric_limits<double>::infinity();
    double min_separation_time = 0.0;
    /// Start of the first step on which two defenders come within the collision radius.
    std::optional<double> first_collision_time;
    std::vector<std::optional<double>> interception_times;  ///< per attacker
    std::vector<std::optional<double>> breach_times;        ///< per attacker
    std::vector<double> objective_values;                   ///< one per assignment solve
    std::vector<Assignment> assignments;
    std::size_t relaxed_steps = 0;
    std::size_t too_many_active_steps = 0;
    std::size_t filter_active_steps = 0;
    double max_defender_control = 0.0;
    double max_attacker_control = 0.0;
    /// Largest correction norm on a step where no barrier row was active (must be 0).
    double max_idle_correction = 0.0;
    double final_time = 0.0;
};

/// Attacker decision rule: (attacker index, attacker state, defender states,
/// defender activity flags, world, attacker parameters) -> control.
using AttackerController = std::function<Vec2(std::size_t, const AgentState&, const std::vector<AgentState>&,
                                              const std::vector<bool>&, const WorldParams&, const AgentParams&)>;

/// Full-magnitude control blending the flee direction from the nearest
/// active defender with the bearing to the protected center, 0.5 / 0.5.
Vec2 attacker_policy_evasive(const AgentState& attacker, const std::vector<AgentState>& defenders,
                             const std::vector<bool>& active, const WorldParams& world, const AgentParams& pa);

/// Time-optimal dash to the protected center.
Vec2 attacker_policy_optimal(const AgentState& attacker, const WorldParams& world, const AgentParams& pa);

struct SimulationResult {
    TrajectoryLog log;
    Outcome outcome;
};

struct SimulationOptions {
    /// Overrides the scenario's attacker policy when set.
    AttackerController attacker_controller;
    bool record_trajectory = true;
};

/// Closed-loop run: assignment, per-step re-solved interception, attacker
/// policy, optional safety filter and exact zero-order-hold propagation.
SimulationResult run_simulation(const Scenario& scenario, const SimulationOptions& opts = {});

/// Minimum distance between two agents holding constant controls over [0, dt].
double min_distance_over_step(const AgentState& a, const Vec2& ua, const AgentState& b, const Vec2& ub, double drag,
                              double dt);

}  // namespace idcais
