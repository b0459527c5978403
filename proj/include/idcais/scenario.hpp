#pragma once

#include "idcais/dynamics.hpp"
#include "idcais/safety_filter.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace idcais {

enum class AttackerPolicy { Optimal, Evasive };
enum class AssignmentMode { Cadaa, Cudaa };

const char* to_string(AttackerPolicy p);
const char* to_string(AssignmentMode m);
AttackerPolicy parse_attacker_policy(const std::string& s);
AssignmentMode parse_assignment_mode(const std::string& s);

struct AgentSpec {
    AgentState state;
    AgentParams params;
    bool operator==(const AgentSpec& o) const { return state == o.state && params == o.params; }
};

struct GainOverride {
    std::size_t j;
    std::size_t jp;
    double k;
    bool operator==(const GainOverride&) const = default;
};

/// Barrier gains; `shared` unset means the minimum admissible gain.
struct GainSpec {
    std::optional<double> shared;
    std::vector<GainOverride> overrides;
    bool operator==(const GainSpec&) const = default;
};

/// Declarative initial conditions and run settings.
struct Scenario {
    WorldParams world;
    std::vector<AgentSpec> attackers;
    std::vector<AgentSpec> defenders;
    double weight = 0.5;
    GainSpec gains;
    double dt = 0.01;
    double t_max = 60.0;
    AttackerPolicy attacker_policy = AttackerPolicy::Optimal;
    AssignmentMode assignment_mode = AssignmentMode::Cadaa;
    bool cbf_enabled = true;
    bool reassign_on_capture = false;

    bool operator==(const Scenario& o) const;

    /// Throws ValidationError naming the first violated invariant.
    void validate() const;

    /// Shared role parameters (the scenario requires homogeneous roles).
    const AgentParams& attacker_params() const { return attackers.front().params; }
    const AgentParams& defender_params() const { return defenders.front().params; }

    std::vector<AgentState> attacker_states() const;
    std::vector<AgentState> defender_states() const;

    /// Resolved per-pair barrier gains.
    PairGains pair_gains() const;
};

/// Parses a scenario document; unknown fields and invariant violations throw
/// ValidationError with the JSON path of the offending value.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Canonical form: every field explicit, fixed key order, two-space indent.
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

}  // namespace idcais
