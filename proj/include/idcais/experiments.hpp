#pragma once

#include "idcais/assignment.hpp"
#include "idcais/scenario.hpp"
#include "idcais/simulation.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace idcais {

/// Worker count for the parallel runners: hardware concurrency, capped by
/// IDCAIS_THREADS when set to a positive integer.
unsigned runner_threads();

/// Runs fn(0) ... fn(n - 1) on up to runner_threads() workers. Each index is
/// executed exactly once; exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Independent, order-free seed for cell `index` of a run seeded with `seed`.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index);

/// Earliest forecast collision among the pairs engaged by `assignment`.
std::optional<double> forecast_collision_time(const CollisionTable& collisions, const Assignment& assignment);

struct ModeReport {
    AssignmentMode mode = AssignmentMode::Cadaa;
    Assignment assignment;
    double objective = 0.0;  ///< under the scenario's weight
    std::optional<double> forecast_collision;
    double min_defender_separation = 0.0;
    double min_separation_time = 0.0;
    std::optional<double> first_collision;  ///< first step with separation below the collision radius
    std::vector<std::optional<double>> interception_times;
    std::size_t captures = 0;
    std::size_t breaches = 0;
};

struct ComparisonReport {
    ModeReport cadaa;
    ModeReport cudaa;
    bool same_assignment = false;
};

/// Runs the scenario under both assignment modes with the safety filter off.
ComparisonReport compare_assignments(const Scenario& scenario);

/// Sampling domain for random engagements around the protected center.
struct RandomScenarioSpec {
    std::size_t num_attackers = 2;
    std::size_t num_defenders = 2;
    double attacker_radius_min = 14.0;
    double attacker_radius_max = 30.0;
    double defender_radius_min = 3.0;
    double defender_radius_max = 14.0;
    /// Speeds are uniform in [0, fraction * cap).
    double attacker_speed_fraction = 1.0;
    double defender_speed_fraction = 1.0;
};

/// Uniform position in the annulus [r_min, r_max] around `center`.
Vec2 sample_annulus(std::mt19937_64& rng, const Vec2& center, double r_min, double r_max);
/// Uniform velocity in the open disc of radius `speed_max`.
Vec2 sample_velocity(std::mt19937_64& rng, double speed_max);

/// Draws a valid scenario (defenders pairwise separated, attackers outside
/// the protected disc) with default parameters.
Scenario random_scenario(const RandomScenarioSpec& spec, std::mt19937_64& rng);

/// One attacker and one defender with the attacker inside the defender's
/// winning region.
Scenario random_winning_engagement(std::mt19937_64& rng, AttackerPolicy policy);

/// Two defenders start inside each other's conflict zone yet satisfy the
/// barrier's initial condition, and the collision-aware assignment still
/// forecasts a collision.
std::optional<Scenario> random_forced_conflict(std::mt19937_64& rng, std::size_t pairs = 2);

struct WitnessSearchOptions {
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    RandomScenarioSpec spec;
};

struct Witness {
    std::size_t sample = 0;
    Scenario scenario;
    ComparisonReport report;
};

struct WitnessSearchResult {
    std::size_t sampled = 0;
    std::size_t differing_assignments = 0;
    /// CUDAA separation drops below the collision radius, CADAA's does not.
    std::optional<Witness> cadaa_avoids;
    /// Both assignments forecast a collision and CADAA's comes strictly later.
    std::optional<Witness> cadaa_delays;
};

WitnessSearchResult search_witnesses(const WitnessSearchOptions& opts);

/// Success-rate sweep over the placement of the second defender.
struct SweepCell {
    AgentState defender2;
    /// Replaces the base first defender in this cell (mirror families).
    std::optional<AgentState> defender1;
};

struct SweepConfig {
    Scenario base;  ///< two attackers; only the first defender is kept
    std::vector<SweepCell> cells;
};

struct SweepCellResult {
    SweepCell cell;
    bool valid = true;  ///< false when the cell violates the scenario invariants
    std::string reason;
    bool cudaa_collides = false;
    bool cadaa_avoids = false;
    std::optional<double> cudaa_collision;
    std::optional<double> cadaa_collision;
};

struct SweepResult {
    std::vector<SweepCellResult> cells;
    std::size_t numerator = 0;    ///< CUDAA collides, CADAA avoids
    std::size_t denominator = 0;  ///< CUDAA collides
    std::optional<double> sigma;  ///< undefined when the denominator is 0
};

SweepResult success_rate_sweep(const SweepConfig& config);

/// Regular lattice of second-defender positions, one cell per velocity.
std::vector<SweepCell> lattice_cells(double x_min, double x_max, std::size_t nx, double y_min, double y_max,
                                     std::size_t ny, const std::vector<Vec2>& velocities);

/// Second-defender states drawn uniformly from an annulus with speeds below
/// `speed_max`.
std::vector<SweepCell> random_cells(std::size_t count, std::uint64_t seed, const Vec2& center, double r_min,
                                    double r_max, double speed_max);

/// Head-on family mirrored about the vertical axis through the protected
/// center: attackers at (+-attacker_x, attacker_y); each cell places the
/// defenders at (-+x, y) moving towards each other with speed `speed`.
struct MirrorFamily {
    double attacker_x = 14.0;
    double attacker_y = 16.0;
    std::vector<double> xs{4.0, 4.5, 5.0};
    std::vector<double> ys{7.0, 8.5, 10.0};
    std::vector<double> speeds{3.5, 4.0, 4.5};
};

SweepConfig mirror_sweep(const MirrorFamily& family);

/// Parses a sweep configuration document; `seed` replaces the random grid's seed.
SweepConfig parse_sweep_config(const std::string& text, std::optional<std::uint64_t> seed = std::nullopt);
SweepConfig load_sweep_config(const std::string& path, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace idcais
