// idcais: command-line front end for simulation, assignment and sweeps.

#include "idcais/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace idcais;
using nlohmann::ordered_json;

namespace {

ordered_json vec(const Vec2& v) { return ordered_json::array({v.x(), v.y()}); }

template <class T>
ordered_json optional_json(const std::optional<T>& v)
{
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json targets_json(const Assignment& a)
{
    ordered_json out = ordered_json::array();
    for (const auto& t : a.defender_target)
        out.push_back(optional_json(t));
    return out;
}

ordered_json outcome_json(const Outcome& o)
{
    ordered_json j;
    j["captures"] = o.captures;
    j["breaches"] = o.breaches;
    j["still_active"] = o.still_active;
    j["final_time"] = o.final_time;
    j["min_defender_separation"] =
        std::isfinite(o.min_defender_separation) ? ordered_json(o.min_defender_separation) : ordered_json(nullptr);
    j["min_separation_time"] = o.min_separation_time;
    j["first_collision_time"] = optional_json(o.first_collision_time);
    j["interception_times"] = ordered_json::array();
    for (const auto& t : o.interception_times)
        j["interception_times"].push_back(optional_json(t));
    j["breach_times"] = ordered_json::array();
    for (const auto& t : o.breach_times)
        j["breach_times"].push_back(optional_json(t));
    j["objective_values"] = o.objective_values;
    j["relaxed_filter_steps"] = o.relaxed_steps;
    j["too_many_active_row_steps"] = o.too_many_active_steps;
    j["filter_active_steps"] = o.filter_active_steps;
    j["max_defender_control"] = o.max_defender_control;
    j["max_attacker_control"] = o.max_attacker_control;
    return j;
}

ordered_json mode_json(const ModeReport& r)
{
    ordered_json j;
    j["mode"] = to_string(r.mode);
    j["defender_targets"] = targets_json(r.assignment);
    j["objective"] = r.objective;
    j["forecast_collision_time"] = optional_json(r.forecast_collision);
    j["min_defender_separation"] = r.min_defender_separation;
    j["min_separation_time"] = r.min_separation_time;
    j["first_collision_time"] = optional_json(r.first_collision);
    j["interception_times"] = ordered_json::array();
    for (const auto& t : r.interception_times)
        j["interception_times"].push_back(optional_json(t));
    j["captures"] = r.captures;
    j["breaches"] = r.breaches;
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
}

struct Common {
    std::string scenario;
    std::uint64_t seed = 1;
};

int run_simulate(const Common& c, const std::string& out_dir, std::optional<double> dt, bool no_cbf,
                 const std::string& assignment, const std::string& policy)
{
    Scenario s = load_scenario(c.scenario);
    if (dt)
        s.dt = *dt;
    if (no_cbf)
        s.cbf_enabled = false;
    if (!assignment.empty())
        s.assignment_mode = parse_assignment_mode(assignment);
    if (!policy.empty())
        s.attacker_policy = parse_attacker_policy(policy);
    s.validate();

    const auto result = run_simulation(s);
    ordered_json summary = outcome_json(result.outcome);
    summary["seed"] = c.seed;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(std::filesystem::path(out_dir) / "trajectory.csv");
        result.log.write_csv(csv);
        std::ofstream events(std::filesystem::path(out_dir) / "events.json");
        result.log.write_events_json(events);
        write_file(std::filesystem::path(out_dir) / "outcome.json", summary.dump(2) + "\n");
    }
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_assign(const Common& c, const std::string& out)
{
    const Scenario s = load_scenario(c.scenario);
    CostBuildOptions opts;
    opts.weight = s.weight;
    const auto built = build_cost_tables(s.defender_states(), s.attacker_states(), s.world, s.defender_params(),
                                         s.attacker_params(), opts);
    const Assignment a =
        s.assignment_mode == AssignmentMode::Cadaa ? solve_cadaa(built.tables) : solve_cudaa(built.tables);

    ordered_json j;
    j["mode"] = to_string(s.assignment_mode);
    j["weight"] = s.weight;
    j["defender_targets"] = targets_json(a);
    j["objective"] = a.objective;
    j["interception_cost"] = a.interception_cost;
    j["collision_cost"] = a.collision_cost;
    j["forecast_collision_time"] = optional_json(forecast_collision_time(built.collisions, a));
    ordered_json table = ordered_json::array();
    for (std::size_t jd = 0; jd < s.defenders.size(); ++jd) {
        ordered_json row = ordered_json::array();
        for (std::size_t i = 0; i < s.attackers.size(); ++i)
            row.push_back(built.tables.interception(jd, i));
        table.push_back(row);
    }
    j["interception_costs"] = table;
    ordered_json collisions = ordered_json::array();
    const std::size_t nd = s.defenders.size();
    const std::size_t na = s.attackers.size();
    for (std::size_t jd = 0; jd < nd; ++jd)
        for (std::size_t i = 0; i < na; ++i)
            for (std::size_t jp = jd + 1; jp < nd; ++jp)
                for (std::size_t ip = 0; ip < na; ++ip)
                    if (const auto& e = built.collisions.at(jd, i, jp, ip)) {
                        ordered_json entry;
                        entry["pair"] = ordered_json::array({ordered_json::array({jd, i}), ordered_json::array({jp, ip})});
                        entry["time"] = e->time;
                        entry["clamped"] = e->clamped;
                        collisions.push_back(entry);
                    }
    j["collisions"] = collisions;
    j["forecast_stats"] = {{"candidate_pairs", built.stats.candidate_pairs},
                           {"collision_time_calls", built.stats.collision_time_calls},
                           {"collisions", built.stats.collisions},
                           {"clamped", built.stats.clamped}};
    j["seed"] = c.seed;
    write_file(out, j.dump(2) + "\n");
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_compare(const Common& c)
{
    const Scenario s = load_scenario(c.scenario);
    const auto report = compare_assignments(s);
    ordered_json j;
    j["same_assignment"] = report.same_assignment;
    j["collision_radius"] = s.world.collision_radius;
    j["cadaa"] = mode_json(report.cadaa);
    j["cudaa"] = mode_json(report.cudaa);
    j["seed"] = c.seed;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_sweep(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out)
{
    const SweepConfig config = load_sweep_config(config_path, seed);
    const auto result = success_rate_sweep(config);
    ordered_json j;
    j["sigma"] = optional_json(result.sigma);
    j["numerator"] = result.numerator;
    j["denominator"] = result.denominator;
    j["cells"] = ordered_json::array();
    for (const auto& cell : result.cells) {
        ordered_json e;
        if (cell.cell.defender1)
            e["defender1"] = {{"position", vec(cell.cell.defender1->position)},
                              {"velocity", vec(cell.cell.defender1->velocity)}};
        e["defender2"] = {{"position", vec(cell.cell.defender2.position)},
                          {"velocity", vec(cell.cell.defender2.velocity)}};
        e["valid"] = cell.valid;
        if (!cell.valid)
            e["reason"] = cell.reason;
        e["cudaa_collision_time"] = optional_json(cell.cudaa_collision);
        e["cadaa_collision_time"] = optional_json(cell.cadaa_collision);
        e["cudaa_collides"] = cell.cudaa_collides;
        e["cadaa_avoids"] = cell.cadaa_avoids;
        j["cells"].push_back(e);
    }
    if (!out.empty())
        write_file(out, j.dump(2) + "\n");
    ordered_json summary;
    summary["sigma"] = j["sigma"];
    summary["numerator"] = result.numerator;
    summary["denominator"] = result.denominator;
    summary["cells"] = result.cells.size();
    std::cout << summary.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Collision-aware multi-defender interception toolkit"};
    app.require_subcommand(1);

    Common common;
    std::string out_dir;
    std::string out_file;
    std::string sweep_out;
    std::optional<double> dt;
    bool no_cbf = false;
    std::string assignment;
    std::string policy;
    std::string config;

    auto* sim = app.add_subcommand("simulate", "Run the closed-loop engagement");
    sim->add_option("--scenario", common.scenario, "Scenario JSON file")->required();
    sim->add_option("--out", out_dir, "Directory for trajectory.csv, events.json and outcome.json");
    sim->add_option("--dt", dt, "Override the step size [s]");
    sim->add_flag("--no-cbf", no_cbf, "Disable the safety filter");
    sim->add_option("--assignment", assignment, "cadaa|cudaa");
    sim->add_option("--attacker-policy", policy, "optimal|evasive");
    sim->add_option("--seed", common.seed, "Seed (runs are deterministic; recorded in the output)");

    auto* assign = app.add_subcommand("assign", "Solve the defender-to-attacker assignment");
    assign->add_option("--scenario", common.scenario, "Scenario JSON file")->required();
    assign->add_option("--out", out_file, "Assignment JSON output")->required();
    assign->add_option("--seed", common.seed, "Seed (recorded in the output)");

    auto* compare = app.add_subcommand("compare", "Compare collision-aware and collision-unaware assignments");
    compare->add_option("--scenario", common.scenario, "Scenario JSON file")->required();
    compare->add_option("--seed", common.seed, "Seed (recorded in the output)");

    std::optional<std::uint64_t> sweep_seed;
    auto* sweep = app.add_subcommand("sweep", "Success-rate sweep over the second defender's placement");
    sweep->add_option("--config", config, "Sweep configuration JSON file")->required();
    sweep->add_option("--out", sweep_out, "Per-cell results JSON");
    sweep->add_option("--seed", sweep_seed, "Overrides the random grid seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim)
            return run_simulate(common, out_dir, dt, no_cbf, assignment, policy);
        if (*assign)
            return run_assign(common, out_file);
        if (*compare)
            return run_compare(common);
        if (*sweep)
            return run_sweep(config, sweep_seed, sweep_out);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
