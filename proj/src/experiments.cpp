#include "idcais/experiments.hpp"

#include "json_reader.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace idcais {

unsigned runner_threads()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("IDCAIS_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0)
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn)
{
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(runner_threads(), n));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k)
            fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t k = next.fetch_add(1);
                if (k >= n)
                    return;
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index)
{
    // splitmix64 over the combined key
    std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::optional<double> forecast_collision_time(const CollisionTable& collisions, const Assignment& assignment)
{
    std::optional<double> first;
    const auto& map = assignment.defender_target;
    for (std::size_t j = 0; j < map.size(); ++j) {
        if (!map[j])
            continue;
        for (std::size_t jp = j + 1; jp < map.size(); ++jp) {
            if (!map[jp])
                continue;
            const auto& e = collisions.at(j, *map[j], jp, *map[jp]);
            if (e && (!first || e->time < *first))
                first = e->time;
        }
    }
    return first;
}

namespace {

ModeReport run_mode(const Scenario& base, AssignmentMode mode, const CostBuildResult& built)
{
    Scenario s = base;
    s.assignment_mode = mode;
    s.cbf_enabled = false;
    SimulationOptions opts;
    opts.record_trajectory = false;
    const auto sim = run_simulation(s, opts);

    ModeReport r;
    r.mode = mode;
    r.assignment = mode == AssignmentMode::Cadaa ? solve_cadaa(built.tables) : solve_cudaa(built.tables);
    r.objective = evaluate_objective(built.tables, r.assignment.attacker_defender(base.attackers.size()), base.weight).total;
    r.forecast_collision = forecast_collision_time(built.collisions, r.assignment);
    r.min_defender_separation = sim.outcome.min_defender_separation;
    r.min_separation_time = sim.outcome.min_separation_time;
    r.first_collision = sim.outcome.first_collision_time;
    r.interception_times = sim.outcome.interception_times;
    r.captures = sim.outcome.captures;
    r.breaches = sim.outcome.breaches;
    return r;
}

CostBuildResult tables_for(const Scenario& s)
{
    CostBuildOptions opts;
    opts.weight = s.weight;
    return build_cost_tables(s.defender_states(), s.attacker_states(), s.world, s.defender_params(),
                             s.attacker_params(), opts);
}

}  // namespace

ComparisonReport compare_assignments(const Scenario& scenario)
{
    scenario.validate();
    const auto built = tables_for(scenario);
    ComparisonReport report;
    report.cadaa = run_mode(scenario, AssignmentMode::Cadaa, built);
    report.cudaa = run_mode(scenario, AssignmentMode::Cudaa, built);
    report.same_assignment = report.cadaa.assignment.defender_target == report.cudaa.assignment.defender_target;
    return report;
}

Vec2 sample_annulus(std::mt19937_64& rng, const Vec2& center, double r_min, double r_max)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = std::sqrt(r_min * r_min + unit(rng) * (r_max * r_max - r_min * r_min));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    return center + r * heading_vector(phi);
}

Vec2 sample_velocity(std::mt19937_64& rng, double speed_max)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double speed = speed_max * unit(rng);
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    return speed * heading_vector(phi);
}

Scenario random_scenario(const RandomScenarioSpec& spec, std::mt19937_64& rng)
{
    Scenario s;
    const AgentParams pa = AgentParams::attacker();
    const AgentParams pd = AgentParams::defender();
    for (std::size_t i = 0; i < spec.num_attackers; ++i) {
        AgentSpec a{{sample_annulus(rng, s.world.protected_center, spec.attacker_radius_min, spec.attacker_radius_max),
                     sample_velocity(rng, spec.attacker_speed_fraction * pa.speed_cap())},
                    pa};
        s.attackers.push_back(a);
    }
    while (s.defenders.size() < spec.num_defenders) {
        const Vec2 r =
            sample_annulus(rng, s.world.protected_center, spec.defender_radius_min, spec.defender_radius_max);
        const Vec2 v = sample_velocity(rng, spec.defender_speed_fraction * pd.speed_cap());
        const bool clear = std::all_of(s.defenders.begin(), s.defenders.end(), [&](const AgentSpec& d) {
            return (d.state.position - r).norm() > s.world.collision_radius;
        });
        if (clear)
            s.defenders.push_back({{r, v}, pd});
    }
    return s;
}

Scenario random_winning_engagement(std::mt19937_64& rng, AttackerPolicy policy)
{
    RandomScenarioSpec spec;
    spec.num_attackers = 1;
    spec.num_defenders = 1;
    spec.attacker_radius_min = 8.0;
    spec.attacker_radius_max = 25.0;
    spec.defender_radius_min = 0.0;
    spec.defender_radius_max = 12.0;
    for (;;) {
        Scenario s = random_scenario(spec, rng);
        s.attacker_policy = policy;
        s.cbf_enabled = false;
        const auto test = in_winning_region(s.defenders[0].state, s.attackers[0].state, s.world, s.defender_params(),
                                            s.attacker_params());
        if (test.defender_wins)
            return s;
    }
}

std::optional<Scenario> random_forced_conflict(std::mt19937_64& rng, std::size_t pairs)
{
    RandomScenarioSpec spec;
    spec.num_attackers = pairs;
    spec.num_defenders = pairs;
    spec.defender_radius_min = 2.0;
    spec.defender_radius_max = 10.0;
    Scenario s = random_scenario(spec, rng);
    s.cbf_enabled = true;

    const PairGains gains = s.pair_gains();
    for (std::size_t j = 0; j < pairs; ++j)
        for (std::size_t jp = j + 1; jp < pairs; ++jp) {
            const auto b = barrier_state(s.defenders[j].state, s.defenders[jp].state, gains.of(j, jp),
                                         s.world.collision_radius, j, jp);
            if (b.h > 0.0 || b.psi > 0.0)
                return std::nullopt;
        }
    const auto built = tables_for(s);
    if (!forecast_collision_time(built.collisions, solve_cadaa(built.tables)))
        return std::nullopt;
    return s;
}

WitnessSearchResult search_witnesses(const WitnessSearchOptions& opts)
{
    struct Sample {
        bool differ = false;
        bool avoid_candidate = false;
        bool delay_candidate = false;
    };
    WitnessSearchResult result;
    const std::size_t chunk = 256;
    for (std::size_t begin = 0; begin < opts.samples; begin += chunk) {
        const std::size_t end = std::min(opts.samples, begin + chunk);
        std::vector<Sample> samples(end - begin);
        std::vector<std::optional<Witness>> avoid(end - begin);
        std::vector<std::optional<Witness>> delay(end - begin);
        const bool need_avoid = !result.cadaa_avoids;
        const bool need_delay = !result.cadaa_delays;
        parallel_for(end - begin, [&](std::size_t k) {
            std::mt19937_64 rng(cell_seed(opts.seed, begin + k));
            const Scenario s = random_scenario(opts.spec, rng);
            const auto built = tables_for(s);
            const Assignment cad = solve_cadaa(built.tables);
            const Assignment cud = solve_cudaa(built.tables);
            if (cad.defender_target == cud.defender_target)
                return;
            samples[k].differ = true;
            const auto t_cad = forecast_collision_time(built.collisions, cad);
            const auto t_cud = forecast_collision_time(built.collisions, cud);
            if (need_avoid && t_cud && !t_cad) {
                const auto report = compare_assignments(s);
                if (report.cudaa.min_defender_separation < s.world.collision_radius &&
                    report.cadaa.min_defender_separation >= s.world.collision_radius)
                    avoid[k] = Witness{begin + k, s, report};
            }
            if (need_delay && t_cud && t_cad && *t_cad > *t_cud)
                delay[k] = Witness{begin + k, s, compare_assignments(s)};
        });
        for (std::size_t k = 0; k < samples.size(); ++k) {
            ++result.sampled;
            if (samples[k].differ)
                ++result.differing_assignments;
            if (!result.cadaa_avoids && avoid[k])
                result.cadaa_avoids = avoid[k];
            if (!result.cadaa_delays && delay[k])
                result.cadaa_delays = delay[k];
        }
        if (result.cadaa_avoids && result.cadaa_delays)
            break;
    }
    return result;
}

SweepResult success_rate_sweep(const SweepConfig& config)
{
    if (config.base.attackers.size() != 2 || config.base.defenders.empty())
        throw ValidationError("sweep: base scenario needs two attackers and a first defender");
    SweepResult result;
    result.cells.resize(config.cells.size());
    parallel_for(config.cells.size(), [&](std::size_t k) {
        SweepCellResult& r = result.cells[k];
        r.cell = config.cells[k];
        Scenario s = config.base;
        s.defenders.resize(1);
        if (r.cell.defender1)
            s.defenders[0].state = *r.cell.defender1;
        s.defenders.push_back({r.cell.defender2, s.defenders[0].params});
        try {
            s.validate();
        } catch (const ValidationError& e) {
            r.valid = false;
            r.reason = e.what();
            return;
        }
        const auto built = tables_for(s);
        r.cudaa_collision = forecast_collision_time(built.collisions, solve_cudaa(built.tables));
        r.cadaa_collision = forecast_collision_time(built.collisions, solve_cadaa(built.tables));
        r.cudaa_collides = r.cudaa_collision.has_value();
        r.cadaa_avoids = !r.cadaa_collision.has_value();
    });
    for (const auto& r : result.cells) {
        if (!r.valid || !r.cudaa_collides)
            continue;
        ++result.denominator;
        if (r.cadaa_avoids)
            ++result.numerator;
    }
    if (result.denominator > 0)
        result.sigma = static_cast<double>(result.numerator) / static_cast<double>(result.denominator);
    return result;
}

std::vector<SweepCell> lattice_cells(double x_min, double x_max, std::size_t nx, double y_min, double y_max,
                                     std::size_t ny, const std::vector<Vec2>& velocities)
{
    auto at = [](double lo, double hi, std::size_t n, std::size_t k) {
        return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    };
    std::vector<SweepCell> cells;
    for (std::size_t a = 0; a < nx; ++a)
        for (std::size_t b = 0; b < ny; ++b)
            for (const Vec2& v : velocities)
                cells.push_back({{{at(x_min, x_max, nx, a), at(y_min, y_max, ny, b)}, v}, std::nullopt});
    return cells;
}

std::vector<SweepCell> random_cells(std::size_t count, std::uint64_t seed, const Vec2& center, double r_min,
                                    double r_max, double speed_max)
{
    std::vector<SweepCell> cells;
    for (std::size_t k = 0; k < count; ++k) {
        std::mt19937_64 rng(cell_seed(seed, k));
        const Vec2 r = sample_annulus(rng, center, r_min, r_max);
        cells.push_back({{r, sample_velocity(rng, speed_max)}, std::nullopt});
    }
    return cells;
}

SweepConfig mirror_sweep(const MirrorFamily& family)
{
    SweepConfig config;
    const AgentParams pa = AgentParams::attacker();
    const AgentParams pd = AgentParams::defender();
    config.base.attackers.push_back({{{-family.attacker_x, family.attacker_y}, Vec2::Zero()}, pa});
    config.base.attackers.push_back({{{family.attacker_x, family.attacker_y}, Vec2::Zero()}, pa});
    config.base.defenders.push_back({{}, pd});
    for (double x : family.xs)
        for (double y : family.ys)
            for (double v : family.speeds) {
                const AgentState left{{-x, y}, {v, 0.0}};
                const AgentState right{{x, y}, {-v, 0.0}};
                config.cells.push_back({right, left});
            }
    config.base.defenders[0].state = config.cells.empty() ? AgentState{} : *config.cells.front().defender1;
    return config;
}

namespace {

using detail::JsonObject;

std::vector<double> number_list(const JsonObject& o, const char* key, const std::vector<double>& fallback)
{
    if (!o.has(key))
        return fallback;
    std::vector<double> out;
    const auto& a = o.array(key);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!a[k].is_number())
            throw ValidationError(o.child(key) + "/" + std::to_string(k) + ": expected a number");
        out.push_back(a[k].get<double>());
    }
    return out;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& text, std::optional<std::uint64_t> seed_override)
{
    const auto doc = detail::parse_document(text);
    const JsonObject root(doc, "");
    root.allow({"scenario", "grid"});
    root.require("grid");
    const JsonObject grid(root.raw("grid"), "/grid");
    const std::string type = grid.string("type", "");

    if (type == "mirror") {
        grid.allow({"type", "attacker_x", "attacker_y", "xs", "ys", "speeds"});
        MirrorFamily f;
        f.attacker_x = grid.number("attacker_x", f.attacker_x);
        f.attacker_y = grid.number("attacker_y", f.attacker_y);
        f.xs = number_list(grid, "xs", f.xs);
        f.ys = number_list(grid, "ys", f.ys);
        f.speeds = number_list(grid, "speeds", f.speeds);
        return mirror_sweep(f);
    }

    root.require("scenario");
    SweepConfig config;
    try {
        config.base = parse_scenario(root.raw("scenario").dump());
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("/scenario") + e.what());
    }
    if (config.base.attackers.size() != 2 || config.base.defenders.size() != 2)
        throw ValidationError("/scenario: expected two attackers and two defenders (the second is the varied one)");

    if (type == "lattice") {
        grid.allow({"type", "x", "y", "velocities"});
        auto axis = [&](const char* key) {
            const auto v = number_list(grid, key, {});
            if (v.size() != 3 || v[2] < 1.0 || v[2] != std::floor(v[2]))
                throw ValidationError(grid.child(key) + ": expected [min, max, count]");
            return v;
        };
        const auto xs = axis("x");
        const auto ys = axis("y");
        std::vector<Vec2> velocities;
        if (grid.has("velocities")) {
            const auto& list = grid.array("velocities");
            for (std::size_t k = 0; k < list.size(); ++k) {
                if (!list[k].is_array() || list[k].size() != 2 || !list[k][0].is_number() || !list[k][1].is_number())
                    throw ValidationError("/grid/velocities/" + std::to_string(k) + ": expected a pair of numbers");
                velocities.emplace_back(list[k][0].get<double>(), list[k][1].get<double>());
            }
        } else {
            velocities.push_back(Vec2::Zero());
        }
        config.cells = lattice_cells(xs[0], xs[1], static_cast<std::size_t>(xs[2]), ys[0], ys[1],
                                     static_cast<std::size_t>(ys[2]), velocities);
    } else if (type == "random") {
        grid.allow({"type", "count", "seed", "radius", "speed_max"});
        const double count = grid.number("count");
        if (!(count >= 1.0) || count != std::floor(count))
            throw ValidationError("/grid/count: expected a positive integer");
        const double seed = grid.number("seed", 1.0);
        if (!(seed >= 0.0) || seed != std::floor(seed))
            throw ValidationError("/grid/seed: expected a non-negative integer");
        const auto radius = number_list(grid, "radius", {3.0, 14.0});
        if (radius.size() != 2 || !(radius[0] >= 0.0 && radius[1] > radius[0]))
            throw ValidationError("/grid/radius: expected [r_min, r_max] with 0 <= r_min < r_max");
        const double speed_max = grid.number("speed_max", config.base.defender_params().speed_cap());
        if (!(speed_max >= 0.0 && speed_max <= config.base.defender_params().speed_cap()))
            throw ValidationError("/grid/speed_max: must lie in [0, speed cap]");
        config.cells = random_cells(static_cast<std::size_t>(count), seed_override.value_or(static_cast<std::uint64_t>(seed)),
                                    config.base.world.protected_center, radius[0], radius[1], speed_max);
    } else {
        throw ValidationError("/grid/type: expected lattice|random|mirror");
    }
    return config;
}

SweepConfig load_sweep_config(const std::string& path, std::optional<std::uint64_t> seed)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open sweep config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sweep_config(buf.str(), seed);
}

}  // namespace idcais
