#include "idcais/simulation.hpp"

#include "idcais/engagement.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>

namespace idcais {

const char* to_string(AgentStatus s)
{
    switch (s) {
    case AgentStatus::Active:
        return "active";
    case AgentStatus::Captured:
        return "captured";
    case AgentStatus::Breached:
        return "breached";
    case AgentStatus::Idle:
        return "idle";
    }
    return "?";
}

const char* to_string(EventKind k)
{
    switch (k) {
    case EventKind::Assignment:
        return "assignment";
    case EventKind::Capture:
        return "capture";
    case EventKind::Breach:
        return "breach";
    case EventKind::SeparationMinimum:
        return "separation_minimum";
    case EventKind::RelaxedFilter:
        return "relaxed_filter";
    case EventKind::TooManyActiveRows:
        return "too_many_active_rows";
    }
    return "?";
}

void TrajectoryLog::write_csv(std::ostream& out) const
{
    out << "t,agent_id,role,x,y,vx,vy,ux,uy,status\n";
    char buf[512];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.10g,%zu,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.t, r.agent_id,
                      to_string(r.role), r.position.x(), r.position.y(), r.velocity.x(), r.velocity.y(),
                      r.control.x(), r.control.y(), to_string(r.status));
        out << buf;
    }
}

void TrajectoryLog::write_events_json(std::ostream& out) const
{
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& e : events) {
        nlohmann::ordered_json j;
        j["t"] = e.t;
        j["kind"] = to_string(e.kind);
        if (e.attacker)
            j["attacker"] = *e.attacker;
        if (e.defender)
            j["defender"] = *e.defender;
        if (e.other_defender)
            j["other_defender"] = *e.other_defender;
        j["value"] = e.value;
        if (e.kind == EventKind::Assignment) {
            nlohmann::ordered_json map = nlohmann::ordered_json::array();
            for (const auto& m : e.map)
                map.push_back(m ? nlohmann::ordered_json(*m) : nlohmann::ordered_json(nullptr));
            j["defender_targets"] = map;
        }
        list.push_back(j);
    }
    out << list.dump(2) << "\n";
}

Vec2 attacker_policy_optimal(const AgentState& attacker, const WorldParams& world, const AgentParams& pa)
{
    const auto plan = solve_attacker(attacker, world, pa);
    return pa.effective_bound() * heading_vector(plan.heading);
}

Vec2 attacker_policy_evasive(const AgentState& attacker, const std::vector<AgentState>& defenders,
                             const std::vector<bool>& active, const WorldParams& world, const AgentParams& pa)
{
    const Vec2 to_center = world.protected_center - attacker.position;
    const Vec2 goal = to_center.norm() > 0.0 ? Vec2(to_center.normalized()) : Vec2::Zero();

    double nearest = std::numeric_limits<double>::infinity();
    Vec2 flee = Vec2::Zero();
    for (std::size_t j = 0; j < defenders.size(); ++j) {
        if (!active.empty() && !active[j])
            continue;
        const Vec2 away = attacker.position - defenders[j].position;
        const double d = away.norm();
        if (d < nearest) {
            nearest = d;
            flee = d > 0.0 ? Vec2(away / d) : Vec2::Zero();
        }
    }
    Vec2 blend = 0.5 * flee + 0.5 * goal;
    if (blend.norm() < 1e-12)
        blend = goal;
    if (blend.norm() < 1e-12)
        return Vec2::Zero();
    return pa.effective_bound() * blend.normalized();
}

double min_distance_over_step(const AgentState& a, const Vec2& ua, const AgentState& b, const Vec2& ub, double drag,
                              double dt)
{
    auto sep = [&](double t) { return (position_at(a, ua, t, drag) - position_at(b, ub, t, drag)).norm(); };
    auto slope = [&](double t) {
        const double decay = std::exp(-drag * t);
        const double e1 = growth_factors(t, drag).e1;
        const Vec2 dv = decay * (a.velocity - b.velocity) + e1 * (ua - ub);
        return (position_at(a, ua, t, drag) - position_at(b, ub, t, drag)).dot(dv);
    };
    double best = std::min(sep(0.0), sep(dt));
    if (slope(0.0) < 0.0 && slope(dt) > 0.0) {
        double lo = 0.0;
        double hi = dt;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (slope(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        best = std::min(best, sep(0.5 * (lo + hi)));
    }
    return best;
}

namespace {

struct PairMinimum {
    double distance = std::numeric_limits<double>::infinity();
    double t = 0.0;
};

}  // namespace

SimulationResult run_simulation(const Scenario& scenario, const SimulationOptions& opts)
{
    scenario.validate();
    const WorldParams& world = scenario.world;
    const AgentParams& pa = scenario.attacker_params();
    const AgentParams& pd = scenario.defender_params();
    const std::size_t na = scenario.attackers.size();
    const std::size_t nd = scenario.defenders.size();
    const double drag = pd.drag;
    const PairGains gains = scenario.pair_gains();

    std::vector<AgentState> attackers = scenario.attacker_states();
    std::vector<AgentState> defenders = scenario.defender_states();
    std::vector<AgentStatus> attacker_status(na, AgentStatus::Active);
    std::vector<std::optional<std::size_t>> target(nd);

    SimulationResult result;
    Outcome& out = result.outcome;
    out.interception_times.assign(na, std::nullopt);
    out.breach_times.assign(na, std::nullopt);
    std::map<std::pair<std::size_t, std::size_t>, PairMinimum> pair_minima;

    AttackerController controller = opts.attacker_controller;
    if (!controller) {
        if (scenario.attacker_policy == AttackerPolicy::Evasive)
            controller = [](std::size_t, const AgentState& a, const std::vector<AgentState>& ds,
                            const std::vector<bool>& act, const WorldParams& w, const AgentParams& p) {
                return attacker_policy_evasive(a, ds, act, w, p);
            };
        else
            controller = [](std::size_t, const AgentState& a, const std::vector<AgentState>&, const std::vector<bool>&,
                            const WorldParams& w, const AgentParams& p) { return attacker_policy_optimal(a, w, p); };
    }

    auto assign = [&](double t) {
        std::vector<std::size_t> live;
        for (std::size_t i = 0; i < na; ++i)
            if (attacker_status[i] == AgentStatus::Active)
                live.push_back(i);
        std::fill(target.begin(), target.end(), std::nullopt);
        if (live.empty())
            return;
        std::vector<AgentState> live_states;
        for (std::size_t i : live)
            live_states.push_back(attackers[i]);
        CostBuildOptions cost_opts;
        cost_opts.weight = scenario.weight;
        const auto built = build_cost_tables(defenders, live_states, world, pd, pa, cost_opts);
        const Assignment a = scenario.assignment_mode == AssignmentMode::Cadaa ? solve_cadaa(built.tables)
                                                                               : solve_cudaa(built.tables);
        Event ev;
        ev.t = t;
        ev.kind = EventKind::Assignment;
        ev.value = a.objective;
        for (std::size_t j = 0; j < nd; ++j) {
            if (a.defender_target[j])
                target[j] = live[*a.defender_target[j]];
            ev.map.push_back(target[j]);
        }
        out.objective_values.push_back(a.objective);
        out.assignments.push_back(a);
        result.log.events.push_back(ev);
    };

    std::vector<Vec2> attacker_controls(na);
    std::vector<Vec2> defender_controls(nd);
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * scenario.dt;
        out.final_time = t;

        bool captured_now = false;
        for (std::size_t i = 0; i < na; ++i) {
            if (attacker_status[i] != AgentStatus::Active)
                continue;
            if ((attackers[i].position - world.protected_center).norm() <= world.protected_radius) {
                attacker_status[i] = AgentStatus::Breached;
                out.breach_times[i] = t;
                ++out.breaches;
                result.log.events.push_back({t, EventKind::Breach, i, std::nullopt, std::nullopt,
                                             (attackers[i].position - world.protected_center).norm(), {}});
                continue;
            }
            std::optional<std::size_t> catcher;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < nd; ++j) {
                const double d = (defenders[j].position - attackers[i].position).norm();
                if (d < world.capture_radius && d < best) {
                    best = d;
                    catcher = j;
                }
            }
            if (catcher) {
                attacker_status[i] = AgentStatus::Captured;
                out.interception_times[i] = t;
                ++out.captures;
                captured_now = true;
                result.log.events.push_back({t, EventKind::Capture, i, catcher, std::nullopt,
                                             (attackers[i].position - world.protected_center).norm(), {}});
            }
        }

        if (step == 0 || (captured_now && scenario.reassign_on_capture))
            assign(t);
        for (auto& tg : target)
            if (tg && attacker_status[*tg] != AgentStatus::Active)
                tg.reset();

        const bool any_active =
            std::any_of(attacker_status.begin(), attacker_status.end(), [](AgentStatus s) { return s == AgentStatus::Active; });
        const bool done = !any_active || t > scenario.t_max;

        std::vector<bool> defender_active(nd);
        for (std::size_t j = 0; j < nd; ++j) {
            defender_active[j] = target[j].has_value();
            defender_controls[j] = Vec2::Zero();
            if (!done && target[j]) {
                const auto sol = solve_defender(defenders[j], attackers[*target[j]], world, pd, pa);
                defender_controls[j] = sol.defender_control(pd);
            }
        }
        for (std::size_t i = 0; i < na; ++i) {
            attacker_controls[i] = Vec2::Zero();
            if (!done && attacker_status[i] == AgentStatus::Active)
                attacker_controls[i] = controller(i, attackers[i], defenders, defender_active, world, pa);
        }

        if (!done && scenario.cbf_enabled && nd >= 2) {
            const auto filtered = filter_controls(defenders, defender_controls, gains, pd, world.collision_radius);
            double correction = 0.0;
            for (std::size_t j = 0; j < nd; ++j) {
                correction = std::max(correction, filtered.corrections[j].norm());
                defender_controls[j] += filtered.corrections[j];
            }
            if (filtered.active_pairs.empty())
                out.max_idle_correction = std::max(out.max_idle_correction, correction);
            else
                ++out.filter_active_steps;
            if (filtered.relaxed) {
                ++out.relaxed_steps;
                result.log.events.push_back({t, EventKind::RelaxedFilter, std::nullopt, std::nullopt, std::nullopt,
                                             filtered.objective, {}});
            }
            if (filtered.too_many_active) {
                ++out.too_many_active_steps;
                result.log.events.push_back({t, EventKind::TooManyActiveRows, std::nullopt, std::nullopt,
                                             std::nullopt, static_cast<double>(filtered.active_pairs.size()), {}});
            }
        }

        for (std::size_t j = 0; j < nd; ++j)
            out.max_defender_control = std::max(out.max_defender_control, defender_controls[j].norm());
        for (std::size_t i = 0; i < na; ++i)
            out.max_attacker_control = std::max(out.max_attacker_control, attacker_controls[i].norm());

        if (opts.record_trajectory) {
            for (std::size_t i = 0; i < na; ++i)
                result.log.records.push_back({t, i, Role::Attacker, attackers[i].position, attackers[i].velocity,
                                              attacker_controls[i], attacker_status[i]});
            for (std::size_t j = 0; j < nd; ++j)
                result.log.records.push_back({t, j, Role::Defender, defenders[j].position, defenders[j].velocity,
                                              defender_controls[j],
                                              defender_active[j] ? AgentStatus::Active : AgentStatus::Idle});
        }

        const double span = done ? 0.0 : scenario.dt;
        for (std::size_t j = 0; j < nd; ++j) {
            for (std::size_t jp = j + 1; jp < nd; ++jp) {
                const double d = min_distance_over_step(defenders[j], defender_controls[j], defenders[jp],
                                                        defender_controls[jp], drag, span);
                auto& pm = pair_minima[{j, jp}];
                if (d < pm.distance)
                    pm = {d, t};
                if (d < world.collision_radius && !out.first_collision_time)
                    out.first_collision_time = t;
                if (d < out.min_defender_separation) {
                    out.min_defender_separation = d;
                    out.min_separation_time = t;
                }
            }
        }

        if (done)
            break;
        for (std::size_t i = 0; i < na; ++i)
            if (attacker_status[i] == AgentStatus::Active)
                attackers[i] = propagate(attackers[i], attacker_controls[i], scenario.dt, drag);
        for (std::size_t j = 0; j < nd; ++j)
            defenders[j] = propagate(defenders[j], defender_controls[j], scenario.dt, drag);
    }

    for (const auto& [pair, pm] : pair_minima)
        result.log.events.push_back(
            {pm.t, EventKind::SeparationMinimum, std::nullopt, pair.first, pair.second, pm.distance, {}});
    for (auto s : attacker_status)
        if (s == AgentStatus::Active)
            ++out.still_active;
    return result;
}

}  // namespace idcais
