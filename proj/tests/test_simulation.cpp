#include "idcais/experiments.hpp"
#include "idcais/simulation.hpp"

#include "oracles.hpp"
#include "sampling.hpp"

#include <doctest.h>

#include <sstream>

using namespace idcais;

namespace {

Scenario one_vs_one()
{
    Scenario s;
    s.attackers.push_back({{{18, 6}, {0, 0}}, AgentParams::attacker()});
    s.defenders.push_back({{{4, 2}, {0, 0}}, AgentParams::defender()});
    return s;
}

}  // namespace

TEST_SUITE("simulation")
{
    TEST_CASE("a defender in position captures an optimal attacker")
    {
        const auto r = run_simulation(one_vs_one());
        CHECK(r.outcome.captures == 1);
        CHECK(r.outcome.breaches == 0);
        REQUIRE(r.outcome.interception_times[0].has_value());
        const auto sol = solve_defender({{4, 2}, {0, 0}}, {{18, 6}, {0, 0}}, {}, AgentParams::defender(),
                                        AgentParams::attacker());
        // Capture fires within the capture radius, before the planned meeting time.
        CHECK(*r.outcome.interception_times[0] <= sol.defender_time + 0.01);
        CHECK(*r.outcome.interception_times[0] >= sol.defender_time - 1.0);
    }

    TEST_CASE("runs are bit-identical")
    {
        std::mt19937_64 rng(61);
        for (int k = 0; k < 3; ++k) {
            RandomScenarioSpec spec;
            spec.num_attackers = spec.num_defenders = 3;
            const auto s = random_scenario(spec, rng);
            const auto a = run_simulation(s);
            const auto b = run_simulation(s);
            CHECK(a.log == b.log);
        }
    }

    TEST_CASE("an unopposed attacker breaches")
    {
        Scenario s = one_vs_one();
        s.defenders[0].state = {{-30, -30}, {0, 0}};
        const auto r = run_simulation(s);
        CHECK(r.outcome.breaches == 1);
        REQUIRE(r.outcome.breach_times[0].has_value());
        const auto plan = solve_attacker({{18, 6}, {0, 0}}, {}, AgentParams::attacker());
        // The disc of radius 2 is entered before the center is reached.
        CHECK(*r.outcome.breach_times[0] < plan.time);
    }

    TEST_CASE("events are time-ordered and start with the assignment")
    {
        const auto r = run_simulation(one_vs_one());
        REQUIRE_FALSE(r.log.events.empty());
        CHECK(r.log.events.front().kind == EventKind::Assignment);
        CHECK(r.log.events.front().t == 0.0);
        bool saw_capture = false;
        for (const auto& e : r.log.events)
            saw_capture |= e.kind == EventKind::Capture;
        CHECK(saw_capture);
        double prev = 0.0;
        for (const auto& rec : r.log.records) {
            CHECK(rec.t >= prev);
            prev = rec.t;
        }
    }

    TEST_CASE("controls respect their bounds")
    {
        std::mt19937_64 rng(62);
        RandomScenarioSpec spec;
        spec.num_attackers = spec.num_defenders = 3;
        const auto r = run_simulation(random_scenario(spec, rng));
        CHECK(r.outcome.max_attacker_control <= 3.0 + 1e-12);
        CHECK(r.outcome.max_defender_control <= 3.4);
        for (const auto& rec : r.log.records)
            CHECK(rec.velocity.norm() < (rec.role == Role::Attacker ? 6.0 : 6.8));
    }

    TEST_CASE("trajectory CSV has the documented header and one row per agent-step")
    {
        const auto r = run_simulation(one_vs_one());
        std::ostringstream out;
        r.log.write_csv(out);
        const std::string text = out.str();
        CHECK(text.rfind("t,agent_id,role,x,y,vx,vy,ux,uy,status\n", 0) == 0);
        const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
        CHECK(lines == r.log.records.size() + 1);
        std::ostringstream ev;
        r.log.write_events_json(ev);
        CHECK(ev.str().find("\"capture\"") != std::string::npos);
    }

    TEST_CASE("minimum distance over a step matches dense sampling")
    {
        std::mt19937_64 rng(63);
        for (int k = 0; k < 200; ++k) {
            const AgentState a{sampling::in_disc(rng, 3), sampling::in_disc(rng, 6)};
            const AgentState b{sampling::in_disc(rng, 3), sampling::in_disc(rng, 6)};
            const Vec2 ua = sampling::in_disc(rng, 3.4);
            const Vec2 ub = sampling::in_disc(rng, 3.4);
            const double dt = sampling::uniform(rng, 0.01, 1.0);
            double ref = std::numeric_limits<double>::infinity();
            for (int s = 0; s <= 20000; ++s) {
                const double t = dt * s / 20000.0;
                ref = std::min(ref, (oracle::position({a.position, a.velocity}, ua, 0.5, t) -
                                     oracle::position({b.position, b.velocity}, ub, 0.5, t))
                                        .norm());
            }
            const double got = min_distance_over_step(a, ua, b, ub, 0.5, dt);
            CHECK(got <= ref + 1e-12);
            CHECK(got >= ref - 1e-6);
        }
    }

    TEST_CASE("the evasive policy uses the full bound")
    {
        const Vec2 u = attacker_policy_evasive({{10, 0}, {0, 0}}, {{{5, 0}, {0, 0}}}, {true}, {}, AgentParams::attacker());
        CHECK(u.norm() == doctest::Approx(3.0));
        // Defender sits on the bearing to the center: flee and goal cancel, fall back to the goal.
        CHECK(u.x() < 0.0);
        const Vec2 side = attacker_policy_evasive({{10, 0}, {0, 0}}, {{{10, -3}, {0, 0}}}, {true}, {},
                                                  AgentParams::attacker());
        CHECK(side.x() < 0.0);
        CHECK(side.y() > 0.0);
    }

    TEST_CASE("the safety filter keeps two closing defenders apart")
    {
        Scenario s;
        s.attackers.push_back({{{-14, 16}, {0, 0}}, AgentParams::attacker()});
        s.attackers.push_back({{{14, 16}, {0, 0}}, AgentParams::attacker()});
        s.defenders.push_back({{{4.5, 8.5}, {-4, 0}}, AgentParams::defender()});
        s.defenders.push_back({{{-4.5, 8.5}, {4, 0}}, AgentParams::defender()});
        s.assignment_mode = AssignmentMode::Cudaa;
        s.cbf_enabled = false;
        const auto off = run_simulation(s);
        s.cbf_enabled = true;
        const auto on = run_simulation(s);
        CHECK(off.outcome.min_defender_separation < 2.0);
        CHECK(on.outcome.min_defender_separation >= 2.0 - 1e-3);
        CHECK(on.outcome.max_idle_correction == 0.0);
        CHECK(on.outcome.filter_active_steps > 0);
    }
}
