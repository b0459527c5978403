#include "idcais/qcqp.hpp"
#include "idcais/safety_filter.hpp"

#include "oracles.hpp"
#include "sampling.hpp"

#include <doctest.h>

using namespace idcais;

namespace {

const AgentParams pd = AgentParams::defender();

oracle::FilterReference reference(const sampling::FilterInstance& inst)
{
    return oracle::filter_reference({oracle::State{inst.defenders[0].position, inst.defenders[0].velocity},
                                     oracle::State{inst.defenders[1].position, inst.defenders[1].velocity}},
                                    {inst.nominal[0], inst.nominal[1]}, inst.gain, 2.0, pd.drag, pd.accel_bound);
}

}  // namespace

TEST_SUITE("safety_filter")
{
    TEST_CASE("gain selection for the default defender")
    {
        const auto g = min_gain(pd, 2.0);
        const double rb = 3.4 * (1 - std::log(2.0)) / 0.25;
        const double r0 = 2 * rb + 2.0;
        CHECK(g.braking_distance == doctest::Approx(rb).epsilon(1e-12));
        CHECK(g.rho0 == doctest::Approx(r0).epsilon(1e-12));
        CHECK(g.k_min == doctest::Approx(4 * 6.8 * r0 / (r0 * r0 - 4.0)).epsilon(1e-12));
        CHECK(g.braking_distance == doctest::Approx(4.173).epsilon(1e-3));
        CHECK(g.rho0 == doctest::Approx(10.346).epsilon(1e-3));
        CHECK(g.k_min == doctest::Approx(2.73).epsilon(1e-3));
    }

    TEST_CASE("braking distance is the distance covered while stopping from the speed cap")
    {
        // Full reverse thrust from v = u/c: speed hits zero at t = ln 2 / c.
        const double t_stop = std::log(2.0) / 0.5;
        const auto end = oracle::rk4({{0, 0}, {6.8, 0}}, {-3.4, 0}, 0.5, t_stop, 20000);
        CHECK(std::abs(end.v.x()) <= 1e-9);
        CHECK(end.r.x() == doctest::Approx(min_gain(pd, 2.0).braking_distance).epsilon(1e-9));
    }

    TEST_CASE("minimum gain keeps psi non-positive at the initial radius for any admissible velocities")
    {
        const auto g = min_gain(pd, 2.0);
        std::mt19937_64 rng(51);
        double worst = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < 20000; ++k) {
            const Vec2 axis = heading_vector(sampling::uniform(rng, 0, 6.3));
            const AgentState a{g.rho0 * axis, sampling::in_disc(rng, pd.speed_cap())};
            const AgentState b{{0, 0}, sampling::in_disc(rng, pd.speed_cap())};
            worst = std::max(worst, barrier_state(a, b, g.k_min, 2.0).psi);
        }
        // Head-on at the speed cap is the worst case.
        const AgentState a{{g.rho0, 0}, {-6.8, 0}};
        const AgentState b{{0, 0}, {6.8, 0}};
        CHECK(barrier_state(a, b, g.k_min, 2.0).psi == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        CHECK(worst <= 1e-12);
    }

    TEST_CASE("h_dot matches a finite difference of h")
    {
        std::mt19937_64 rng(52);
        for (int k = 0; k < 50; ++k) {
            const AgentState a{sampling::in_disc(rng, 10), sampling::in_disc(rng, 6)};
            const AgentState b{sampling::in_disc(rng, 10), sampling::in_disc(rng, 6)};
            const double dt = 1e-6;
            const auto h0 = barrier_state(a, b, 1.0, 2.0);
            const auto h1 = barrier_state(propagate(a, {0, 0}, dt, 0.5), propagate(b, {0, 0}, dt, 0.5), 1.0, 2.0);
            CHECK(h0.h_dot == doctest::Approx((h1.h - h0.h) / dt).epsilon(1e-4).scale(1.0));
        }
    }

    TEST_CASE("no correction when the defenders are far apart")
    {
        const std::vector<AgentState> ds{{{-20, 0}, {1, 0}}, {{20, 0}, {-1, 0}}, {{0, 30}, {0, 0}}};
        const std::vector<Vec2> u{{3.3, 0}, {-3.3, 0}, {0, -3.3}};
        PairGains gains;
        gains.shared = min_gain(pd, 2.0).k_min;
        const auto r = filter_controls(ds, u, gains, pd, 2.0);
        CHECK(r.active_pairs.empty());
        for (const auto& du : r.corrections)
            CHECK(du.norm() == 0.0);
    }

    TEST_CASE("corrections match the projection oracle and satisfy the barrier condition")
    {
        std::mt19937_64 rng(53);
        const double k = min_gain(pd, 2.0).k_min;
        PairGains gains;
        gains.shared = k;
        for (int n = 0; n < 60; ++n) {
            const auto inst = sampling::random_filter_instance(rng, pd, 2.0, k);
            const auto r = filter_controls(inst.defenders, inst.nominal, gains, pd, 2.0);
            REQUIRE_FALSE(r.relaxed);
            const auto ref = reference(inst);
            CHECK(r.objective == doctest::Approx(ref.dykstra_objective).epsilon(1e-6).scale(1.0));
            CHECK(r.objective <= ref.grid_objective + 1e-6);
            CHECK(r.kkt_residual <= 1e-8);
            for (int j = 0; j < 2; ++j)
                CHECK((inst.nominal[j] + r.corrections[j]).norm() <= pd.accel_bound);

            // Second-order barrier condition by a central difference of h along
            // the corrected controls.
            auto h_at = [&](double t) {
                const Vec2 p0 = oracle::position({inst.defenders[0].position, inst.defenders[0].velocity},
                                                 inst.nominal[0] + r.corrections[0], 0.5, t);
                const Vec2 p1 = oracle::position({inst.defenders[1].position, inst.defenders[1].velocity},
                                                 inst.nominal[1] + r.corrections[1], 0.5, t);
                return 4.0 - (p0 - p1).squaredNorm();
            };
            const double e = 1e-4;
            const double hd = (h_at(e) - h_at(-e)) / (2 * e);
            const double hdd = (h_at(e) - 2 * h_at(0) + h_at(-e)) / (e * e);
            CHECK(hdd + 2 * k * hd + k * k * h_at(0) <= 1e-4);
        }
    }

    TEST_CASE("jointly infeasible rows fall back to the relaxed problem")
    {
        // Three defenders packed inside the collision radius, all closing.
        const std::vector<AgentState> ds{{{0, 0}, {1, 0}}, {{1.5, 0}, {-1, 0}}, {{0.75, 1.2}, {0, -1}}};
        const std::vector<Vec2> u{{3.3, 0}, {-3.3, 0}, {0, -3.3}};
        PairGains gains;
        gains.shared = 5.0;
        const auto r = filter_controls(ds, u, gains, pd, 2.0);
        CHECK(r.active_pairs.size() == 3);
        for (int j = 0; j < 3; ++j)
            CHECK((u[j] + r.corrections[j]).norm() <= pd.accel_bound);
        CHECK(r.kkt_residual <= 1e-8);
    }

    TEST_CASE("nominal controls without margin are rejected")
    {
        PairGains gains;
        gains.shared = 3.0;
        CHECK_THROWS_AS(filter_controls({{{0, 0}, {0, 0}}, {{5, 0}, {0, 0}}}, {{3.4, 0}, {0, 0}}, gains, pd, 2.0),
                        ValidationError);
    }

    TEST_CASE("interior point solves a small disc-constrained problem")
    {
        // min ||x||^2 + (-4, 0).x subject to ||x|| <= 1: optimum (1, 0) with multiplier 1.
        qcqp::Problem p;
        p.quad = qcqp::Vector::Ones(2);
        p.linear = qcqp::Vector(2);
        p.linear << -4, 0;
        p.discs.push_back({0, {0, 0}, 1.0});
        const auto sol = qcqp::solve_barrier(p, qcqp::Vector::Zero(2));
        CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(sol.x[1]) <= 1e-9);
        CHECK(sol.multipliers[0] == doctest::Approx(1.0).epsilon(1e-7));
        CHECK(sol.kkt_residual <= 1e-8);
    }
}
