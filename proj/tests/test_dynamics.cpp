#include "idcais/dynamics.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace idcais;

TEST_SUITE("dynamics")
{
    TEST_CASE("growth factors at t = 1, drag 0.5")
    {
        const auto g = growth_factors(1.0, 0.5);
        const double e1 = (1.0 - std::exp(-0.5)) / 0.5;
        CHECK(g.e1 == doctest::Approx(e1).epsilon(1e-15));
        CHECK(g.e2 == doctest::Approx((1.0 - e1) / 0.5).epsilon(1e-14));
        CHECK(g.e1 == doctest::Approx(0.786938680574733));
        CHECK(g.e2 == doctest::Approx(0.426122638850534));
    }

    TEST_CASE("small-time series matches the long form where both are accurate")
    {
        for (double t : {0.099, 0.0999, 0.1001, 0.2}) {
            const auto g = growth_factors(t, 0.5);
            const double ref = (t - (1 - std::exp(-0.5 * t)) / 0.5) / 0.5;
            CHECK(g.e2 == doctest::Approx(ref).epsilon(1e-11));
        }
        const auto tiny = growth_factors(1e-9, 0.5);
        CHECK(tiny.e2 == doctest::Approx(0.5e-18).epsilon(1e-9));
    }

    TEST_CASE("growth factors reject negative time and non-positive drag")
    {
        CHECK_THROWS_AS(growth_factors(-1.0, 0.5), ValidationError);
        CHECK_THROWS_AS(growth_factors(1.0, 0.0), ValidationError);
    }

    TEST_CASE("exact step agrees with fine RK4 integration")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(-3.0, 3.0);
        for (int k = 0; k < 50; ++k) {
            const AgentState s{{u(rng) * 5, u(rng) * 5}, {u(rng), u(rng)}};
            const Vec2 ctl{u(rng), u(rng)};
            const double dt = 0.05 + std::abs(u(rng));
            const auto exact = propagate(s, ctl, dt, 0.5);
            const auto ref = oracle::rk4({s.position, s.velocity}, ctl, 0.5, dt, 20000);
            CHECK((exact.position - ref.r).norm() <= 1e-10 * (1 + ref.r.norm()));
            CHECK((exact.velocity - ref.v).norm() <= 1e-10 * (1 + ref.v.norm()));
        }
    }

    TEST_CASE("semigroup: two half steps equal one step")
    {
        std::mt19937_64 rng(12);
        std::uniform_real_distribution<double> u(-4.0, 4.0);
        for (int k = 0; k < 200; ++k) {
            const AgentState s{{u(rng), u(rng)}, {u(rng), u(rng)}};
            const Vec2 ctl{u(rng), u(rng)};
            const double dt = std::abs(u(rng));
            const auto one = propagate(s, ctl, dt, 0.5);
            const auto two = propagate(propagate(s, ctl, dt / 2, 0.5), ctl, dt / 2, 0.5);
            CHECK((one.position - two.position).norm() <= 1e-10);
            CHECK((one.velocity - two.velocity).norm() <= 1e-10);
        }
    }

    TEST_CASE("speed stays below the cap and approaches it under full control")
    {
        const auto p = AgentParams::attacker(3.0, 0.5);
        AgentState s{{0, 0}, {1, 0}};
        const Vec2 ctl{0, 3.0};
        double prev = 0.0;
        for (int k = 0; k < 4000; ++k) {
            s = propagate(s, ctl, 0.01, 0.5);
            CHECK(s.velocity.norm() <= p.speed_cap() + 1e-12);
            prev = s.velocity.norm();
        }
        CHECK(prev == doctest::Approx(6.0).epsilon(1e-6));
    }

    TEST_CASE("position_at matches the position of propagate")
    {
        const AgentState s{{1, 2}, {-0.5, 0.25}};
        const Vec2 ctl{2, -1};
        CHECK((position_at(s, ctl, 1.7, 0.5) - propagate(s, ctl, 1.7, 0.5).position).norm() == 0.0);
    }

    TEST_CASE("parameter validation")
    {
        CHECK_NOTHROW(AgentParams::defender().validate());
        auto d = AgentParams::defender();
        d.margin = 0.0;
        CHECK_THROWS_AS(d.validate(), ValidationError);
        auto a = AgentParams::attacker();
        a.drag = -1;
        CHECK_THROWS_AS(a.validate(), ValidationError);
        CHECK_THROWS_AS(propagate({{NAN, 0}, {0, 0}}, {0, 0}, 0.1, 0.5), ValidationError);
    }
}
