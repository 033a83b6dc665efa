#include <cmath>
#include <random>

#include "clayems/control/pi.hpp"
#include "clayems/control/supervisor.hpp"
#include "clayems/error.hpp"
#include "doctest.h"

using namespace clayems;
using namespace clayems::control;

namespace {

PIController pi(double kp, double ki, double lo = -1e9, double hi = 1e9) {
    PIController c;
    c.kp = kp;
    c.ki = ki;
    c.output_min = lo;
    c.output_max = hi;
    return c;
}

SupervisorConfig default_config() {
    SupervisorConfig cfg;
    cfg.temperature = pi(-2.0e-4, -5.0e-5);
    cfg.flow = pi(300.0, 40.0);
    return cfg;
}

dae::PlantDescription plant() {
    dae::PlantDescription p;
    p.clay_feed = {0.0, 3.0};
    p.fan.dp_min = 0.0;
    p.fan.dp_max = 2.0e4;
    p.fresh_air = {0.0, 2.0};
    p.ehgg.p_min = 1.6e6;
    p.ehgg.p_max = 2.0e6;
    return p;
}

SetpointCommand command(double p) { return SetpointCommand{p, 0.0, 3600.0}; }

}  // namespace

TEST_SUITE("pi law") {
    TEST_CASE("zero error and zero integral give the bias") {
        auto c = pi(3.0, 2.0);
        CHECK(pi_step(5.0, 5.0, c, 1.0).output == 0.0);
        c.bias = 0.7;
        CHECK(pi_step(5.0, 5.0, c, 1.0).output == 0.7);
    }

    TEST_CASE("proportional only") {
        const auto r = pi_step(1.5, 0.0, pi(2.0, 0.0), 0.1);
        CHECK(r.output == 3.0);
        CHECK(r.controller.integral == 0.0);
    }

    TEST_CASE("rectangle-rule integral") {
        auto c = pi(0.0, 1.0);
        auto r = pi_step(1.0, 0.0, c, 0.5);
        r = pi_step(1.0, 0.0, r.controller, 0.5);
        CHECK(r.controller.integral == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(r.output == doctest::Approx(1.0).epsilon(1e-15));
    }

    TEST_CASE("output always inside the limits") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> e(-50.0, 50.0);
        auto c = pi(0.8, 0.4, -2.0, 5.0);
        for (int i = 0; i < 2000; ++i) {
            const auto r = pi_step(e(rng), 0.0, c, 0.1);
            CHECK(r.output >= -2.0);
            CHECK(r.output <= 5.0);
            c = r.controller;
        }
    }

    TEST_CASE("anti-windup stops the integral growing while saturated") {
        auto c = pi(1.0, 1.0, 0.0, 1.0);
        double prev = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto r = pi_step(10.0, 0.0, c, 0.5);
            CHECK(r.output == 1.0);
            CHECK(std::abs(r.controller.integral) <= std::abs(prev) + 0.5 * 10.0);
            if (i > 0) {
                CHECK(std::abs(r.controller.integral) <= std::abs(prev));
            }
            prev = r.controller.integral;
            c = r.controller;
        }
        // Without clamping the integral runs away.
        c = pi(1.0, 1.0, 0.0, 1.0);
        c.anti_windup = false;
        for (int i = 0; i < 100; ++i) {
            c = pi_step(10.0, 0.0, c, 0.5).controller;
        }
        CHECK(c.integral == doctest::Approx(500.0));
    }

    TEST_CASE("recovery after saturation is immediate with clamping") {
        auto c = pi(0.0, 1.0, 0.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            c = pi_step(5.0, 0.0, c, 1.0).controller;
        }
        const auto r = pi_step(-1.0, 0.0, c, 0.5);
        CHECK(r.output < 1.0);
    }

    TEST_CASE("bumpless integral") {
        const auto c = pi(2.0, 0.1, -10.0, 10.0);
        auto d = c;
        d.integral = bumpless_integral(c, 4.0, 1.5);
        // One step at zero dt reproduces the requested output.
        CHECK(d.kp * 1.5 + d.integral == doctest::Approx(4.0));
    }

    TEST_CASE("invalid limits") {
        CHECK_THROWS_AS(pi(1.0, 1.0, 2.0, 1.0).validate(), DomainError);
    }
}

TEST_SUITE("supervisor") {
    TEST_CASE("default band and set-point") {
        const SupervisorConfig cfg;
        CHECK(cfg.band_low_celsius == 750.0);
        CHECK(cfg.band_high_celsius == 850.0);
        CHECK(cfg.temperature_setpoint() == doctest::Approx(800.0 + kCelsiusOffset));
        CHECK(cfg.safety_low_celsius == 600.0);
        CHECK(cfg.safety_high_celsius == 1000.0);
    }

    TEST_CASE("power follows the command and feed holds at zero error") {
        const auto cfg = default_config();
        const auto p = plant();
        const dae::PlantInputs current{1.2, 3000.0, 0.3};
        const Measurements meas{cfg.temperature_setpoint(), cfg.loop_flow_setpoint};
        auto st = make_supervisor_state(cfg, p, current, meas);
        for (int i = 0; i < 10; ++i) {
            const auto out = plant_supervisor(command(1.8e6), meas, st, cfg, p, 10.0 * i, 10.0);
            CHECK(out.p_el == 1.8e6);
            CHECK(out.u.clay_feed == doctest::Approx(1.2).epsilon(1e-14));
            CHECK(out.u.fan_dp == doctest::Approx(3000.0).epsilon(1e-14));
            CHECK(out.u.fresh_air == cfg.fresh_air);
            CHECK_FALSE(out.tripped);
        }
    }

    TEST_CASE("hotter gas raises the clay feed") {
        const auto cfg = default_config();
        const auto p = plant();
        auto st = make_supervisor_state(cfg, p, {1.0, 3000.0, 0.3},
                                        {cfg.temperature_setpoint(), cfg.loop_flow_setpoint});
        const Measurements hot{cfg.temperature_setpoint() + 20.0, cfg.loop_flow_setpoint};
        double prev = 1.0;
        for (int i = 0; i < 5; ++i) {
            const auto out = plant_supervisor(command(2.0e6), hot, st, cfg, p, 10.0 * i, 10.0);
            CHECK(out.u.clay_feed > prev - 1e-15);
            prev = out.u.clay_feed;
        }
        CHECK(prev > 1.0);
    }

    TEST_CASE("inputs never leave the actuator ranges") {
        const auto cfg = default_config();
        const auto p = plant();
        auto st = make_supervisor_state(cfg, p, {1.0, 3000.0, 0.3}, {1073.15, 2.65});
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> T(800.0, 1300.0), F(0.0, 6.0);
        for (int i = 0; i < 3000; ++i) {
            const auto out = plant_supervisor(command(1.7e6), {T(rng), F(rng)}, st, cfg, p, i, 1.0);
            CHECK(out.u.clay_feed >= p.clay_feed.min);
            CHECK(out.u.clay_feed <= p.clay_feed.max);
            CHECK(out.u.fan_dp >= p.fan.dp_min);
            CHECK(out.u.fan_dp <= p.fan.dp_max);
            CHECK(out.u.fresh_air >= p.fresh_air.min);
            CHECK(out.u.fresh_air <= p.fresh_air.max);
        }
    }

    TEST_CASE("over-temperature trips to minimum feed and records one event") {
        const auto cfg = default_config();
        const auto p = plant();
        auto st = make_supervisor_state(cfg, p, {1.0, 3000.0, 0.3}, {1073.15, 2.65});
        const Measurements hot{1001.0 + kCelsiusOffset, 2.65};
        for (int i = 0; i < 3; ++i) {
            const auto out = plant_supervisor(command(2.0e6), hot, st, cfg, p, 10.0 * i, 10.0);
            CHECK(out.tripped);
            CHECK(out.u.clay_feed == p.clay_feed.min);
        }
        CHECK(st.events.size() == 1);
        CHECK(st.events.front().t == 0.0);
        const auto back = plant_supervisor(command(2.0e6), {cfg.temperature_setpoint(), 2.65}, st, cfg, p, 40.0, 10.0);
        CHECK_FALSE(back.tripped);
        CHECK(back.u.clay_feed == doctest::Approx(p.clay_feed.min).epsilon(1e-12).scale(1e-12));
        const Measurements cold{590.0 + kCelsiusOffset, 2.65};
        CHECK(plant_supervisor(command(2.0e6), cold, st, cfg, p, 50.0, 10.0).tripped);
        CHECK(st.events.size() == 2);
    }

    TEST_CASE("non-finite measurements are rejected") {
        const auto cfg = default_config();
        const auto p = plant();
        auto st = make_supervisor_state(cfg, p, {1.0, 3000.0, 0.3}, {1073.15, 2.65});
        CHECK_THROWS_AS(plant_supervisor(command(2.0e6), {NAN, 2.65}, st, cfg, p, 0.0, 1.0), DomainError);
    }

    TEST_CASE("command validation") {
        CHECK_NOTHROW(command(1.8e6).validate(1.6e6, 2.0e6));
        CHECK_THROWS_AS(command(2.1e6).validate(1.6e6, 2.0e6), ValidationError);
        CHECK_THROWS_AS((SetpointCommand{1.8e6, 10.0, 10.0}.validate(1.6e6, 2.0e6)), ValidationError);
        auto cfg = default_config();
        cfg.band_low_celsius = 900.0;
        CHECK_THROWS_AS(cfg.validate(), ValidationError);
    }
}
