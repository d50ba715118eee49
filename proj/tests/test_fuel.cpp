#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gtfdi/fuel.hpp"

using namespace gtfdi;

TEST_CASE("fuel servo: zero command stays at zero") {
    FuelSupplyState fss;
    for (int i = 0; i < 200; ++i) {
        auto [next, y] = fuel_supply_step(0.0, fss, 0.01);
        fss = next;
        CHECK(y == 0.0);
    }
}

TEST_CASE("fuel servo: dead time then first-order rise toward the gain") {
    FuelSupplyState fss;  // tau = 0.8, theta = 0.2, gain = 40
    const double dt = 0.01;
    double y = 0.0;
    std::vector<double> samples;
    for (int i = 0; i < 101; ++i) {  // through t = 1.01 s
        auto [next, out] = fuel_supply_step(1.0, fss, dt);
        fss = next;
        y = out;
        samples.push_back(out);
    }
    // no output before the dead time elapses
    for (int i = 0; i + 1 < 19; ++i) CHECK(samples[i] == 0.0);
    // y(theta + tau) ~ 0.632 * K, within the O(dt) endpoint convention
    const double expected = 40.0 * (1.0 - std::exp(-1.0));
    CHECK(samples[99] == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("fuel servo: saturation pins the output at the upper bound") {
    FuelSupplyState fss;
    fss.gain = 60.0;  // asks for more than y_max = 40
    for (int i = 0; i < 600; ++i) fss = fuel_supply_step(1.0, fss, 0.01).first;
    CHECK(fss.y == doctest::Approx(40.0));
    // commands above 1 are clamped and the lag settles toward full flow
    FuelSupplyState fss2;
    for (int i = 0; i < 600; ++i) fss2 = fuel_supply_step(7.0, fss2, 0.01).first;
    CHECK(fss2.y == doctest::Approx(40.0).epsilon(1e-3));
    CHECK(fss2.y <= 40.0);
}

TEST_CASE("fuel servo: parameter validation") {
    FuelSupplyState fss;
    fss.tau = 0.0;
    CHECK_THROWS_AS(fuel_supply_step(0.5, fss, 0.01), std::invalid_argument);
    fss = FuelSupplyState{};
    fss.theta = -0.1;
    CHECK_THROWS_AS(fuel_supply_step(0.5, fss, 0.01), std::invalid_argument);
    fss = FuelSupplyState{};
    CHECK_THROWS_AS(fuel_supply_step(0.5, fss, 0.0), std::invalid_argument);
}

TEST_CASE("fuel response: exact step response at sample instants") {
    FuelSupplyState servo;  // y = 0 initially
    // profiles extrapolate their endpoints, so a step at t=0 carries an
    // explicit zero-command breakpoint before it
    const CommandProfile step({{-1.0, 0.0}, {0.0, 1.0}}, CommandProfile::Interp::Hold);
    const FuelResponse resp(step, servo, 20.0);
    CHECK(resp.at(0.1) == doctest::Approx(0.0));
    CHECK(resp.at(servo.theta) == doctest::Approx(0.0));
    const double t = servo.theta + servo.tau;
    CHECK(resp.at(t) == doctest::Approx(40.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
    CHECK(resp.at(15.0) == doctest::Approx(40.0).epsilon(1e-6));
}

TEST_CASE("fuel response: ramp input follows the lagged ramp closed form") {
    FuelSupplyState servo;
    servo.y = 0.0;
    const CommandProfile ramp({{0.0, 0.0}, {10.0, 1.0}}, CommandProfile::Interp::Linear);
    const FuelResponse resp(ramp, servo, 30.0);
    const double r = 40.0 / 10.0;  // L/hr per s after the gain
    const double tau = servo.tau, theta = servo.theta;
    for (double t : {1.0, 3.0, 7.0, 9.5}) {
        const double x = t - theta;  // time since the delayed ramp started
        const double expected = r * x - r * tau + r * tau * std::exp(-x / tau);
        CHECK(resp.at(t) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("fuel response: matches the streaming servo on a stepped profile") {
    FuelSupplyState servo;
    servo.y = servo.gain * 0.5;
    const CommandProfile profile({{0.0, 0.5}, {2.0, 0.8}, {5.0, 0.3}},
                                 CommandProfile::Interp::Hold);
    const FuelResponse resp(profile, servo, 10.0);
    FuelSupplyState fss = servo;
    fss.history.emplace_back(-1e9, 0.5);  // primed: steady before t = 0
    const double dt = 0.01;
    for (int i = 0; i < 1000; ++i) {
        const double t = i * dt;
        auto [next, y] = fuel_supply_step(profile.value_at(t), fss, dt);
        fss = next;
        CHECK(y == doctest::Approx(resp.at(t + dt)).epsilon(0.02));
    }
}

TEST_CASE("command profile: hold and linear interpolation") {
    const CommandProfile hold({{0.0, 0.4}, {10.0, 0.8}}, CommandProfile::Interp::Hold);
    CHECK(hold.value_at(-1.0) == 0.4);
    CHECK(hold.value_at(9.999) == 0.4);
    CHECK(hold.value_at(10.0) == 0.8);
    CHECK(hold.value_at(99.0) == 0.8);

    const CommandProfile lin({{0.0, 0.4}, {10.0, 0.8}}, CommandProfile::Interp::Linear);
    CHECK(lin.value_at(5.0) == doctest::Approx(0.6));
    CHECK(lin.value_at(10.0) == doctest::Approx(0.8));

    CHECK_THROWS_AS(CommandProfile({}, CommandProfile::Interp::Hold), std::invalid_argument);
    CHECK_THROWS_AS(CommandProfile({{5.0, 0.1}, {1.0, 0.2}}, CommandProfile::Interp::Hold),
                    std::invalid_argument);
}
