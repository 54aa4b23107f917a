#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <cmath>
#include <random>

#include "szilard/physics.hpp"

using namespace szilard;

namespace {

// Reference integrator for dp/dt = r f(x) - (r f(x) + 1 - f(x)) p at frozen
// level: classic RK4 with a fine fixed step, written independently of the
// closed form under test.
double rk4_reference(double p0, double x, double dt, double r, int n_steps = 20000) {
    const double f = 1.0 / (1.0 + std::exp(x));
    const auto deriv = [&](double p) { return r * f - (r * f + 1.0 - f) * p; };
    const double h = dt / n_steps;
    double p = p0;
    for (int i = 0; i < n_steps; ++i) {
        const double k1 = deriv(p);
        const double k2 = deriv(p + 0.5 * h * k1);
        const double k3 = deriv(p + 0.5 * h * k2);
        const double k4 = deriv(p + h * k3);
        p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return p;
}

const PhysicalParams kDevice = PhysicalParams::from_temperature_mk(180.0, 7.0, 3.5);

}  // namespace

TEST_CASE("fermi matches closed-form values and is overflow safe") {
    CHECK(fermi(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fermi(kLn2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(fermi(40.0) < 1e-17);
    CHECK(fermi(40.0) > 0.0);
    CHECK(fermi(-40.0) >= 1.0 - 1e-16);  // rounds to 1.0 exactly in double
    CHECK(fermi(800.0) >= 0.0);   // no overflow for extreme arguments
    CHECK(fermi(-800.0) <= 1.0);
    CHECK_THROWS_AS(fermi(std::nan("")), std::invalid_argument);

    double prev = 1.0;
    for (double x = -20.0; x <= 20.0; x += 0.5) {
        const double f = fermi(x);
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("rates follow the in/out split of the bare rates") {
    auto [in, out] = rates(kLn2, kDevice);
    CHECK(in == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
    CHECK(out == doctest::Approx(7.0 / 3.0).epsilon(1e-12));

    auto [in_hi, out_hi] = rates(800.0, kDevice);
    CHECK(in_hi == doctest::Approx(0.0));
    CHECK(out_hi == doctest::Approx(3.5));

    auto [in_lo, out_lo] = rates(-800.0, kDevice);
    CHECK(in_lo == doctest::Approx(7.0));
    CHECK(out_lo == doctest::Approx(0.0));
}

TEST_CASE("equilibrium occupation is the fixed point of the rate equation") {
    CHECK(equilibrium_occupation(kLn2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(equilibrium_occupation(40.0) < 1e-16);
    CHECK(equilibrium_occupation(-40.0) == doctest::Approx(1.0).epsilon(1e-15));

    for (double x : {-3.0, -0.5, 0.0, kLn2, 2.5, 9.0}) {
        const double p_star = equilibrium_occupation(x);
        for (double dt : {0.01, 0.5, 7.0}) {
            CHECK(propagate_constant(p_star, x, dt) == doctest::Approx(p_star).epsilon(1e-14));
        }
    }
}

TEST_CASE("propagate_constant matches hand-computed relaxation") {
    // p0 = 0 at the rest level for unit reduced time: 0.5 (1 - e^{-4/3}).
    const double expected = 0.5 * (1.0 - std::exp(-4.0 / 3.0));
    CHECK(propagate_constant(0.0, kLn2, 1.0) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(propagate_constant(0.0, kLn2, 1.0) ==
          doctest::Approx(0.3682014309421366).epsilon(1e-13));

    CHECK(propagate_constant(0.5, kLn2, 17.3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(propagate_constant(1.0, kLn2, 60.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(propagate_constant(0.0, kLn2, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(propagate_constant(1.5, kLn2, 0.1), std::invalid_argument);
}

TEST_CASE("propagate_constant satisfies the semigroup property") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> up(0.0, 1.0);
    std::uniform_real_distribution<double> ux(-8.0, 8.0);
    std::uniform_real_distribution<double> ut(0.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double p0 = up(eng);
        const double x = ux(eng);
        const double a = ut(eng);
        const double b = ut(eng);
        const double whole = propagate_constant(p0, x, a + b);
        const double split = propagate_constant(propagate_constant(p0, x, a), x, b);
        CHECK(whole == doctest::Approx(split).epsilon(1e-12));
    }
}

TEST_CASE("propagate_constant agrees with a fine-step reference integration") {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 eng(2026);
    std::uniform_real_distribution<double> up(0.0, 1.0);
    std::uniform_real_distribution<double> ux(-10.0, 10.0);
    std::uniform_real_distribution<double> ut(0.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const double p0 = up(eng);
        const double x = ux(eng);
        const double dt = ut(eng);
        const double closed = propagate_constant(p0, x, dt);
        const double reference = rk4_reference(p0, x, dt, 2.0);
        CHECK(std::abs(closed - reference) < 1e-10);
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(std::chrono::duration_cast<std::chrono::seconds>(elapsed).count() < 10);
}

TEST_CASE("general degeneracy ratio reduces correctly and propagates exactly") {
    // r = 2 closed form against the generic-path evaluation.
    CHECK(equilibrium_occupation(1.3, 2.0) ==
          doctest::Approx(2.0 * fermi(1.3) / (1.0 + fermi(1.3))).epsilon(1e-15));

    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> up(0.0, 1.0);
    std::uniform_real_distribution<double> ux(-6.0, 6.0);
    for (int i = 0; i < 25; ++i) {
        const double r = 0.5 + 3.0 * up(eng);
        const double p0 = up(eng);
        const double x = ux(eng);
        const double closed = propagate_constant(p0, x, 2.5, r);
        CHECK(std::abs(closed - rk4_reference(p0, x, 2.5, r)) < 1e-10);
    }
}

TEST_CASE("physical parameters validate input and derive the reference energy") {
    CHECK(kDevice.degeneracy_ratio() == doctest::Approx(2.0));
    CHECK(kDevice.reference_energy() * kDevice.beta == doctest::Approx(kLn2).epsilon(1e-16));
    CHECK(kDevice.temperature_k() == doctest::Approx(0.180).epsilon(1e-12));
    CHECK_THROWS_AS(PhysicalParams(-1.0, 7.0, 3.5), std::invalid_argument);
    CHECK_THROWS_AS(PhysicalParams(1.0, 0.0, 3.5), std::invalid_argument);
    CHECK_THROWS_AS(PhysicalParams::from_temperature_mk(-5.0, 7.0, 3.5),
                    std::invalid_argument);
}

TEST_CASE("voltage conversion is linear, anchored and invertible") {
    const LeverArm cal{0.041, 0.250};
    CHECK(voltage_to_energy(cal.v_ref, cal, kDevice) == doctest::Approx(kLn2).epsilon(1e-15));

    // 1 uV of gate swing at alpha = 0.041 moves the level by alpha * q_e * 1e-6 J.
    const double x = voltage_to_energy(cal.v_ref + 1e-6, cal, kDevice);
    CHECK(x - kLn2 ==
          doctest::Approx(kDevice.beta * 0.041 * kElementaryCharge * 1e-6).epsilon(1e-12));

    for (double v : {0.0, 0.2496, 0.2504, 1.0}) {
        const double round_trip = energy_to_voltage(voltage_to_energy(v, cal, kDevice), cal, kDevice);
        CHECK(round_trip == doctest::Approx(v).epsilon(1e-12));
    }
}
