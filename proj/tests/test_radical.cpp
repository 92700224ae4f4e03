#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "modstab/error.hpp"
#include "modstab/radical.hpp"
#include "support/oracles.hpp"

using namespace modstab;

TEST_SUITE("radical") {

TEST_CASE("equation parameter validation") {
    CHECK_NOTHROW(EquationParams(3, 1.0));
    CHECK_NOTHROW(EquationParams(7, -1.0));
    CHECK_NOTHROW(EquationParams(5, 0.5));
    CHECK_THROWS_AS(EquationParams(4, 1.0), ParameterError);
    CHECK_THROWS_AS(EquationParams(1, 1.0), ParameterError);
    CHECK_THROWS_AS(EquationParams(3, 0.0), ParameterError);
    CHECK_THROWS_AS(EquationParams(3, 1.5), ParameterError);
}

TEST_CASE("radical_root") {
    CHECK(radical_root(8, 3) == 2.0);
    CHECK(radical_root(-27, 3) == -3.0);
    CHECK(radical_root(32, 5) == 2.0);
    CHECK(radical_root(-2187, 7) == -3.0);
    CHECK(radical_root(0, 5) == 0.0);
    CHECK_THROWS_AS(radical_root(8, 2), ParameterError);
    CHECK_THROWS_AS(radical_root(8, 1), ParameterError);
}

TEST_CASE("property: radical_root inverts odd powers") {
    oracle::Uniform rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const int s = 2 * rng.pick(1, 4) + 1;
        const double r = rng(-20, 20);
        CHECK(oracle::rel_close(radical_root(std::pow(r, s), s), r, 4e-16 * s));
    }
}

TEST_CASE("radical_combine") {
    const EquationParams p31(3, 1.0);
    CHECK(radical_combine(p31, 1, 1, -std::cbrt(2.0)) == 0.0);
    CHECK(radical_combine(p31, 1, 2, 3) == doctest::Approx(std::cbrt(36.0)).epsilon(1e-15));
    CHECK(radical_combine(p31, 1, 2, 3) == doctest::Approx(3.30192724889463).epsilon(1e-12));
    const EquationParams half(3, 0.5);
    CHECK(radical_combine(half, 1, 1, 1) == doctest::Approx(std::cbrt(6.0)).epsilon(1e-15));
    CHECK(radical_combine(half, 1, 1, 1) == doctest::Approx(1.81712059283214).epsilon(1e-12));

    try {
        radical_combine(p31, 1, 1e200, 1);
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(e.coordinate() == "y");
    }
}

TEST_CASE("defect examples") {
    const EquationParams p(3, 1.0);
    const auto rho1 = ModularSpec::power(1);
    const auto cube5 = FunctionHandle::parse("mono(5,3)");
    CHECK(defect(p, cube5, rho1, 1.5, -2.0, 0.25) <= 1e-12);

    // Direct evaluation oracle: 0.1 |sin 1 + sin 1 + sin(-c) - sin 0| with c = 2^(1/3)
    const auto pert = FunctionHandle::parse("mono(1,3) + 0.1*sine(1,1)");
    const double c = std::cbrt(2.0);
    const double expected = 0.1 * std::fabs(2 * std::sin(1.0) - std::sin(c));
    CHECK(defect(p, pert, rho1, 1, 1, -c) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(0.0731).epsilon(1e-3));

    CHECK(defect(p, FunctionHandle(), ModularSpec::exp(), 1, 2, 3) == 0.0);
}

TEST_CASE("pair additivity defect") {
    const auto rho1 = ModularSpec::power(1);
    const auto cube = FunctionHandle::parse("mono(1,3)");
    CHECK(pair_additivity_defect(cube, rho1, 3, 2, 3) <= 1e-12);
    for (double t : {0.5, 1.0, 7.25}) CHECK(pair_additivity_defect(cube, rho1, 3, t, -t) == 0.0);

    const auto pert = FunctionHandle::parse("mono(1,3) + 0.1*sine(1,1)");
    const double expected = 0.1 * std::fabs(std::sin(std::cbrt(2.0)) - 2 * std::sin(1.0));
    CHECK(pair_additivity_defect(pert, rho1, 3, 1, 1) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("control functions") {
    const auto a = ControlFunction::power(1, 6);
    CHECK(control_eval(a, 1, 1, 1) == 3.0);
    const auto b = ControlFunction::parse("power:theta=0.02,p=1");
    for (double x : {-3.0, 0.5, 10.0}) {
        CHECK(control_eval(b, x, x, -std::cbrt(2.0) * x) ==
              doctest::Approx(0.02 * (2 + std::cbrt(2.0)) * std::fabs(x)).epsilon(1e-14));
    }
    CHECK(0.02 * (2 + std::cbrt(2.0)) == doctest::Approx(0.06520).epsilon(1e-4));
    const auto c = ControlFunction::parse("const:eps=0.1");
    CHECK(control_eval(c, 4, -5, 6) == 0.1);
    CHECK(ControlFunction::parse(b.to_string()).theta() == 0.02);
    CHECK(control_eval(a, 0, 0, 0) == 0.0);

    CHECK_THROWS_AS(ControlFunction::parse("power:theta=1"), ConfigError);
    CHECK_THROWS_AS(ControlFunction::parse("power:theta=-1,p=2"), ConfigError);
    CHECK_THROWS_AS(ControlFunction::parse("const:eps=0.1,p=2"), ConfigError);
    CHECK_THROWS_AS(ControlFunction::parse("gauss:eps=1"), ConfigError);
    CHECK_THROWS_AS(ControlFunction::power(1, 0), ParameterError);
}

TEST_CASE("property: radical_combine is odd") {
    oracle::Uniform rng(22);
    for (int trial = 0; trial < 500; ++trial) {
        const EquationParams p(2 * rng.pick(1, 3) + 1, rng(0, 1) < 0.5 ? 1.0 : -0.5);
        const double x = rng(-10, 10), y = rng(-10, 10), z = rng(-10, 10);
        CHECK(radical_combine(p, -x, -y, -z) == -radical_combine(p, x, y, z));
    }
}

TEST_CASE("property: exact solutions c x^s have vanishing defect") {
    oracle::Uniform rng(23);
    const auto rho = ModularSpec::power(1);
    for (int s : {3, 5, 7}) {
        for (double q : {1.0, -1.0, 0.5}) {
            for (double c : {-2.0, 1.0, 5.0}) {
                const EquationParams p(s, q);
                const auto phi = FunctionHandle::monomial(c, s);
                for (int i = 0; i < 100; ++i) {
                    const double x = rng(-10, 10), y = rng(-10, 10), z = rng(-10, 10);
                    const double w = radical_combine(p, x, y, z);
                    const double scale = std::max({std::fabs(phi(x)), std::fabs(phi(y)), std::fabs(phi(z)),
                                                   std::fabs(q * phi(w))});
                    CHECK(defect(p, phi, rho, x, y, z) <= 1e-12 * (1 + scale));
                }
            }
        }
    }
}

TEST_CASE("property: power control homogeneity") {
    oracle::Uniform rng(24);
    for (int trial = 0; trial < 500; ++trial) {
        const double p = rng(0.5, 8);
        const auto a = ControlFunction::power(rng(0, 3), p);
        const double x = rng(-5, 5), y = rng(-5, 5), z = rng(-5, 5), c = rng(-3, 3);
        CHECK(oracle::rel_close(a(c * x, c * y, c * z), std::pow(std::fabs(c), p) * a(x, y, z), 1e-12));
    }
}

TEST_CASE("property: defect is symmetric in its arguments") {
    oracle::Uniform rng(25);
    const EquationParams p(3, 1.0);
    const auto phi = FunctionHandle::parse("mono(1,3) + 0.1*sine(1,1) + envnoise(0.01,2,4)");
    const auto rho = ModularSpec::power(2);
    for (int trial = 0; trial < 300; ++trial) {
        const double x = rng(-10, 10), y = rng(-10, 10), z = rng(-10, 10);
        const double base = defect(p, phi, rho, x, y, z);
        for (const auto& t : {Triple{y, x, z}, Triple{z, y, x}, Triple{x, z, y}, Triple{y, z, x}}) {
            CHECK(defect(p, phi, rho, t[0], t[1], t[2]) == doctest::Approx(base).epsilon(1e-9).scale(1e-12));
        }
    }
}

TEST_CASE("sampled triples are seeded and include the box corners") {
    const auto a = sample_triples(-10, 10, 500, 42);
    const auto b = sample_triples(-10, 10, 500, 42);
    REQUIRE(a.size() == 508);
    CHECK(a == b);
    CHECK(a != sample_triples(-10, 10, 500, 43));
    CHECK(std::ranges::count(a, Triple{-10, -10, -10}) == 1);
    CHECK(std::ranges::count(a, Triple{10, 10, 10}) == 1);
    for (const auto& t : a)
        for (double v : t) CHECK((v >= -10 && v <= 10));
}

TEST_CASE("defect audit") {
    const EquationParams p(3, 1.0);
    const auto rho = ModularSpec::power(1);
    const auto triples = sample_triples(-10, 10, 200, 1);
    // |0.01 (x + y + z - w)| <= 0.02 (|x| + |y| + |z|) since |w| <= |x| + |y| + |z|
    const auto ok = audit_defect(p, FunctionHandle::parse("mono(1,3) + mono(0.01,1)"), rho,
                                 ControlFunction::power(0.02, 1), triples);
    CHECK(ok.holds);
    CHECK(ok.max_ratio <= 1.0);
    CHECK(ok.triples == 208);

    // 0.1 sin has defect up to 0.4, so eps = 0.1 is violated somewhere on the sample
    const auto bad = audit_defect(p, FunctionHandle::parse("mono(1,3) + 0.1*sine(1,1)"), rho,
                                  ControlFunction::constant(0.1), triples);
    CHECK_FALSE(bad.holds);
    CHECK(bad.max_defect > 0.1);
    CHECK(bad.max_defect <= 0.4);
}

}  // TEST_SUITE
