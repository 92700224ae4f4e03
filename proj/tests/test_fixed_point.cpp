#include <doctest.h>

#include <cmath>
#include <vector>

#include "modstab/direct_method.hpp"
#include "modstab/error.hpp"
#include "modstab/fixed_point.hpp"
#include "support/oracles.hpp"

using namespace modstab;

namespace {
const EquationParams p31(3, 1.0);
const auto rho1 = ModularSpec::power(1);
const SampleGrid grid41(-10, 10, 41);
}  // namespace

TEST_SUITE("fixed_point") {

TEST_CASE("lambda examples") {
    CHECK(lambda_apply(FunctionHandle::monomial(1, 3), 3, 5) == doctest::Approx(125).epsilon(1e-15));
    CHECK(lambda_apply(FunctionHandle::constant(3), 3, 17) == 1.5);
    CHECK(lambda_apply(FunctionHandle::monomial(1, 1), 3, 1) == doctest::Approx(0.6299605249474366).epsilon(1e-15));
    const auto g = FunctionHandle::parse("mono(1,3) + sine(1,1)");
    const auto l4 = lambda_power(g, 3, 4);
    for (double x : {-2.0, 0.3, 7.0}) CHECK(l4(x) == doctest::Approx(g(std::exp2(4.0 / 3) * x) / 16).epsilon(1e-14));
}

TEST_CASE("property: exact solutions are lambda-invariant") {
    oracle::Uniform rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        const int s = 2 * rng.pick(1, 4) + 1;
        const double c = rng(-5, 5), x = rng(-10, 10);
        const auto f = FunctionHandle::monomial(c, s);
        CHECK(oracle::rel_close(lambda_apply(f, s, x), f(x), 8e-16 * s));
    }
}

TEST_CASE("contraction constant examples") {
    const auto samples = rho_hat_sample_set(grid41);
    const auto c1 = estimate_L(ControlFunction::power(0.3, 1), 3, samples);
    CHECK(c1.L_hat == doctest::Approx(std::exp2(-2.0 / 3)).epsilon(1e-12));
    CHECK(c1.valid);
    CHECK(c1.samples_skipped == 1);  // x = 0
    const auto c3 = estimate_L(ControlFunction::power(2, 3), 3, samples);
    CHECK(c3.L_hat == 1.0);
    CHECK_FALSE(c3.valid);
    const auto cc = estimate_L(ControlFunction::constant(0.2), 3, samples);
    CHECK(cc.L_hat == 0.5);
    CHECK(cc.valid);
    const auto c6 = estimate_L(ControlFunction::power(1, 6), 3, samples);
    CHECK(c6.L_hat == doctest::Approx(2.0).epsilon(1e-12));

    const std::vector<double> zero{0.0};
    CHECK_THROWS_AS(estimate_L(ControlFunction::power(1, 1), 3, zero), ArgumentError);
}

TEST_CASE("property: L_hat for power controls is 2^(p/s - 1)") {
    oracle::Uniform rng(42);
    const auto samples = rho_hat_sample_set(grid41);
    for (int trial = 0; trial < 200; ++trial) {
        const int s = 2 * rng.pick(1, 3) + 1;
        const double p = rng(0.1, 12);
        const auto cert = estimate_L(ControlFunction::power(rng(0.01, 4), p), s, samples);
        CHECK(oracle::rel_close(cert.L_hat, std::exp2(p / s - 1), 1e-12));
        CHECK(cert.valid == (cert.L_hat < 1));
    }
}

TEST_CASE("rho-hat distance examples") {
    const auto samples = rho_hat_sample_set(grid41);
    const auto cube = FunctionHandle::monomial(1, 3);
    const auto a1 = ControlFunction::power(0.02, 1);
    CHECK(rho_hat_distance(cube, cube, a1, rho1, 3, samples) == 0.0);
    const auto f = FunctionHandle::parse("mono(1,3) + mono(0.01,1)");
    const double expected = 0.01 / (0.02 * (2 + std::cbrt(2.0)));
    CHECK(rho_hat_distance(f, cube, a1, rho1, 3, samples) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected == doctest::Approx(0.15337).epsilon(1e-4));

    // Samples include a point where |sin x| is within 1e-12 of one.
    std::vector<double> near_peak = samples;
    near_peak.push_back(std::acos(-1.0) / 2);
    const auto g = FunctionHandle::parse("mono(1,3) + 0.1*sine(1,1)");
    CHECK(rho_hat_distance(g, cube, ControlFunction::constant(0.1), rho1, 3, near_peak) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample set is the grid plus the clipped ladder") {
    const SampleGrid small(-1, 1, 5);
    const auto set = rho_hat_sample_set(small);
    CHECK(std::is_sorted(set.begin(), set.end()));
    CHECK(std::adjacent_find(set.begin(), set.end()) == set.end());
    for (double x : set) CHECK((x >= -1 && x <= 1));
    CHECK(std::find(set.begin(), set.end(), 0.125) != set.end());
    CHECK(std::find(set.begin(), set.end(), -0.5) != set.end());
    CHECK(std::find(set.begin(), set.end(), 2.0) == set.end());
}

TEST_CASE("property: lambda is a strict contraction in rho-hat") {
    // rho(Lambda h)(x) <= rho(h(2^(1/s) x)) / 2, so the sampled inequality needs the scaled samples on the right.
    oracle::Uniform rng(43);
    const auto samples = rho_hat_sample_set(grid41);
    for (int trial = 0; trial < 100; ++trial) {
        const int s = 2 * rng.pick(1, 3) + 1;
        const double p = rng(0.2, s - 0.2);
        const auto alpha = ControlFunction::power(rng(0.1, 2), p);
        std::vector<double> widened = samples;
        for (double x : samples) widened.push_back(std::exp2(1.0 / s) * x);
        const double L = estimate_L(alpha, s, widened).L_hat;
        const auto rho = ModularSpec::power(rng(1, 3));
        const auto f = FunctionHandle::monomial(rng(-2, 2), s) + FunctionHandle::envelope_noise(rng(0.01, 1), p, trial + 1);
        const auto g = FunctionHandle::monomial(rng(-2, 2), s) + 0.1 * FunctionHandle::sine(1, rng(0.5, 2));
        const double before = rho_hat_distance(f, g, alpha, rho, s, widened);
        const double after = rho_hat_distance(lambda_power(f, s, 1), lambda_power(g, s, 1), alpha, rho, s, samples);
        CHECK(after <= L * before * (1 + 1e-12) + 1e-9);
    }
}

TEST_CASE("solve: linear perturbation") {
    const auto phi = FunctionHandle::parse("mono(1,3) + mono(0.01,1)");
    const auto r = fixed_point_solve(phi, p31, rho1, ControlFunction::power(0.02, 1), grid41);
    CHECK(r.certificate.valid);
    CHECK_FALSE(r.saturated);
    CHECK(r.rho_hat_gap < 1e-9);
    CHECK(r.iterations <= 60);
    CHECK(r.audit.holds);
    for (std::size_t i = 0; i < grid41.size(); ++i) {
        const double x = grid41[i];
        CHECK(std::fabs(r.values[i] - x * x * x) <= 1e-6);
        CHECK(r.bound_ok[i]);
        const double expected_bound = 0.02 * (2 + std::cbrt(2.0)) * std::fabs(x) / (2 * (1 - std::exp2(-2.0 / 3)));
        CHECK(r.bound[i] == doctest::Approx(expected_bound).epsilon(1e-9));
        CHECK(r.residual[i] <= r.bound[i]);
    }
    CHECK(r.worst_decay_excess <= 1e-9);
    for (std::size_t n = 1; n < r.gap_history.size(); ++n) {
        CHECK(r.gap_history[n] <= r.certificate.L_hat * r.gap_history[n - 1] + 1e-9);
        // Exact rate until the gap approaches round-off in x^3 (about 1e-13 relative to 1e3).
        if (r.gap_history[n - 1] > 1e-4)
            CHECK(r.gap_history[n] / r.gap_history[n - 1] == doctest::Approx(std::exp2(-2.0 / 3)).epsilon(1e-6));
    }
}

TEST_CASE("solve: exact solution converges at once") {
    const auto r = fixed_point_solve(FunctionHandle::monomial(1, 3), p31, rho1, ControlFunction::power(0.02, 1), grid41);
    CHECK(r.iterations == 1);
    for (std::size_t i = 0; i < grid41.size(); ++i) CHECK(r.values[i] == doctest::Approx(std::pow(grid41[i], 3)).epsilon(1e-15));
}

TEST_CASE("solve: precondition order") {
    const auto phi = FunctionHandle::parse("mono(1,3) + envnoise(0.001,6,3)");
    try {
        fixed_point_solve(phi, p31, rho1, ControlFunction::power(1, 6), grid41);
        FAIL("expected RegimeError");
    } catch (const RegimeError& e) {
        CHECK(e.value() == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fixed_point_solve(FunctionHandle::monomial(1, 3), p31, rho1, ControlFunction::power(1, 3), grid41),
                    RegimeError);
    CHECK_THROWS_AS(
        fixed_point_solve(FunctionHandle::monomial(1, 3), p31, ModularSpec::exp(), ControlFunction::power(1, 1), grid41),
        ContractViolation);
    CHECK_THROWS_AS(fixed_point_solve(FunctionHandle::parse("mono(1,3) + mono(1,1)"), p31, rho1,
                                      ControlFunction::power(0.02, 1), grid41),
                    PreconditionError);
}

TEST_CASE("cross-method agreement with the expanding limit") {
    oracle::Uniform rng(44);
    for (int trial = 0; trial < 10; ++trial) {
        const double c = rng(-3, 3);
        const double a = rng(1e-3, 1e-2);
        const double pe = rng(0.5, 2);
        const auto phi = FunctionHandle::monomial(c, 3) + FunctionHandle::envelope_noise(a, pe, trial + 100);
        const auto alpha = ControlFunction::power(4 * a, pe);
        FixedPointOptions fo;
        fo.n_max = 1000;
        const auto fp = fixed_point_solve(phi, p31, rho1, alpha, grid41, fo);
        LimitOptions lo;
        lo.n_max = 1000;
        const auto dm = construct_limit(LimitMode::expand, phi, p31, rho1, grid41, lo);
        for (std::size_t i = 0; i < grid41.size(); ++i) CHECK(std::fabs(fp.values[i] - dm.values[i]) <= 1e-6);
    }
}

}  // TEST_SUITE
