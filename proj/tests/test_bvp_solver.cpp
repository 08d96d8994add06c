#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spiral/bvp_solver.hpp"

using namespace spiral;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpiralSolution& half()
{
    static const SpiralSolution s = solve_spiral(1, 0.5);
    return s;
}

} // namespace

TEST_CASE("System residual vanishes on a constructed pair")
{
    // second derivatives taken from the equations themselves
    const double q = 0.3, k = 0.1;
    for (int n : {1, 2})
        for (double r : {0.5, 1.0, 3.0}) {
            const auto p = SpiralParams::from_k(n, q, k);
            const double f = r / (1 + r), df = 1 / ((1 + r) * (1 + r)), v = -0.2 * std::tanh(r);
            const double ddf = -df / r + n * n * f / (r * r) - f * (1 - f * f - v * v);
            const double dv = -v / r - 2 * df * v / f - q * (1 - f * f - k * k);
            const auto [rf, rv] = system_residual(r, f, df, ddf, v, dv, p);
            CHECK(std::fabs(rf) < 1e-14);
            CHECK(std::fabs(rv) < 1e-14);
            // and a unit kick in f'' shows up one-to-one
            CHECK_THAT(system_residual(r, f, df, ddf + 1, v, dv, p).first, WithinAbs(1.0, 1e-14));
        }
}

TEST_CASE("Lambda-omega specialization reproduces the reduced system")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + static_cast<int>(3 * u(rng));
        const double r = 0.05 + 20 * u(rng), f = u(rng), df = u(rng) - 0.5, ddf = 2 * u(rng) - 1;
        const double v = u(rng) - 0.5, dv = u(rng) - 0.5, q = 2 * u(rng) - 1, k = 0.9 * u(rng);
        const auto [a0, a1] = system_residual(r, f, df, ddf, v, dv, SpiralParams::from_k(n, q, k));
        const auto [b0, b1] = lambda_omega_residual(
            r, n, f, df, ddf, v, dv, [](double x) { return 1 - x * x; }, [q](double x) { return -q * x * x; },
            -q * (1 - k * k));
        worst = std::max({worst, std::fabs(a0 - b0), std::fabs(a1 - b1)});
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("Shooting from the origin tracks the core profile at q = 0")
{
    const auto f0 = solve_f0(1, 100.0);
    const auto p = SpiralParams::from_k(1, 0.0, 0.0);
    const auto prof = integrate_from_origin(p, f0.c_f, 6.0);
    CHECK_FALSE(prof.escaped);
    double worst = 0.0;
    for (std::size_t i = 0; i < prof.r.size(); ++i) worst = std::max(worst, std::fabs(prof.f[i] - f0.f0_at(prof.r[i])));
    CHECK(worst < 1e-7);
    // escape direction is monotone in the leading coefficient
    CHECK(escape_direction(integrate_from_origin(p, f0.c_f * 1.001, 40.0)) == +1);
    CHECK(escape_direction(integrate_from_origin(p, f0.c_f * 0.999, 40.0)) == -1);
    CHECK_THROWS_AS(integrate_from_origin(p, -1.0, 5.0), DomainError);
}

TEST_CASE("Outer mismatch against the outer pair itself")
{
    const auto p = SpiralParams::from_k(1, 0.5, 0.09);
    const OuterParams op(1, 0.5, 0.09);
    const double r = 60.0;
    const auto o = outer_at(op, r);
    const auto m = outer_mismatch(r, o.f, o.v, p);
    CHECK(m.m_f == 0.0);
    CHECK(std::fabs(m.m_v) <= 1e-15);
    CHECK_THROWS_AS(outer_mismatch(5.0, o.f, o.v, p), ConfigError);
}

TEST_CASE("Full solve at n = 1, q = 0.5")
{
    const auto& s = half();
    const auto& rep = s.report;
    CHECK(rep.converged);
    CHECK(rep.newton_iterations <= 50);
    CHECK(rep.first_integral <= 1e-9);
    CHECK(rep.system_residual <= 1e-8);
    CHECK(rep.f_increasing);
    CHECK(rep.f_bounded);
    CHECK(rep.v_signed);
    CHECK_FALSE(rep.suspect);
    CHECK(std::fabs(rep.m_f) <= 1e-6);
    CHECK(std::fabs(rep.m_v) <= 1e-6);
    CHECK(rep.R_match >= 2.0 * (1 - 1e-12));
    CHECK(s.profile.f.front() == 0.0);
    CHECK(s.profile.v.front() == 0.0);
    // this run is its own reference
    CHECK_THAT(rep.k_numeric, WithinRel(0.0936645709, 1e-6));
    CHECK(rep.ratio_corrected > 1.0);
    CHECK(rep.ratio_corrected < 1.2);
}

TEST_CASE("Solution at -q is the mirror image")
{
    const auto& a = half();
    const auto b = solve_spiral(1, -0.5);
    REQUIRE(a.profile.r.size() == b.profile.r.size());
    double df = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < a.profile.r.size(); ++i) {
        df = std::max(df, std::fabs(a.profile.f[i] - b.profile.f[i]));
        dv = std::max(dv, std::fabs(a.profile.v[i] + b.profile.v[i]));
    }
    CHECK(df <= 1e-10);
    CHECK(dv <= 1e-10);
    CHECK_THAT(b.report.k_numeric, WithinRel(a.report.k_numeric, 1e-10));
    CHECK(b.report.v_signed);
}

TEST_CASE("Short sweep: wavenumber falls and approaches the corrected formula")
{
    std::vector<SpiralSolution> sols;
    const auto reps = wavenumber_sweep(1, {0.6, 0.5, 0.4}, {}, &sols);
    REQUIRE(reps.size() == 3);
    for (std::size_t i = 0; i < reps.size(); ++i) {
        CAPTURE(reps[i].q, reps[i].message);
        REQUIRE(reps[i].converged);
        if (i) {
            CHECK(reps[i].k_numeric < reps[i - 1].k_numeric);
            CHECK(std::fabs(reps[i].ratio_corrected - 1) < std::fabs(reps[i - 1].ratio_corrected - 1));
        }
    }
    // the warm-started solve agrees with the cold one
    CHECK_THAT(reps[1].k_numeric, WithinRel(half().report.k_numeric, 1e-4));
    CHECK_THROWS_AS(wavenumber_sweep(1, {0.4, 0.5}), ConfigError);
}

TEST_CASE("Untwisted solve and refusals")
{
    const auto z = solve_spiral(1, 0.0);
    CHECK(z.report.k_numeric == 0.0);
    CHECK(z.report.converged);
    for (double v : z.profile.v) REQUIRE(v == 0.0);
    SolveOptions small;
    small.max_nodes = 20000;
    CHECK_THROWS_AS(solve_spiral(1, 0.1, small), ConfigError);
    CHECK_THROWS_AS(solve_spiral(2, 0.6), DomainError);
    CHECK_THROWS_AS(solve_spiral(0, 0.5), DomainError);
}
