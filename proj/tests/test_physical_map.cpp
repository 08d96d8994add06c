#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "spiral/physical_map.hpp"

using namespace spiral;
using Catch::Matchers::WithinAbs;

TEST_CASE("Twist parameter roundtrip")
{
    const double b = beta_from_alpha_q(0.3, 0.2);
    CHECK_THAT(q_from_alpha_beta(0.3, b), WithinAbs(0.2, 1e-14));
    CHECK_THAT(beta_from_alpha_q(0.3, q_from_alpha_beta(0.3, b)), WithinAbs(b, 1e-14));
    CHECK(q_from_alpha_beta(0.7, 0.7) == 0.0);
    CHECK_THROWS_AS(beta_from_alpha_q(2.0, 0.5), DomainError);
}

TEST_CASE("Untwisted and flat wave trains")
{
    const auto t = physical_from_reduced(0.4, 0.0, 0.2);
    CHECK_THAT(t.k_star, WithinAbs(0.2, 1e-15));
    CHECK_THAT(t.Omega, WithinAbs(-0.4, 1e-15));
    CHECK_THAT(t.beta, WithinAbs(0.4, 1e-15));
    // k_* = 0: C = 1, Omega = -beta
    const auto z = physical_from_reduced(0.3, 0.25, 0.0);
    CHECK(z.C == 1.0);
    CHECK_THAT(z.Omega, WithinAbs(-z.beta, 1e-15));
    const auto [d0, d1] = dispersion_check(0.3, z.beta, -z.beta, 0.0);
    CHECK_THAT(d0, WithinAbs(0, 1e-15));
    CHECK_THAT(d1, WithinAbs(0, 1e-15));
}

TEST_CASE("Reference triple satisfies the dispersion relation")
{
    const auto t = physical_from_reduced(0.5, 0.3, 0.1);
    const auto [d0, d1] = dispersion_check(t.alpha, t.beta, t.Omega, t.k_star, t.C);
    CHECK(std::fabs(d0) <= 1e-12);
    CHECK(std::fabs(d1) <= 1e-12);
    CHECK(t.warnings.empty());
    // perturbing Omega shows up one-to-one
    const auto [p0, p1] = dispersion_check(t.alpha, t.beta, t.Omega + 1e-3, t.k_star, t.C);
    CHECK_THAT(p0 - d0, WithinAbs(1e-3, 1e-15));
    CHECK(p1 == d1);
}

TEST_CASE("Random admissible draws")
{
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ua(-1.5, 1.5), uq(-0.9, 0.9), uk(0.0, 0.95);
    int used = 0;
    double worst_id = 0, worst_disp = 0, worst_rt = 0, worst_q = 0;
    while (used < 1000) {
        const double alpha = ua(rng), q = uq(rng), k = uk(rng);
        PhysicalTriple t;
        try {
            t = physical_from_reduced(alpha, q, k);
        } catch (const DomainError&) {
            continue;
        }
        ++used;
        const auto [i1, i2] = reduction_identities(t);
        const auto [d0, d1] = dispersion_check(t.alpha, t.beta, t.Omega, t.k_star);
        const auto [q2, k2] = reduced_from_physical(t.alpha, t.beta, t.k_star);
        worst_id = std::max({worst_id, std::fabs(i1), std::fabs(i2)});
        worst_disp = std::max({worst_disp, std::fabs(d0), std::fabs(d1)});
        worst_rt = std::max({worst_rt, std::fabs(q2 - q), std::fabs(k2 - k)});
        worst_q = std::max(worst_q, std::fabs(q_from_alpha_beta(t.alpha, t.beta) - q));
        REQUIRE(1 - t.Omega * t.alpha > 0);
        REQUIRE(1 + t.alpha * t.beta > 0);
    }
    CHECK(worst_id <= 1e-12);
    CHECK(worst_disp <= 1e-12);
    CHECK(worst_rt <= 1e-12);
    CHECK(worst_q <= 1e-14);
}

TEST_CASE("Outside the standing assumption: warning, not error")
{
    const auto t = physical_from_reduced(0.0, 0.9, 0.1);
    CHECK(t.beta == 0.9);
    CHECK(t.warnings.empty());
    const auto w = physical_from_reduced(-1.4, 0.8, 0.1);
    CHECK(std::fabs(w.alpha - w.beta) >= 1.0);
    CHECK_FALSE(w.warnings.empty());
    CHECK_THROWS_AS(physical_from_reduced(0.0, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(physical_from_reduced(3.0, 0.5, 0.1), DomainError);
    CHECK_THROWS_AS(dispersion_check(0.0, 0.0, 0.0, 1.5), DomainError);
}
