#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spiral/spiral_field.hpp"

using namespace spiral;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpiralSolution& half()
{
    static const SpiralSolution s = solve_spiral(1, 0.5);
    return s;
}

std::string tmp_path(const std::string& name)
{
    return (std::filesystem::temp_directory_path() / ("spiral_field_" + name)).string();
}

} // namespace

TEST_CASE("Phase of a constant gradient is linear")
{
    RadialProfile p;
    for (int i = 0; i <= 50; ++i) {
        p.r.push_back(0.1 * i * (1 + 0.01 * i)); // uneven on purpose
        p.v.push_back(-0.7);
    }
    const auto t = theta_of_r(p);
    CHECK(t.theta.front() == 0.0);
    for (std::size_t i = 0; i < t.r.size(); ++i) {
        CHECK_THAT(t.theta[i], WithinAbs(-0.7 * t.r[i], 1e-12));
        CHECK_THAT(t.dv[i], WithinAbs(0.0, 1e-9));
    }
    // and of a linear one, quadratic
    for (std::size_t i = 0; i < p.r.size(); ++i) p.v[i] = 2 * p.r[i];
    const auto s = theta_of_r(p);
    for (std::size_t i = 0; i < s.r.size(); ++i) CHECK_THAT(s.theta[i], WithinAbs(s.r[i] * s.r[i], 1e-11));
}

TEST_CASE("Phase of the converged solve")
{
    const auto& s = half();
    const auto t = theta_of_r(s.profile);
    CHECK(t.theta.front() == 0.0);
    CHECK(t.v.front() == 0.0);
    for (std::size_t i = 1; i < t.theta.size(); ++i) REQUIRE(t.theta[i] < t.theta[i - 1]);
    // slope tends to -k along the outer continuation
    const CompositeProfile far(s.profile, 15000.0, 2.0);
    CHECK(std::fabs(far.v(15000.0) + s.report.k_numeric) <= 1e-4);
    // composite is continuous across the seam
    const double rm = far.r_max;
    CHECK_THAT(far.theta(rm + 1e-9), WithinAbs(t.theta.back(), 1e-8));
    CHECK_THAT(far.f(rm + 1e-9), WithinAbs(s.profile.f.back(), 1e-8));
}

TEST_CASE("Field: defect, modulus, bounds")
{
    const auto& s = half();
    const CompositeProfile c(s.profile);
    FieldSpec spec;
    spec.nx = spec.ny = 41;
    spec.extent = c.r_end / std::sqrt(2.0);
    const auto g = sample_field(c, spec);
    CHECK(g.abs[g.index(20, 20)] == 0.0);
    const double top = std::sqrt(1 - g.k * g.k);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto id = g.index(i, j);
            REQUIRE(g.abs[id] < top);
            REQUIRE(std::fabs(std::hypot(g.re[id], g.im[id]) - g.abs[id]) <= 1e-14);
            REQUIRE(std::fabs(g.abs[id] - c.f(std::hypot(g.x[i], g.y[j]))) <= 1e-14);
        }
    spec.extent *= 1.01;
    CHECK_THROWS_AS(sample_field(c, spec), DomainError);
}

TEST_CASE("Field: rotation in time is a rotation in angle")
{
    const auto& s = half();
    const CompositeProfile c(s.profile);
    FieldSpec spec;
    spec.nx = spec.ny = 21;
    spec.extent = 20;
    const auto g0 = sample_field(c, spec);
    spec.t = 3.7;
    const auto g1 = sample_field(c, spec);
    const double shift = g0.Omega * spec.t / g0.n; // phi -> phi + Omega t / n
    double worst = 0.0;
    for (int j = 0; j < g1.ny; ++j)
        for (int i = 0; i < g1.nx; ++i) {
            const double rho = std::hypot(g1.x[i], g1.y[j]);
            const double phi = std::atan2(g1.y[j], g1.x[i]) + shift;
            const double ph = c.theta(rho) + g0.n * phi;
            const auto id = g1.index(i, j);
            worst = std::max(worst, std::fabs(g1.re[id] - c.f(rho) * std::cos(ph)));
        }
    CHECK(worst <= 1e-12);
}

TEST_CASE("Field: straight arms at q = 0, reversed chirality")
{
    const auto z = solve_spiral(1, 0.0);
    const CompositeProfile c(z.profile);
    FieldSpec spec;
    spec.nx = spec.ny = 31;
    spec.extent = 30;
    const auto g = sample_field(c, spec);
    // Re A = f cos(phi): zero along the whole y axis
    for (int j = 0; j < g.ny; ++j) CHECK(std::fabs(g.re[g.index(15, j)]) < 1e-12);
    spec.chirality = -1;
    const auto m = sample_field(c, spec);
    for (std::size_t i = 0; i < g.re.size(); ++i) {
        REQUIRE(m.re[i] == g.re[i]);
        REQUIRE(m.im[i] == -g.im[i]);
    }
}

TEST_CASE("Arm spacing matches 2 pi n / k_*")
{
    const auto& s = half();
    const CompositeProfile c(s.profile, 4300.0);
    FieldSpec spec;
    spec.nx = spec.ny = 1201;
    spec.extent = 3000;
    const auto g = sample_field(c, spec);
    CHECK(g.abs[g.index(600, 600)] <= 1e-6);
    const auto a = measure_arm_spacing(g, 1000.0);
    CAPTURE(a.measured, a.expected);
    CHECK(a.crossings >= 40);
    CHECK(a.rel_error <= 0.02);
    CHECK_THAT(a.expected, WithinRel(2 * M_PI / s.report.k_numeric, 1e-14));
}

TEST_CASE("Physical scaling with alpha != 0")
{
    const auto& s = half();
    const CompositeProfile c(s.profile, 3000.0);
    FieldSpec spec;
    spec.nx = spec.ny = 801;
    spec.extent = 1800;
    spec.alpha = 0.3;
    const auto g = sample_field(c, spec);
    const auto t = physical_from_reduced(0.3, 0.5, s.report.k_numeric);
    CHECK(g.k_star == t.k_star);
    CHECK(g.a == t.a);
    const auto a = measure_arm_spacing(g, 700.0);
    CAPTURE(a.measured, a.expected);
    CHECK(a.rel_error <= 0.02);
}

TEST_CASE("Export: CSV roundtrip and JSON schema")
{
    const auto& s = half();
    const CompositeProfile c(s.profile);
    FieldSpec spec;
    spec.nx = 7;
    spec.ny = 5;
    spec.extent = 10;
    spec.t = 1.5;
    const auto g = sample_field(c, spec);
    const auto csv = tmp_path("grid.csv");
    write_field_csv(g, csv);
    const auto rows = read_field_csv(csv);
    REQUIRE(rows.size() == 35);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto& r = rows[g.index(i, j)];
            REQUIRE(r.x == g.x[i]);
            REQUIRE(r.y == g.y[j]);
            REQUIRE(r.re == g.re[g.index(i, j)]);
            REQUIRE(r.im == g.im[g.index(i, j)]);
            REQUIRE(r.abs == g.abs[g.index(i, j)]);
        }
    const auto js = tmp_path("grid.json");
    write_field_json(g, js);
    std::ifstream is(js);
    const auto j = nlohmann::json::parse(is);
    for (const char* key : {"nx", "ny", "extent", "t", "n", "q", "k"}) CHECK(j["metadata"].contains(key));
    CHECK(j["metadata"]["t"] == 1.5);
    CHECK(j["re"].size() == 35);
    CHECK(j["re"][3].get<double>() == g.re[3]);
    std::filesystem::remove(csv);
    std::filesystem::remove(js);

    const auto empty = tmp_path("empty.csv");
    CHECK_THROWS_AS(write_field_csv(FieldGrid{}, empty), ConfigError);
    CHECK_FALSE(std::filesystem::exists(empty));
    CHECK_THROWS_AS(write_field_csv(g, "/nonexistent-dir/x.csv"), std::system_error);
}
