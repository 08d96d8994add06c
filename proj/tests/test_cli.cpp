#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spiral/cli.hpp"

using namespace spiral;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    std::ostringstream o, e;
    const int c = cli::run(std::move(args), o, e);
    return {c, o.str(), e.str()};
}

fs::path scratch(const std::string& name)
{
    auto p = fs::temp_directory_path() / ("spiral_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// one solve shared by the pipeline tests
const fs::path& solved_dir()
{
    static const fs::path d = [] {
        auto p = scratch("solve");
        const auto r = run({"solve", "--n", "1", "--q", "0.5", "--out-dir", p.string(), "--quiet"});
        REQUIRE(r.code == 0);
        return p;
    }();
    return d;
}

} // namespace

TEST_CASE("Usage and argument errors")
{
    auto r = run({});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"kappa", "--q", "0.5", "--bogus"}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"kappa"}).code == 1); // --q required
    const auto d = scratch("errors");
    CHECK(run({"kappa", "--q", "0.5", "--tol", "-1", "--out-dir", d.string()}).code == 1);
    CHECK(run({"kappa", "--q", "0.5", "--out-dir", (d / "missing").string()}).code == 1);
}

TEST_CASE("kappa prints JSON and writes a manifest")
{
    const auto d = scratch("kappa");
    const auto r = run({"kappa", "--n", "1", "--q", "0.5", "--cn", "auto", "--json", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const double C = matching_constant(1).C_n;
    CHECK_THAT(j.at("log_kappa").get<double>(), WithinAbs(kappa_asym(1, 0.5, C).log_kappa, 1e-15));
    CHECK(j.at("cn_sign") == "printed");
    const auto m = json::parse(slurp(d / "manifest.json"));
    CHECK(m.at("command") == "kappa");
    CHECK(m.at("exit_code") == 0);
    CHECK(m.at("config").at("q") == 0.5);
    CHECK(m.at("config").at("tol") == 1e-10);
    CHECK(m.at("result").at("log_kappa") == j.at("log_kappa"));

    const auto c = run({"kappa", "--q", "0.5", "--cn", "-0.2", "--cn-sign", "corrected", "--json", "--out-dir",
                        d.string()});
    REQUIRE(c.code == 0);
    CHECK_THAT(json::parse(c.out).at("log_kappa").get<double>(),
               WithinAbs(kappa_asym(1, 0.5, -0.2, CnSign::corrected).log_kappa, 1e-15));
    CHECK(run({"kappa", "--q", "0.5", "--cn", "abc", "--out-dir", d.string()}).code == 1);
    CHECK(run({"kappa", "--q", "0", "--out-dir", d.string()}).code == 1);
}

TEST_CASE("Identical configuration gives identical bytes")
{
    const auto a = scratch("det_a");
    REQUIRE(run({"kappa", "--q", "0.4", "--out-dir", a.string(), "--quiet"}).code == 0);
    const auto first = slurp(a / "manifest.json");
    REQUIRE(run({"kappa", "--q", "0.4", "--out-dir", a.string(), "--quiet"}).code == 0);
    CHECK(slurp(a / "manifest.json") == first);
    const auto s = scratch("det_s");
    REQUIRE(run({"solve", "--q", "0.5", "--out-dir", s.string(), "--quiet"}).code == 0);
    CHECK(slurp(s / "solve_report.json") == slurp(solved_dir() / "solve_report.json"));
    CHECK(slurp(s / "profile.csv") == slurp(solved_dir() / "profile.csv"));
}

TEST_CASE("Config file supplies defaults, flags override")
{
    const auto d = scratch("config");
    {
        std::ofstream os(d / "cfg.json");
        os << R"({"command": "kappa", "q": 0.3, "cn_sign": "corrected", "json": true})";
    }
    auto r = run({"--config", (d / "cfg.json").string(), "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("q") == 0.3);
    CHECK(j.at("cn_sign") == "corrected");
    r = run({"kappa", "--config", (d / "cfg.json").string(), "--q", "0.4", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("q") == 0.4);
    CHECK(run({"--config", (d / "nope.json").string()}).code == 1);
}

TEST_CASE("solve writes report and profile")
{
    const auto& d = solved_dir();
    const auto rep = json::parse(slurp(d / "solve_report.json"));
    CHECK(rep.at("converged") == true);
    CHECK(rep.at("first_integral").get<double>() <= 1e-9);
    CHECK(rep.at("profile").at("r").size() == rep.at("profile").at("f").size());
    const auto csv = slurp(d / "profile.csv");
    CHECK(csv.rfind("r,f,df,v,I\n", 0) == 0);
    const auto m = json::parse(slurp(d / "manifest.json"));
    CHECK(m.at("outputs") == json::array({"solve_report.json", "profile.csv"}));
}

TEST_CASE("Numerical failure and refusals map to exit codes")
{
    const auto d = scratch("codes");
    CHECK(run({"solve", "--q", "0.5", "--max-iter", "1", "--out-dir", d.string(), "--quiet"}).code == 2);
    CHECK(json::parse(slurp(d / "manifest.json")).at("exit_code") == 2);
    CHECK(run({"solve", "--q", "0.05", "--out-dir", d.string(), "--quiet"}).code == 1);
    CHECK(run({"solve", "--n", "2", "--q", "0.6", "--out-dir", d.string(), "--quiet"}).code == 1);
}

TEST_CASE("physical from arguments and from a solve report")
{
    const auto d = scratch("physical");
    auto r = run({"physical", "--alpha", "0.5", "--q", "0.3", "--k", "0.1", "--json", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    const auto t = physical_from_reduced(0.5, 0.3, 0.1);
    CHECK(j.at("Omega").get<double>() == t.Omega);
    CHECK(std::fabs(j.at("dispersion_residual")[0].get<double>()) <= 1e-12);
    r = run({"physical", "--from-solve", (solved_dir() / "solve_report.json").string(), "--json", "--out-dir",
             d.string()});
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(j.at("q") == 0.5);
    CHECK_THAT(j.at("k_star").get<double>(), WithinRel(0.0936645709, 1e-6));
}

TEST_CASE("field export from a solve report")
{
    const auto d = scratch("field");
    const auto rep = (solved_dir() / "solve_report.json").string();
    auto r = run({"field", "--solve-report", rep, "--nx", "41", "--ny", "41", "--extent", "40", "--t", "0",
                  "--chirality", "+1", "--out", "field.csv", "--json", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("abs_at_center") == 0.0);
    const auto csv = slurp(d / "field.csv");
    CHECK(csv.rfind("x,y,re,im,abs\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41 * 41 + 1);

    r = run({"field", "--solve-report", rep, "--nx", "11", "--ny", "9", "--extent", "10", "--out", "field.json",
             "--out-dir", d.string(), "--quiet"});
    REQUIRE(r.code == 0);
    const auto fj = json::parse(slurp(d / "field.json"));
    CHECK(fj.at("metadata").at("nx") == 11);
    CHECK(fj.at("re").size() == 99);

    CHECK(run({"field", "--solve-report", rep, "--extent", "100", "--no-extend", "--out-dir", d.string(),
               "--quiet"})
              .code == 1);
    CHECK(run({"field", "--solve-report", rep, "--chirality", "2", "--out-dir", d.string()}).code == 1);
    CHECK(run({"field", "--solve-report", (d / "absent.json").string(), "--out-dir", d.string()}).code == 1);
}

TEST_CASE("sweep writes the report CSV")
{
    const auto d = scratch("sweep");
    const auto r = run({"sweep", "--n", "1", "--q-list", "0.6,0.5", "--out", "report.csv", "--out-dir", d.string(),
                        "--quiet"});
    REQUIRE(r.code == 0);
    const auto csv = slurp(d / "report.csv");
    CHECK(csv.rfind("q,k_numeric,log_k_numeric,k_asym,ratio,abs_ratio_minus_1_times_logq,iters,residual", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(run({"sweep", "--q-list", "0.4,0.5", "--out-dir", d.string(), "--quiet"}).code == 1);
}

TEST_CASE("bessel-eval, outer-eval, inner-solve")
{
    const auto d = scratch("evals");
    auto r = run({"bessel-eval", "--nu", "0.1", "--x", "0.5", "--json", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    const double s = json::parse(r.out).at("value").get<double>();
    r = run({"bessel-eval", "--nu", "0.1", "--x", "0.5", "--method", "quadrature", "--json", "--out-dir",
             d.string()});
    REQUIRE(r.code == 0);
    CHECK_THAT(json::parse(r.out).at("value").get<double>(), WithinRel(s, 1e-9));

    r = run({"outer-eval", "--q", "0.5", "--k", "0.09", "--R", "3", "--json", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("riccati_residual").get<double>() <= 1e-8);
    CHECK(run({"outer-eval", "--q", "0.5", "--k", "0.09", "--out-dir", d.string()}).code == 1);
    CHECK(run({"outer-eval", "--q", "0.5", "--k", "0.09", "--R", "0.01", "--out-dir", d.string()}).code == 1);

    r = run({"inner-solve", "--n", "1", "--r-max", "100", "--json", "--out-dir", d.string()});
    REQUIRE(r.code == 0);
    CHECK_THAT(json::parse(r.out).at("C_n").get<double>(), WithinAbs(-0.1191181066, 1e-6));
    CHECK(fs::exists(d / "inner_profile.csv"));
}

TEST_CASE("selfcheck passes on the algebraic and core suites")
{
    const auto d = scratch("selfcheck");
    const auto r = run({"selfcheck", "--skip-solve", "--out-dir", d.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(json::parse(slurp(d / "manifest.json")).at("result").at("all_pass") == true);
}
