#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "asymptotic_wavenumber.hpp"
#include "bvp_solver.hpp"
#include "checks.hpp"
#include "errors.hpp"
#include "inner_core.hpp"
#include "outer_dominant.hpp"
#include "physical_map.hpp"
#include "specfun.hpp"
#include "spiral_field.hpp"

namespace spiral::cli {

using json = nlohmann::json;

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> s{"bessel-eval", "outer-eval", "inner-solve", "kappa", "solve",
                                            "sweep",       "physical",   "field",       "selfcheck"};
    return s;
}

/// Shared state of one invocation.
struct RunConfig {
    std::string command;
    double tol = 1e-10;
    std::string out_dir = ".";
    bool quiet = false;
    bool json_out = false;
    std::string config_path;
    json resolved;                    ///< every option with its final value
    std::vector<std::string> outputs; ///< files written, relative to out_dir
};

// ---------------------------------------------------------------------------
// small helpers

inline std::string out_path(const RunConfig& rc, const std::string& name)
{
    const std::filesystem::path p(name);
    if (p.is_absolute()) return name;
    return (std::filesystem::path(rc.out_dir) / p).string();
}

inline void write_text(RunConfig& rc, const std::string& name, const std::string& text)
{
    const auto path = out_path(rc, name);
    std::ofstream os(path);
    if (!os) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    os << text;
    os.flush();
    if (!os) throw std::system_error(errno, std::generic_category(), "write failed for " + path);
    rc.outputs.push_back(name);
}

inline json read_json_file(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// JSON number, or null for inf/nan (which JSON cannot carry).
inline json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json report_json(const WavenumberReport& r)
{
    return {{"n", r.n},
            {"q", r.q},
            {"k_numeric", r.k_numeric},
            {"log_k_numeric", jnum(r.log_k_numeric)},
            {"k_asym", r.k_asymptotic},
            {"log_k_asym", jnum(r.log_k_asymptotic)},
            {"ratio", r.ratio},
            {"abs_ratio_minus_1_times_logq", r.abs_ratio_minus_1_times_logq},
            {"log_k_asym_corrected", jnum(r.log_k_corrected)},
            {"ratio_corrected", r.ratio_corrected},
            {"C_n", r.C_n},
            {"c_f", r.c_f},
            {"r_max", r.r_max},
            {"R_match", r.R_match},
            {"m_f", r.m_f},
            {"m_v", r.m_v},
            {"m_df", r.m_df},
            {"newton_iterations", r.newton_iterations},
            {"inner_residual", r.inner_residual},
            {"first_integral", r.first_integral},
            {"system_residual", r.system_residual},
            {"f_increasing", r.f_increasing},
            {"f_bounded", r.f_bounded},
            {"v_signed", r.v_signed},
            {"converged", r.converged},
            {"suspect", r.suspect},
            {"message", r.message}};
}

inline RadialProfile profile_from_json(const json& j)
{
    if (!j.contains("profile")) throw ConfigError("solve report has no profile section");
    const auto& p = j.at("profile");
    RadialProfile prof;
    prof.n = j.at("n").get<int>();
    prof.q = j.at("q").get<double>();
    prof.k = j.at("k_numeric").get<double>();
    prof.r = p.at("r").get<std::vector<double>>();
    prof.f = p.at("f").get<std::vector<double>>();
    prof.df = p.at("df").get<std::vector<double>>();
    prof.v = p.at("v").get<std::vector<double>>();
    if (prof.r.size() < 2 || prof.f.size() != prof.r.size() || prof.df.size() != prof.r.size() ||
        prof.v.size() != prof.r.size())
        throw ConfigError("solve report profile arrays are inconsistent");
    prof.r_max = prof.r.back();
    return prof;
}

inline std::string csv_line(std::initializer_list<double> xs)
{
    std::string s;
    bool first = true;
    for (double x : xs) {
        if (!first) s += ',';
        s += fmt17(x);
        first = false;
    }
    return s + '\n';
}

inline void print_result(const RunConfig& rc, const json& result, std::ostream& out)
{
    if (rc.quiet) return;
    if (rc.json_out) {
        out << result.dump(2) << '\n';
        return;
    }
    for (auto it = result.begin(); it != result.end(); ++it) {
        if (it->is_structured()) continue;
        out << std::left << std::setw(30) << it.key() << ' '
            << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
    }
}

// ---------------------------------------------------------------------------
// config injection: JSON keys become flags placed right after the subcommand,
// so anything given on the command line comes later and wins

inline std::string value_token(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return fmt17(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + value_token(v[i]);
        return s;
    }
    throw ConfigError("config: unsupported value " + v.dump());
}

inline std::vector<std::string> inject_config(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    const json cfg = read_json_file(path);
    if (!cfg.is_object()) throw ConfigError("config: " + path + " must hold a JSON object");
    const auto& subs = subcommands();
    auto pos = std::find_if(args.begin(), args.end(),
                            [&](const std::string& a) { return std::find(subs.begin(), subs.end(), a) != subs.end(); });
    if (pos == args.end()) {
        if (!cfg.contains("command")) throw ConfigError("config: no subcommand given");
        args.insert(args.begin(), cfg.at("command").get<std::string>());
        pos = args.begin();
    }
    std::vector<std::string> extra;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        if (it.key() == "command" || it.key() == "config") continue;
        std::string flag = "--" + it.key();
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (it->is_boolean()) {
            if (it->get<bool>()) extra.push_back(flag);
            continue;
        }
        extra.push_back(flag);
        extra.push_back(value_token(*it));
    }
    args.insert(pos + 1, extra.begin(), extra.end());
    return args;
}

inline json option_value(const CLI::Option* o)
{
    std::vector<std::string> v = o->count() ? o->results() : std::vector<std::string>{o->get_default_str()};
    if (o->get_expected_min() == 0) return json(o->count() > 0);
    auto conv = [](const std::string& s) -> json {
        if (s.empty()) return nullptr;
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        if (end && *end == '\0') return d;
        return s;
    };
    if (v.size() == 1) return conv(v[0]);
    json a = json::array();
    for (const auto& s : v) a.push_back(conv(s));
    return a;
}

inline json resolve_options(const CLI::App& app)
{
    json j = json::object();
    for (const CLI::Option* o : app.get_options()) {
        if (o->get_lnames().empty()) continue;
        const auto& name = o->get_lnames().front();
        if (name == "help") continue;
        j[name] = option_value(o);
    }
    return j;
}

// ---------------------------------------------------------------------------
// subcommands

struct Args {
    // shared
    int n = 1;
    double q = 0.5, k = 0.05, alpha = 0.0;
    // bessel-eval / outer-eval
    double nu = 0.1, x = 1.0;
    std::string method = "auto";
    std::optional<double> r, R;
    bool allow_below = false;
    // inner-solve / solve
    double r_max_inner = 200.0, h = 0.02;
    std::string k_init = "auto", r_max = "auto";
    double R_target = 2.0;
    long max_nodes = 400000;
    int max_iter = 50;
    std::string out, profile_out = "profile.csv";
    // kappa
    std::string cn = "auto", cn_sign = "printed";
    // sweep
    std::vector<double> q_list;
    // physical / field
    std::string from_solve, solve_report;
    int nx = 512, ny = 512, chirality = 1;
    double extent = 40.0, t = 0.0;
    std::string format = "auto";
    bool no_extend = false;
    // selfcheck
    bool skip_solve = false;
};

inline CnSign parse_sign(const std::string& s)
{
    if (s == "printed") return CnSign::printed;
    if (s == "corrected") return CnSign::corrected;
    throw ConfigError("--cn-sign must be printed or corrected");
}

inline json cmd_bessel(const Args& a)
{
    json j{{"nu", a.nu}, {"x", a.x}};
    if (a.method == "quadrature") {
        j["method"] = "quadrature";
        j["value"] = k_imag_quadrature(a.nu, a.x, 0).value;
        j["derivative"] = k_imag_quadrature(a.nu, a.x, 1).value;
        j["second"] = k_imag_quadrature(a.nu, a.x, 2).value;
    } else {
        ImagOrderEval e;
        if (a.method == "auto") e = k_imag(a.nu, a.x);
        else if (a.method == "series") e = k_imag_series(a.nu, a.x);
        else if (a.method == "asymptotic") e = k_imag_asym(a.nu, a.x);
        else throw ConfigError("--method must be auto, series, asymptotic or quadrature");
        j["method"] = to_string(e.method);
        j["value"] = e.value;
        j["derivative"] = e.derivative;
        j["second"] = e.second;
        j["err_estimate"] = e.err_estimate;
    }
    j["log_derivative"] = k_imag_log_derivative(a.nu, a.x);
    try {
        j["log_value"] = log_k_imag(a.nu, a.x);
    } catch (const DomainError&) {
        j["log_value"] = nullptr; // K not positive here
    }
    return j;
}

inline json cmd_outer(const Args& a)
{
    const OuterParams p(a.n, a.q, a.k);
    if (a.r.has_value() == a.R.has_value()) throw ConfigError("outer-eval: give exactly one of --r, --R");
    const double r = a.r ? *a.r : *a.R / p.eps();
    OuterOptions o;
    o.allow_below_validated = a.allow_below;
    const auto pt = outer_at(p, r, o);
    return {{"n", a.n},     {"q", a.q},     {"k", a.k},       {"nu", p.nu},     {"eps", p.eps()},
            {"r", pt.r},    {"R", pt.R},    {"v", pt.v},      {"dv", pt.dv},    {"ddv", pt.ddv},
            {"f", pt.f},    {"df", pt.df},  {"ddf", pt.ddf},  {"validated_min_R", validated_min_R(p.nu)},
            {"riccati_residual", riccati_residual(p, pt.R, o)}};
}

inline json cmd_inner(RunConfig& rc, const Args& a)
{
    InnerOptions o;
    o.h = a.h;
    const auto p = solve_f0(a.n, a.r_max_inner, rc.tol, o);
    json j{{"n", a.n},         {"r_max", p.r_max},         {"h", p.h},
           {"c_f", p.c_f},     {"iterations", p.iterations}, {"residual", p.residual}};
    if (p.r_max >= 100.0) {
        const auto c = compute_Cn(p);
        j["C_n"] = c.C_n;
        j["C_n_gap"] = c.convergence_gap;
        j["fitted_c3"] = c.fitted_c3;
    }
    std::string csv = "r,f0,df0,J1\n";
    for (std::size_t i = 0; i < p.r.size(); ++i) csv += csv_line({p.r[i], p.f0[i], p.df0[i], p.J1[i]});
    const std::string name = a.out.empty() ? "inner_profile.csv" : a.out;
    write_text(rc, name, csv);
    j["profile_csv"] = name;
    return j;
}

inline json cmd_kappa(const Args& a)
{
    double C;
    std::string src;
    if (a.cn == "auto") {
        C = matching_constant(a.n).C_n;
        src = "computed (core profile to r=200)";
    } else {
        try {
            std::size_t used = 0;
            C = std::stod(a.cn, &used);
            if (used != a.cn.size()) throw std::invalid_argument(a.cn);
        } catch (const std::exception&) {
            throw ConfigError("--cn must be auto or a number, got '" + a.cn + "'");
        }
        src = "given";
    }
    const auto w = kappa_symmetric(a.n, a.q, C, parse_sign(a.cn_sign));
    return {{"n", a.n},
            {"q", a.q},
            {"C_n", C},
            {"C_n_source", src},
            {"cn_sign", to_string(w.sign)},
            {"log_kappa", w.log_kappa},
            {"log10_kappa", w.log_kappa / std::log(10.0)},
            {"kappa", w.kappa},
            {"underflow", w.underflow},
            {"mu_bar", w.mu_bar}};
}

inline SolveOptions solve_options(const RunConfig& rc, const Args& a)
{
    SolveOptions o;
    o.h = a.h;
    o.R_target = a.R_target;
    o.max_nodes = a.max_nodes;
    o.max_iter = a.max_iter;
    o.inner_tol = rc.tol;
    if (a.r_max != "auto") {
        try {
            o.r_max = std::stod(a.r_max);
        } catch (const std::exception&) {
            throw ConfigError("--r-max must be auto or a number");
        }
        if (!(o.r_max > 0)) throw ConfigError("--r-max must be positive");
    }
    return o;
}

inline json cmd_solve(RunConfig& rc, const Args& a)
{
    const auto o = solve_options(rc, a);
    std::optional<double> k0;
    if (a.k_init != "auto") {
        try {
            k0 = std::stod(a.k_init);
        } catch (const std::exception&) {
            throw ConfigError("--k-init must be auto or a number");
        }
    }
    const auto s = solve_spiral(a.n, a.q, o, k0);
    json rep = report_json(s.report);
    json full = rep;
    full["options"] = {{"h", o.h},           {"R_target", o.R_target},   {"r_max", a.r_max},
                       {"tol", o.inner_tol}, {"max_nodes", o.max_nodes}, {"max_iter", o.max_iter}};
    full["profile"] = {{"r", s.profile.r}, {"f", s.profile.f}, {"df", s.profile.df}, {"v", s.profile.v}};
    const std::string name = a.out.empty() ? "solve_report.json" : a.out;
    write_text(rc, name, full.dump(1) + "\n");
    std::string csv = "r,f,df,v,I\n";
    const auto& p = s.profile;
    for (std::size_t i = 0; i < p.r.size(); ++i) csv += csv_line({p.r[i], p.f[i], p.df[i], p.v[i], p.I[i]});
    write_text(rc, a.profile_out, csv);
    rep["report_json"] = name;
    rep["profile_csv"] = a.profile_out;
    return rep;
}

inline json cmd_sweep(RunConfig& rc, const Args& a, bool& failed)
{
    if (a.q_list.empty()) throw ConfigError("sweep: --q-list is required");
    const auto o = solve_options(rc, a);
    const auto reps = wavenumber_sweep(a.n, a.q_list, o);
    std::string csv =
        "q,k_numeric,log_k_numeric,k_asym,ratio,abs_ratio_minus_1_times_logq,iters,residual,ratio_corrected,converged\n";
    json rows = json::array();
    failed = false;
    for (const auto& r : reps) {
        if (!r.converged) {
            failed = true;
            csv += fmt17(r.q) + ",nan,nan,nan,nan,nan,0,nan,nan,0\n";
        } else {
            csv += fmt17(r.q) + ',' + fmt17(r.k_numeric) + ',' + fmt17(r.log_k_numeric) + ',' +
                   fmt17(r.k_asymptotic) + ',' + fmt17(r.ratio) + ',' + fmt17(r.abs_ratio_minus_1_times_logq) +
                   ',' + std::to_string(r.newton_iterations) + ',' + fmt17(r.system_residual) + ',' +
                   fmt17(r.ratio_corrected) + ",1\n";
        }
        rows.push_back(report_json(r));
    }
    const std::string name = a.out.empty() ? "sweep.csv" : a.out;
    write_text(rc, name, csv);
    return {{"n", a.n}, {"points", reps.size()}, {"failed", failed}, {"csv", name}, {"rows", rows}};
}

inline json cmd_physical(const Args& a)
{
    double q = a.q, k = a.k;
    if (!a.from_solve.empty()) {
        const auto j = read_json_file(a.from_solve);
        q = j.at("q").get<double>();
        k = j.at("k_numeric").get<double>();
    }
    const auto t = physical_from_reduced(a.alpha, q, k);
    const auto [d0, d1] = dispersion_check(t.alpha, t.beta, t.Omega, t.k_star, t.C);
    const auto [i1, i2] = reduction_identities(t);
    return {{"alpha", t.alpha},          {"beta", t.beta},      {"q", t.q},
            {"k", t.k},                  {"Omega_hat", t.Omega_hat}, {"Omega", t.Omega},
            {"k_star", t.k_star},        {"C", t.C},            {"a", t.a},
            {"delta", t.delta},          {"dispersion_residual", {d0, d1}},
            {"identity_residual", {i1, i2}}, {"warnings", t.warnings}};
}

inline json cmd_field(RunConfig& rc, const Args& a)
{
    if (a.solve_report.empty()) throw ConfigError("field: --solve-report is required");
    const auto rep = read_json_file(a.solve_report);
    const auto prof = profile_from_json(rep);
    const auto phys = physical_from_reduced(a.alpha, prof.q, prof.k);
    const double need = std::hypot(a.extent, a.extent) / phys.a * (1 + 1e-9);
    const CompositeProfile comp(prof, a.no_extend ? 0.0 : need);
    FieldSpec spec;
    spec.nx = a.nx;
    spec.ny = a.ny;
    spec.extent = a.extent;
    spec.t = a.t;
    spec.chirality = a.chirality;
    spec.alpha = a.alpha;
    const auto g = sample_field(comp, spec);
    const std::string name = a.out.empty() ? "field.csv" : a.out;
    std::string fmt = a.format;
    if (fmt == "auto") fmt = std::filesystem::path(name).extension() == ".json" ? "json" : "csv";
    if (fmt == "csv") write_field_csv(g, out_path(rc, name));
    else if (fmt == "json") write_field_json(g, out_path(rc, name));
    else throw ConfigError("--format must be auto, csv or json");
    rc.outputs.push_back(name);
    json j = field_metadata(g);
    j["file"] = name;
    j["format"] = fmt;
    j["profile_extended_to"] = comp.r_end;
    j["abs_at_center"] = (g.nx % 2 && g.ny % 2) ? json(g.abs[g.index(g.nx / 2, g.ny / 2)]) : json(nullptr);
    if (g.nx % 2 && g.ny % 2 && g.k_star != 0.0) {
        try {
            const auto s = measure_arm_spacing(g, a.extent / 3);
            j["arm_spacing_measured"] = s.measured;
            j["arm_spacing_expected"] = s.expected;
            j["arm_spacing_rel_error"] = s.rel_error;
        } catch (const DomainError&) {
            // too few arms inside the window
        }
    }
    return j;
}

inline json criterion_json(const checks::Criterion& c)
{
    json rows = json::array();
    for (const auto& r : c.rows)
        rows.push_back({{"name", r.name}, {"value", jnum(r.value)}, {"limit", r.limit}, {"margin", jnum(r.margin)},
                        {"pass", r.pass}});
    return {{"id", c.id}, {"title", c.title}, {"pass", c.pass()}, {"note", c.note}, {"rows", rows}};
}

inline void print_table(const checks::Criterion& c, std::ostream& out)
{
    out << (c.pass() ? "PASS " : "FAIL ") << c.title << (c.note.empty() ? "" : "  [" + c.note + "]") << '\n';
    for (const auto& r : c.rows)
        out << "    " << (r.pass ? "ok  " : "BAD ") << std::left << std::setw(52) << r.name << " value "
            << std::setw(13) << num(r.value) << " limit " << std::setw(9) << num(r.limit) << " margin "
            << num(r.margin) << '\n';
}

inline json cmd_selfcheck(const RunConfig& rc, const Args& a, std::ostream& out, bool& all_pass)
{
    std::vector<checks::Criterion> cs;
    cs.push_back(checks::bessel_cross_validation());
    cs.push_back(checks::riccati_and_signs());
    cs.push_back(checks::core_profile());
    cs.push_back(checks::matching_constant_convergence());
    cs.push_back(checks::algebraic_identities());
    if (!a.skip_solve) {
        const auto plus = solve_spiral(1, 0.5);
        const auto minus = solve_spiral(1, -0.5);
        cs.push_back(checks::full_solve(plus));
        cs.push_back(checks::symmetry(plus, minus));
        cs.push_back(checks::field_export(plus, rc.out_dir));
    }
    all_pass = true;
    json j = json::array();
    for (const auto& c : cs) {
        all_pass = all_pass && c.pass();
        if (!rc.quiet && !rc.json_out) print_table(c, out);
        j.push_back(criterion_json(c));
    }
    return {{"all_pass", all_pass}, {"suites", j}};
}

// ---------------------------------------------------------------------------

inline void write_manifest(RunConfig& rc, const json& result, int code, const std::string& error)
{
    json m{{"program", "spiral_cli"},
           {"command", rc.command},
           {"config", rc.resolved},
           {"outputs", rc.outputs},
           {"exit_code", code}};
    if (!result.is_null()) m["result"] = result;
    if (!error.empty()) m["error"] = error;
    const auto path = out_path(rc, "manifest.json");
    std::ofstream os(path);
    if (!os) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    os << m.dump(2) << '\n';
}

/// Entry point. Exit codes: 0 success, 1 domain/configuration error, 2 numerical failure.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"n-armed spiral waves of the complex Ginzburg-Landau equation", "spiral_cli"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig rc;
    Args a;
    app.add_option("--tol", rc.tol, "Newton tolerance")->check(CLI::PositiveNumber);
    app.add_option("--out-dir", rc.out_dir, "directory for outputs and manifest.json");
    app.add_flag("--quiet", rc.quiet, "no stdout");
    app.add_flag("--json", rc.json_out, "print the result as JSON");
    app.add_option("--config", rc.config_path, "JSON file of option defaults; flags override");

    auto* be = app.add_subcommand("bessel-eval", "K_{i nu}(x) and derivatives");
    be->add_option("--nu", a.nu)->required();
    be->add_option("--x", a.x)->required()->check(CLI::PositiveNumber);
    be->add_option("--method", a.method)->check(CLI::IsMember({"auto", "series", "asymptotic", "quadrature"}));

    auto* oe = app.add_subcommand("outer-eval", "outer dominant pair (f_out, v_out)");
    oe->add_option("--n", a.n);
    oe->add_option("--q", a.q)->required();
    oe->add_option("--k", a.k)->required();
    oe->add_option("--r", a.r);
    oe->add_option("--R", a.R);
    oe->add_flag("--allow-below-validated", a.allow_below);

    auto* is = app.add_subcommand("inner-solve", "core profile f0 and C_n");
    is->add_option("--n", a.n);
    is->add_option("--r-max", a.r_max_inner)->check(CLI::PositiveNumber);
    is->add_option("--step", a.h, "grid spacing")->check(CLI::PositiveNumber);
    is->add_option("--out", a.out, "profile CSV");

    auto* ka = app.add_subcommand("kappa", "closed-form selected wavenumber");
    ka->add_option("--n", a.n);
    ka->add_option("--q", a.q)->required();
    ka->add_option("--cn", a.cn, "auto or a value");
    ka->add_option("--cn-sign", a.cn_sign)->check(CLI::IsMember({"printed", "corrected"}));

    auto add_solver_opts = [&](CLI::App* s) {
        s->add_option("--n", a.n);
        s->add_option("--step", a.h, "grid spacing")->check(CLI::PositiveNumber);
        s->add_option("--r-max", a.r_max, "auto or a fixed matching radius");
        s->add_option("--r-target", a.R_target, "k|q| r_max when --r-max is auto")->check(CLI::PositiveNumber);
        s->add_option("--max-nodes", a.max_nodes)->check(CLI::PositiveNumber);
        s->add_option("--max-iter", a.max_iter)->check(CLI::Range(1, 50));
    };
    auto* so = app.add_subcommand("solve", "full spiral solve at one q");
    add_solver_opts(so);
    so->add_option("--q", a.q)->required();
    so->add_option("--k-init", a.k_init, "auto or a value");
    so->add_option("--out", a.out, "report JSON");
    so->add_option("--profile-out", a.profile_out, "profile CSV");

    auto* sw = app.add_subcommand("sweep", "descending sweep in q");
    add_solver_opts(sw);
    sw->add_option("--q-list", a.q_list)->delimiter(',')->required()->multi_option_policy(
        CLI::MultiOptionPolicy::TakeAll);
    sw->add_option("--out", a.out, "report CSV");

    auto* ph = app.add_subcommand("physical", "map (alpha, q, k) to CGL parameters");
    ph->add_option("--alpha", a.alpha);
    ph->add_option("--q", a.q);
    ph->add_option("--k", a.k);
    ph->add_option("--from-solve", a.from_solve, "take q, k from a solve report");

    auto* fi = app.add_subcommand("field", "sample and export the spiral field");
    fi->add_option("--solve-report", a.solve_report)->required();
    fi->add_option("--nx", a.nx)->check(CLI::PositiveNumber);
    fi->add_option("--ny", a.ny)->check(CLI::PositiveNumber);
    fi->add_option("--extent", a.extent)->check(CLI::PositiveNumber);
    fi->add_option("--t", a.t);
    fi->add_option("--chirality", a.chirality)->check(CLI::IsMember({-1, 1}));
    fi->add_option("--alpha", a.alpha);
    fi->add_option("--out", a.out);
    fi->add_option("--format", a.format)->check(CLI::IsMember({"auto", "csv", "json"}));
    fi->add_flag("--no-extend", a.no_extend, "refuse grids beyond the solved radius");

    auto* sc = app.add_subcommand("selfcheck", "invariant suites with margins");
    sc->add_flag("--skip-solve", a.skip_solve, "only the suites that need no full solve");

    if (args.empty()) {
        err << app.help();
        return 1;
    }
    json result;
    int code = 0;
    std::string error;
    try {
        args = inject_config(args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }

    CLI::App* sub = app.get_subcommands().front();
    rc.command = sub->get_name();
    rc.resolved = resolve_options(app);
    rc.resolved.update(resolve_options(*sub));
    try {
        if (!std::filesystem::is_directory(rc.out_dir))
            throw ConfigError("--out-dir " + rc.out_dir + " is not a directory");
        if (rc.command == "bessel-eval") result = cmd_bessel(a);
        else if (rc.command == "outer-eval") result = cmd_outer(a);
        else if (rc.command == "inner-solve") result = cmd_inner(rc, a);
        else if (rc.command == "kappa") result = cmd_kappa(a);
        else if (rc.command == "solve") result = cmd_solve(rc, a);
        else if (rc.command == "sweep") {
            bool failed = false;
            result = cmd_sweep(rc, a, failed);
            if (failed) {
                code = 2;
                error = "some sweep points did not converge";
            }
        } else if (rc.command == "physical") result = cmd_physical(a);
        else if (rc.command == "field") result = cmd_field(rc, a);
        else if (rc.command == "selfcheck") {
            bool ok = true;
            result = cmd_selfcheck(rc, a, out, ok);
            if (!ok) {
                code = 2;
                error = "selfcheck: some suites failed";
            }
            if (rc.json_out && !rc.quiet) out << result.dump(2) << '\n';
        }
        if (rc.command != "selfcheck") print_result(rc, result, out);
    } catch (const ConvergenceError& e) {
        code = 2;
        error = e.what();
    } catch (const DomainError& e) {
        code = 1;
        error = e.what();
    } catch (const ConfigError& e) {
        code = 1;
        error = e.what();
    } catch (const std::system_error& e) {
        code = 1;
        error = e.what();
    } catch (const json::exception& e) {
        code = 1;
        error = std::string("malformed input: ") + e.what();
    } catch (const std::exception& e) {
        code = 2;
        error = e.what();
    }
    if (!error.empty()) err << "error: " << error << '\n';
    try {
        write_manifest(rc, result, code, error);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        if (code == 0) code = 1;
    }
    return code;
}

} // namespace spiral::cli
