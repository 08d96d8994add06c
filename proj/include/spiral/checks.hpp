#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "asymptotic_wavenumber.hpp"
#include "bvp_solver.hpp"
#include "inner_core.hpp"
#include "outer_dominant.hpp"
#include "physical_map.hpp"
#include "specfun.hpp"
#include "spiral_field.hpp"

namespace spiral::checks {

/// One measured quantity against its limit. margin > 0 means pass.
struct Row {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Row> rows;
    std::string note;

    bool pass() const
    {
        return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.pass; });
    }
    void at_most(std::string name, double value, double limit)
    {
        rows.push_back({std::move(name), value, limit, limit - value, value <= limit});
    }
    void positive(std::string name, double value)
    {
        rows.push_back({std::move(name), value, 0.0, value, value > 0.0});
    }
    void holds(std::string name, bool ok)
    {
        rows.push_back({std::move(name), ok ? 1.0 : 0.0, 1.0, ok ? 1.0 : -1.0, ok});
    }
};

inline std::vector<double> log_grid(double a, double b, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, double(i) / (n - 1));
    return g;
}

inline double rel_err(double a, double b) { return std::fabs(a / b - 1.0); }

inline Criterion bessel_cross_validation()
{
    Criterion c{1, "Bessel cross-validation", {}, {}};
    double ws = 0, wa = 0;
    for (double nu : {0.02, 0.05, 0.1, 0.3}) {
        for (double x : log_grid(0.01, 2.0, 25))
            ws = std::max(ws, rel_err(k_imag_series(nu, x).value, k_imag_quadrature(nu, x).value));
        for (double x : log_grid(10.0, 100.0, 15))
            wa = std::max(wa, rel_err(k_imag_asym(nu, x).value, k_imag_quadrature(nu, x).value));
    }
    c.at_most("series vs quadrature, x in [0.01, 2]", ws, 1e-9);
    c.at_most("asymptotic vs quadrature, x in [10, 100]", wa, 1e-6);
    return c;
}

inline Criterion riccati_and_signs()
{
    Criterion c{2, "Riccati residual and outer sign suite", {}, {}};
    double worst = 0;
    double m_dv = INFINITY, m_v = INFINITY, m_df = INFINITY, m_k = INFINITY;
    for (double nu : {0.05, 0.1, 0.3}) {
        // k on the selected branch, order mu e^{-pi/(2 nu)}
        const OuterParams p(1, nu, 1.2 * std::exp(-M_PI / (2 * nu)));
        const auto grid = log_grid(validated_min_R(nu), 1e3, 200);
        for (double R : grid) worst = std::max(worst, riccati_residual(p, R));
        const auto s = outer_property_scan(p, grid);
        m_dv = std::min(m_dv, s.margin_dV0);
        m_v = std::min(m_v, s.margin_V0);
        m_df = std::min(m_df, s.margin_dF0);
        m_k = std::min(m_k, s.margin_K_sign);
    }
    c.at_most("max Riccati residual", worst, 1e-8);
    c.positive("min V0' margin", m_dv);
    c.positive("min -1 - V0 margin", m_v);
    c.positive("min F0' margin", m_df);
    c.positive("min K sign margin", m_k);
    return c;
}

inline double far_sup(const InnerProfile& p)
{
    double s = 0;
    const double n2 = double(p.n) * p.n;
    for (std::size_t i = 0; i < p.r.size(); ++i) {
        const double r = p.r[i];
        if (r < 20 || r > 100) continue;
        s = std::max(s, std::fabs(std::pow(r, 4) * (p.f0[i] - 1 + n2 / (2 * r * r))));
    }
    return s;
}

inline Criterion core_profile()
{
    Criterion c{3, "Core profile f0", {}, {}};
    for (int n : {1, 2, 3}) {
        const auto p = solve_f0(n, 100.0);
        InnerOptions fine;
        fine.h = 0.01;
        const auto pf = solve_f0(n, 100.0, 1e-10, fine);
        const std::string tag = "n=" + std::to_string(n) + ": ";
        c.at_most(tag + "boundary/equation residual", std::max(p.residual, std::fabs(p.f0.front())), 1e-8);
        const double s1 = far_sup(p), s2 = far_sup(pf);
        c.holds(tag + "far-field sup finite", std::isfinite(s1) && s1 > 0);
        c.at_most(tag + "far-field sup change under h/2", std::fabs(s2 - s1) / s1, 0.05);
        double inc = INFINITY;
        for (std::size_t i = 1; i < p.f0.size(); ++i) inc = std::min(inc, p.f0[i] - p.f0[i - 1]);
        c.positive(tag + "min f0 increment", inc);
    }
    return c;
}

inline Criterion matching_constant_convergence()
{
    Criterion c{4, "C_n convergence", {}, {}};
    for (int n : {1, 2}) {
        const auto a = compute_Cn(solve_f0(n, 200.0));
        InnerOptions fine;
        fine.h = 0.01;
        const auto b = compute_Cn(solve_f0(n, 200.0, 1e-10, fine));
        const std::string tag = "n=" + std::to_string(n) + ": ";
        c.at_most(tag + "|C(200) - C(100)|", a.convergence_gap, 1e-6);
        c.at_most(tag + "|C(h) - C(h/2)|", std::fabs(a.C_n - b.C_n), 1e-6);
        c.note += (c.note.empty() ? "" : ", ") + ("C_" + std::to_string(n) + " = " + num(a.C_n));
    }
    return c;
}

inline Criterion algebraic_identities(unsigned seed = 20240601)
{
    Criterion c{5, "Algebraic identities", {}, {}};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double lo = 0;
    for (int i = 0; i < 1000; ++i) {
        const int n = 1 + static_cast<int>(3 * u(rng));
        const double r = 0.05 + 20 * u(rng), f = u(rng), df = u(rng) - 0.5, ddf = 2 * u(rng) - 1;
        const double v = u(rng) - 0.5, dv = u(rng) - 0.5, q = 2 * u(rng) - 1, k = 0.9 * u(rng);
        const auto [a0, a1] = system_residual(r, f, df, ddf, v, dv, SpiralParams::from_k(n, q, k));
        const auto [b0, b1] = lambda_omega_residual(
            r, n, f, df, ddf, v, dv, [](double x) { return 1 - x * x; }, [q](double x) { return -q * x * x; },
            -q * (1 - k * k));
        lo = std::max({lo, std::fabs(a0 - b0), std::fabs(a1 - b1)});
    }
    c.at_most("lambda-omega specialization, 1000 random states", lo, 1e-12);
    std::uniform_real_distribution<double> ua(-1.5, 1.5), uq(-0.9, 0.9), uk(0.0, 0.95);
    double id = 0, disp = 0, rt = 0;
    int used = 0;
    while (used < 1000) {
        PhysicalTriple t;
        const double alpha = ua(rng), q = uq(rng), k = uk(rng);
        try {
            t = physical_from_reduced(alpha, q, k);
        } catch (const DomainError&) {
            continue;
        }
        ++used;
        const auto [i1, i2] = reduction_identities(t);
        const auto [d0, d1] = dispersion_check(t.alpha, t.beta, t.Omega, t.k_star);
        const auto [q2, k2] = reduced_from_physical(t.alpha, t.beta, t.k_star);
        id = std::max({id, std::fabs(i1), std::fabs(i2)});
        disp = std::max({disp, std::fabs(d0), std::fabs(d1)});
        rt = std::max({rt, std::fabs(q2 - q), std::fabs(k2 - k)});
    }
    c.at_most("scaling-map consistency identities, 1000 draws", id, 1e-12);
    c.at_most("dispersion residual, 1000 draws", disp, 1e-12);
    c.at_most("(alpha, q, k) roundtrip", rt, 1e-12);
    return c;
}

inline Criterion full_solve(const SpiralSolution& s)
{
    Criterion c{6, "Full solve at n=1, q=0.5", {}, {}};
    const auto& r = s.report;
    c.holds("converged", r.converged);
    c.at_most("Newton iterations", r.newton_iterations, 50);
    c.at_most("first-integral identity", r.first_integral, 1e-9);
    c.holds("f increasing", r.f_increasing);
    c.holds("0 < f < sqrt(1 - k^2)", r.f_bounded);
    c.holds("v < 0", r.v_signed);
    c.at_most("|m_f|", std::fabs(r.m_f), 1e-6);
    c.at_most("|m_v|", std::fabs(r.m_v), 1e-6);
    c.note = "k = " + num(r.k_numeric) + ", r_max = " + num(r.r_max);
    return c;
}

struct TrendData {
    std::vector<WavenumberReport> reports;
};

inline TrendData wavenumber_sweep_n1()
{
    return {wavenumber_sweep(1, {1.0, 0.8, 0.6, 0.5, 0.4})};
}

/// Trend of k_numeric/kappa over the sweep. The bound in (c) is fixed at 1
/// before looking at data; the realized constant is reported.
inline Criterion wavenumber_trend(const TrendData& d, CnSign sign, double bound = 1.0)
{
    Criterion c{7, std::string("Wavenumber trend (C_n sign: ") + to_string(sign) + ")", {}, {}};
    const auto& reps = d.reports;
    bool ok = !reps.empty();
    for (const auto& r : reps) ok = ok && r.converged;
    c.holds("all sweep solves converged", ok);
    if (!ok) return c;
    double dec = INFINITY;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        dec = std::min(dec, reps[i].k_numeric);
        if (i) dec = std::min(dec, reps[i - 1].k_numeric - reps[i].k_numeric);
    }
    c.positive("(a) k > 0 and strictly decreasing, min margin", dec);
    auto ratio = [&](const WavenumberReport& r) {
        return sign == CnSign::printed ? r.ratio : r.ratio_corrected;
    };
    double worst_rise = -INFINITY, M = 0;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const double e = std::fabs(ratio(reps[i]) - 1);
        M = std::max(M, e * std::fabs(std::log(reps[i].q)));
        if (i) worst_rise = std::max(worst_rise, e - std::fabs(ratio(reps[i - 1]) - 1));
        c.note += (i ? ", " : "") + ("q=" + num(reps[i].q) + ": ratio " + num(ratio(reps[i])));
    }
    c.at_most("(b) max increase of |ratio - 1| along the sweep", worst_rise, 0.0);
    c.at_most("(c) max |ratio - 1| |log q|", M, bound);
    return c;
}

inline Criterion symmetry(const SpiralSolution& plus, const SpiralSolution& minus, double tol = 1e-10)
{
    Criterion c{8, "Symmetry q -> -q", {}, {}};
    const auto& a = plus.profile;
    const auto& b = minus.profile;
    c.holds("same grid", a.r.size() == b.r.size());
    if (a.r.size() != b.r.size()) return c;
    double df = 0, dv = 0;
    for (std::size_t i = 0; i < a.r.size(); ++i) {
        df = std::max(df, std::fabs(a.f[i] - b.f[i]));
        dv = std::max(dv, std::fabs(a.v[i] + b.v[i]));
    }
    c.at_most("max |f(q) - f(-q)|", df, tol);
    c.at_most("max |v(q) + v(-q)|", dv, tol);
    c.at_most("|k(q) - k(-q)| / k", std::fabs(plus.report.k_numeric / minus.report.k_numeric - 1), tol);
    return c;
}

/// Export the q = 0.5 field, read the CSV back and measure arm spacing on it.
inline Criterion field_export(const SpiralSolution& s, const std::string& scratch_dir = "")
{
    Criterion c{9, "Field export and arm spacing", {}, {}};
    const CompositeProfile comp(s.profile, 4300.0);
    FieldSpec spec;
    spec.nx = spec.ny = 1201;
    spec.extent = 3000;
    auto g = sample_field(comp, spec);
    const auto dir = scratch_dir.empty() ? std::filesystem::temp_directory_path().string() : scratch_dir;
    const auto path = (std::filesystem::path(dir) / "spiral_acceptance_field.csv").string();
    write_field_csv(g, path);
    const auto rows = read_field_csv(path);
    std::filesystem::remove(path);
    bool same = rows.size() == g.re.size();
    for (std::size_t i = 0; same && i < rows.size(); ++i) {
        same = rows[i].re == g.re[i] && rows[i].abs == g.abs[i];
        g.re[i] = rows[i].re;
    }
    c.holds("CSV roundtrip exact", same);
    const auto a = measure_arm_spacing(g, 1000.0);
    c.at_most("|L_measured / (2 pi n / k_*) - 1|", a.rel_error, 0.02);
    c.at_most("|A(0)|", g.abs[g.index(spec.nx / 2, spec.ny / 2)], 1e-6);
    c.note = "L = " + num(a.measured) + " vs " + num(a.expected) + " from " + std::to_string(a.crossings) +
             " crossings";
    return c;
}

} // namespace spiral::checks
