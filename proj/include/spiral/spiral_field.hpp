#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "bvp_solver.hpp"
#include "errors.hpp"
#include "fd.hpp"
#include "inner_core.hpp"
#include "interp.hpp"
#include "outer_dominant.hpp"
#include "physical_map.hpp"

namespace spiral {

/// Theta(r) = int_0^r v, tabulated on the profile nodes.
struct PhaseTable {
    std::vector<double> r, theta, v, dv;

    double end_slope() const { return v.back(); }
};

/// Cumulative phase by 8-point interpolatory quadrature of v on each
/// interval, with v' from local Fornberg stencils for Hermite evaluation.
inline PhaseTable theta_of_r(const RadialProfile& p, int stencil = 8)
{
    const std::size_t N = p.r.size();
    if (N < 2 || p.v.size() != N) throw ConfigError("theta_of_r: profile needs at least two nodes");
    const std::size_t m = std::min<std::size_t>(stencil, N);
    auto window = [&](std::size_t i) {
        // stencil centred on [r_i, r_{i+1}] and clamped to the table
        std::size_t lo = i + 1 >= m / 2 ? i + 1 - m / 2 : 0;
        lo = std::min(lo, N - m);
        return lo;
    };
    PhaseTable t;
    t.r = p.r;
    t.v = p.v;
    t.theta.assign(N, 0.0);
    t.dv.assign(N, 0.0);
    std::vector<double> xs(m);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const std::size_t lo = window(i);
        for (std::size_t j = 0; j < m; ++j) xs[j] = p.r[lo + j];
        const auto w = fd::integration_weights(xs, p.r[i], p.r[i + 1]);
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += w[j] * p.v[lo + j];
        t.theta[i + 1] = t.theta[i] + s;
    }
    for (std::size_t i = 0; i < N; ++i) {
        std::size_t lo = i >= m / 2 ? i - m / 2 : 0;
        lo = std::min(lo, N - m);
        for (std::size_t j = 0; j < m; ++j) xs[j] = p.r[lo + j];
        const auto c = fd::fornberg(p.r[i], xs, 1);
        double d = 0.0;
        for (std::size_t j = 0; j < m; ++j) d += c[j][1] * p.v[lo + j];
        t.dv[i] = d;
    }
    return t;
}

/// Solved profile on [0, r_max] continued by the outer dominant (f_out, v_out)
/// up to r_end. Beyond r_max the phase is Theta(r_max) plus the exact
/// primitive of v_out, so only f' jumps at the seam (by the unmatched m_df).
class CompositeProfile {
public:
    int n = 1;
    double q = 0.0, k = 0.0;
    double r_max = 0.0; ///< seam between solved and outer parts
    double r_end = 0.0;

    CompositeProfile() = default;

    CompositeProfile(const RadialProfile& p, double r_end_ = 0.0, double dr_out = 0.25)
        : n(p.n), q(p.q), k(p.k), r_max(p.r.back()), r_end(std::max(r_end_, p.r.back()))
    {
        if (!(dr_out > 0.0)) throw ConfigError("CompositeProfile: dr_out must be positive");
        const auto ph = theta_of_r(p);
        std::vector<double> r = p.r, f = p.f, df = p.df, th = ph.theta, v = ph.v, dv = ph.dv;
        if (r_end > r_max) {
            const int m = static_cast<int>(std::ceil((r_end - r_max) / dr_out));
            const bool twisted = q != 0.0 && k > 0.0;
            OuterParams op;
            double P0 = 0.0;
            if (twisted) {
                op = OuterParams(n, q, k);
                P0 = v_out_primitive(op, r_max);
            }
            for (int i = 1; i <= m; ++i) {
                const double ri = r_max + (r_end - r_max) * i / m;
                r.push_back(ri);
                if (twisted) {
                    const auto o = outer_at(op, ri);
                    f.push_back(o.f);
                    df.push_back(o.df);
                    v.push_back(o.v);
                    dv.push_back(o.dv);
                    th.push_back(ph.theta.back() + v_out_primitive(op, ri) - P0);
                } else {
                    double d = 0.0;
                    f.push_back(f0_far_field(n, ri, &d));
                    df.push_back(d);
                    v.push_back(0.0);
                    dv.push_back(0.0);
                    th.push_back(ph.theta.back());
                }
            }
        }
        f_ = interp::Hermite(r, f, df);
        theta_ = interp::Hermite(r, th, v, dv);
    }

    double f(double r) const { return f_(r); }
    double theta(double r) const { return theta_(r); }
    double v(double r) const { return theta_.derivative(r); }

private:
    interp::Hermite f_, theta_;
};

struct FieldSpec {
    int nx = 513, ny = 513;
    double extent = 40.0; ///< half-width, physical radius units
    double t = 0.0;
    int chirality = +1;
    double alpha = 0.0;
};

/// Samples of A(t, x, y) = f(rho/a)/delta exp(i(Omega t + Theta(rho/a) + chi n phi)),
/// row-major with x fastest.
struct FieldGrid {
    int nx = 0, ny = 0;
    double extent = 0.0, t = 0.0;
    int n = 1, chirality = +1;
    double q = 0.0, k = 0.0;
    double alpha = 0.0, Omega = 0.0, k_star = 0.0, a = 1.0, delta = 1.0;
    std::vector<double> x, y;
    std::vector<double> re, im, abs;

    bool empty() const { return re.empty(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
};

inline double grid_coord(int i, int m, double extent)
{
    return m == 1 ? 0.0 : -extent + 2.0 * extent * i / (m - 1);
}

inline FieldGrid sample_field(const CompositeProfile& c, const FieldSpec& spec)
{
    if (spec.nx < 1 || spec.ny < 1) throw ConfigError("sample_field: nx, ny must be positive");
    if (!(spec.extent > 0.0)) throw ConfigError("sample_field: extent must be positive");
    if (spec.chirality != 1 && spec.chirality != -1) throw ConfigError("sample_field: chirality must be +1 or -1");
    const auto phys = physical_from_reduced(spec.alpha, c.q, c.k);
    const double rho_max = std::hypot(spec.extent, spec.extent);
    if (rho_max > phys.a * c.r_end * (1 + 1e-12))
        throw DomainError("sample_field: grid reaches rho=" + num(rho_max) + " beyond the profile edge " +
                          num(phys.a * c.r_end) + "; extend the profile");
    FieldGrid g;
    g.nx = spec.nx;
    g.ny = spec.ny;
    g.extent = spec.extent;
    g.t = spec.t;
    g.n = c.n;
    g.chirality = spec.chirality;
    g.q = c.q;
    g.k = c.k;
    g.alpha = spec.alpha;
    g.Omega = phys.Omega;
    g.k_star = phys.k_star;
    g.a = phys.a;
    g.delta = phys.delta;
    for (int i = 0; i < g.nx; ++i) g.x.push_back(grid_coord(i, g.nx, g.extent));
    for (int j = 0; j < g.ny; ++j) g.y.push_back(grid_coord(j, g.ny, g.extent));
    const std::size_t total = static_cast<std::size_t>(g.nx) * g.ny;
    g.re.resize(total);
    g.im.resize(total);
    g.abs.resize(total);
    const double wt = g.Omega * g.t;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double rho = std::hypot(g.x[i], g.y[j]);
            const double r = std::min(rho / g.a, c.r_end);
            const double amp = c.f(r) / g.delta;
            const double phase = wt + c.theta(r) + g.chirality * g.n * std::atan2(g.y[j], g.x[i]);
            const std::size_t id = g.index(i, j);
            g.re[id] = amp * std::cos(phase);
            g.im[id] = amp * std::sin(phase);
            g.abs[id] = amp;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Export

inline std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void check_exportable(const FieldGrid& g)
{
    if (g.empty() || g.x.empty() || g.y.empty()) throw ConfigError("export: empty field grid");
}

inline std::ofstream open_for_write(const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    return os;
}

inline void finish_write(std::ofstream& os, const std::string& path)
{
    os.flush();
    if (!os) throw std::system_error(errno, std::generic_category(), "write failed for " + path);
}

inline void write_field_csv(const FieldGrid& g, const std::string& path)
{
    check_exportable(g);
    auto os = open_for_write(path);
    os << "x,y,re,im,abs\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const auto id = g.index(i, j);
            os << fmt17(g.x[i]) << ',' << fmt17(g.y[j]) << ',' << fmt17(g.re[id]) << ',' << fmt17(g.im[id])
               << ',' << fmt17(g.abs[id]) << '\n';
        }
    finish_write(os, path);
}

inline nlohmann::json field_metadata(const FieldGrid& g)
{
    return {{"nx", g.nx},         {"ny", g.ny},         {"extent", g.extent}, {"t", g.t},
            {"n", g.n},           {"q", g.q},           {"k", g.k},           {"chirality", g.chirality},
            {"alpha", g.alpha},   {"Omega", g.Omega},   {"k_star", g.k_star}, {"a", g.a},
            {"delta", g.delta},   {"layout", "row-major, x fastest, x_i = -extent + 2 extent i/(nx-1)"}};
}

inline void write_field_json(const FieldGrid& g, const std::string& path)
{
    check_exportable(g);
    auto os = open_for_write(path);
    // hand-written so every number carries 17 significant digits
    os << "{\"metadata\":" << field_metadata(g).dump() << ",\"re\":[";
    for (std::size_t i = 0; i < g.re.size(); ++i) os << (i ? "," : "") << fmt17(g.re[i]);
    os << "],\"im\":[";
    for (std::size_t i = 0; i < g.im.size(); ++i) os << (i ? "," : "") << fmt17(g.im[i]);
    os << "]}\n";
    finish_write(os, path);
}

struct CsvRow {
    double x, y, re, im, abs;
};

inline std::vector<CsvRow> read_field_csv(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::system_error(errno, std::generic_category(), "cannot open " + path);
    std::string line;
    std::getline(is, line);
    if (line != "x,y,re,im,abs") throw ConfigError("read_field_csv: unexpected header '" + line + "'");
    std::vector<CsvRow> rows;
    while (std::getline(is, line)) {
        CsvRow r{};
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &r.x, &r.y, &r.re, &r.im, &r.abs) != 5)
            throw ConfigError("read_field_csv: malformed line '" + line + "'");
        rows.push_back(r);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Arm spacing from the sampled grid

struct ArmSpacing {
    double measured = 0.0; ///< n times the mean spacing of rising zero crossings of Re A along a ray
    double expected = 0.0; ///< 2 pi n / |k_*|
    double rel_error = 0.0;
    int crossings = 0;
};

/// Rising zero crossings of Re A along the four half-axes, beyond rho_min.
inline ArmSpacing measure_arm_spacing(const FieldGrid& g, double rho_min)
{
    check_exportable(g);
    if (!(g.k_star != 0.0)) throw DomainError("measure_arm_spacing: k_* = 0, no arms to measure");
    const int ci = g.nx / 2, cj = g.ny / 2;
    if (g.nx % 2 == 0 || g.ny % 2 == 0) throw ConfigError("measure_arm_spacing: need odd nx, ny (origin on a node)");
    double sum = 0.0;
    int gaps = 0, total = 0;
    auto ray = [&](int di, int dj) {
        std::vector<double> cross;
        double prev_s = 0.0, prev_v = 0.0;
        bool have = false;
        for (int s = 0;; ++s) {
            const int i = ci + di * s, j = cj + dj * s;
            if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) break;
            const double rho = std::hypot(g.x[i], g.y[j]);
            const double val = g.re[g.index(i, j)];
            if (have && rho >= rho_min && prev_v < 0.0 && val >= 0.0)
                cross.push_back(prev_s + (rho - prev_s) * (-prev_v) / (val - prev_v));
            prev_s = rho;
            prev_v = val;
            have = true;
        }
        total += static_cast<int>(cross.size());
        if (cross.size() >= 2) {
            sum += cross.back() - cross.front();
            gaps += static_cast<int>(cross.size()) - 1;
        }
    };
    ray(1, 0);
    ray(-1, 0);
    ray(0, 1);
    ray(0, -1);
    if (gaps == 0) throw DomainError("measure_arm_spacing: fewer than two crossings per ray beyond rho_min");
    ArmSpacing a;
    a.crossings = total;
    a.measured = g.n * sum / gaps;
    a.expected = 2 * M_PI * g.n / std::fabs(g.k_star);
    a.rel_error = std::fabs(a.measured / a.expected - 1);
    return a;
}

} // namespace spiral
