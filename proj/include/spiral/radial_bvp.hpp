#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "errors.hpp"
#include "fd.hpp"

namespace spiral {

/// Discretization of the radial system on the uniform grid r_i = i h,
/// i = 0..N, with unknowns f_i and w_i = r_i f_i^2 v_i.
///
///   f'' + f'/r - n^2 f / r^2 + f (1 - f^2) - w^2 / (r^2 f^3) = 0
///   w' = -q r f^2 (1 - f^2 - k^2),                w(0) = 0
///
/// f is extended to r < 0 with parity (-1)^n; near the origin the w
/// quadrature runs in s = r^2 so that w ~ r^{2n+2} keeps its sign.
struct BvpGridSpec {
    double h = 0.02;
    double r_max = 60.0;
    int order = 6;       ///< accuracy order of the derivative stencils (even)
    int quad_points = 8; ///< nodes of the interpolatory quadrature for w
};

struct BvpNewtonOptions {
    double tol = 1e-10;   ///< sup-norm of the residual
    int max_iter = 60;
    bool throw_on_failure = true;
};

struct BvpState {
    std::vector<double> f, w; ///< size N+1, f[0] = w[0] = 0
};

struct BvpResult {
    BvpState state;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

class RadialBvp {
public:
    RadialBvp(int n, const BvpGridSpec& spec) : n_(n), spec_(spec)
    {
        if (n < 1) throw DomainError("RadialBvp: n must be a positive integer");
        if (!(spec.h > 0) || !(spec.r_max > 10 * spec.h))
            throw ConfigError("RadialBvp: need h > 0 and r_max > 10 h");
        if (spec.order < 2 || spec.order % 2 || spec.order > 10)
            throw ConfigError("RadialBvp: stencil order must be even, 2..10");
        if (spec.quad_points < 4 || spec.quad_points % 2)
            throw ConfigError("RadialBvp: quad_points must be even and >= 4");
        N_ = static_cast<int>(std::lround(spec.r_max / spec.h));
        h_ = spec.r_max / N_;
        build_stencils();
    }

    int N() const { return N_; }
    double h() const { return h_; }
    double r(int i) const { return i * h_; }
    int n() const { return n_; }
    const BvpGridSpec& spec() const { return spec_; }

    /// Newton solve with Dirichlet value f(r_max) = f_right.
    BvpResult solve(double q, double k, double f_right, BvpState guess,
                    const BvpNewtonOptions& opt = {}) const
    {
        if (static_cast<int>(guess.f.size()) != N_ + 1 || static_cast<int>(guess.w.size()) != N_ + 1)
            throw ConfigError("RadialBvp::solve: guess has wrong size");
        guess.f[0] = 0.0;
        guess.w[0] = 0.0;
        guess.f[N_] = f_right;
        for (int i = 1; i < N_; ++i)
            if (!(guess.f[i] > 0)) throw ConfigError("RadialBvp::solve: guess must have f > 0");
        BvpResult res;
        res.state = std::move(guess);
        Eigen::VectorXd F;
        double norm = residual(q, k, f_right, res.state, F);
        double merit = F.norm();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        bool analyzed = false;
        for (int it = 0; it < opt.max_iter; ++it) {
            res.iterations = it;
            if (norm <= opt.tol) {
                res.converged = true;
                break;
            }
            auto J = jacobian(q, k, res.state);
            if (!analyzed) {
                lu.analyzePattern(J);
                analyzed = true;
            }
            lu.factorize(J);
            if (lu.info() != Eigen::Success) break;
            Eigen::VectorXd d = lu.solve(-F);
            // keep f positive
            double lam = 1.0;
            for (int i = 1; i < N_; ++i) {
                const double df = d[fi(i)];
                if (res.state.f[i] + lam * df <= 0.0) lam = std::min(lam, -0.5 * res.state.f[i] / df);
            }
            BvpState trial = res.state;
            double tnorm = 0.0;
            for (int ls = 0; ls < 30; ++ls) {
                for (int i = 1; i <= N_; ++i) {
                    trial.f[i] = res.state.f[i] + lam * d[fi(i)];
                    trial.w[i] = res.state.w[i] + lam * d[wi(i)];
                }
                Eigen::VectorXd Ft;
                tnorm = residual(q, k, f_right, trial, Ft);
                const double tm = Ft.norm();
                if (std::isfinite(tnorm) && (tm < (1.0 - 1e-4 * lam) * merit || tnorm <= opt.tol)) {
                    merit = tm;
                    F = std::move(Ft);
                    break;
                }
                lam *= 0.5;
                tnorm = INFINITY;
            }
            if (!std::isfinite(tnorm)) break;
            res.state = trial;
            norm = tnorm;
            res.iterations = it + 1;
        }
        res.residual = norm;
        if (norm <= opt.tol) res.converged = true;
        if (!res.converged && opt.throw_on_failure)
            throw ConvergenceError("RadialBvp: Newton did not converge, residual " + num(norm) +
                                   " after " + std::to_string(res.iterations) + " iterations");
        return res;
    }

    /// Outer data at r_max as functions of x = log k, with x-derivatives.
    struct MatchData {
        double f = 0, v = 0, df_dx = 0, dv_dx = 0;
    };
    using MatchFn = std::function<MatchData(double)>;

    /// Bordered Newton with x = log k as an extra unknown:
    /// f(r_max) = f_out(x) and w/(r f^2)(r_max) = v_out(x).
    BvpResult solve_matched(double q, double& x, const MatchFn& match, BvpState guess,
                            const BvpNewtonOptions& opt = {}, double max_dx = 0.5) const
    {
        if (static_cast<int>(guess.f.size()) != N_ + 1 || static_cast<int>(guess.w.size()) != N_ + 1)
            throw ConfigError("RadialBvp::solve_matched: guess has wrong size");
        guess.f[0] = 0.0;
        guess.w[0] = 0.0;
        for (int i = 1; i <= N_; ++i)
            if (!(guess.f[i] > 0)) throw ConfigError("RadialBvp::solve_matched: guess must have f > 0");
        BvpResult res;
        res.state = std::move(guess);
        MatchData md = match(x);
        Eigen::VectorXd F;
        double norm = residual_matched(q, x, md, res.state, F);
        double merit = F.norm();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        bool analyzed = false;
        const int X = 2 * N_;
        const double rN = r(N_);
        for (int it = 0; it < opt.max_iter; ++it) {
            res.iterations = it;
            if (norm <= opt.tol) break;
            const double k = std::exp(x);
            std::vector<Eigen::Triplet<double>> T;
            triplets(q, k, res.state, T);
            const auto& f = res.state.f;
            const auto& w = res.state.w;
            T.emplace_back(fi(N_), X, -md.df_dx);
            // w rows: d/dx of -integ/h, with dg/dx = 2 q k^2 r f^2 (r form)
            for (int i = 1; i <= N_; ++i) {
                const auto& qw = wq_[i];
                double dsum = 0;
                for (std::size_t j = 0; j < qw.idx.size(); ++j) {
                    const int m = qw.idx[j], a = std::abs(m);
                    const double f2 = f[a] * f[a];
                    double dg = qw.s_var ? q * k * k * f2 : 2 * q * k * k * r(a) * f2;
                    if (m < 0 && !qw.s_var) dg = -dg;
                    dsum += qw.wt[j] * dg;
                }
                if (dsum != 0.0) T.emplace_back(wi(i), X, -dsum / h_);
            }
            const double fN = f[N_];
            T.emplace_back(X, wi(N_), 1.0 / (rN * fN * fN));
            T.emplace_back(X, fi(N_), -2.0 * w[N_] / (rN * fN * fN * fN));
            T.emplace_back(X, X, -md.dv_dx);
            Eigen::SparseMatrix<double> J(X + 1, X + 1);
            J.setFromTriplets(T.begin(), T.end());
            if (!analyzed) {
                lu.analyzePattern(J);
                analyzed = true;
            }
            lu.factorize(J);
            if (lu.info() != Eigen::Success) break;
            Eigen::VectorXd d = lu.solve(-F);
            double lam = 1.0;
            if (std::fabs(d[X]) > max_dx) lam = max_dx / std::fabs(d[X]);
            for (int i = 1; i <= N_; ++i) {
                const double df = d[fi(i)];
                if (f[i] + lam * df <= 0.0) lam = std::min(lam, -0.5 * f[i] / df);
            }
            BvpState trial = res.state;
            double tnorm = INFINITY, tx = x;
            MatchData tmd;
            for (int ls = 0; ls < 30; ++ls) {
                for (int i = 1; i <= N_; ++i) {
                    trial.f[i] = f[i] + lam * d[fi(i)];
                    trial.w[i] = w[i] + lam * d[wi(i)];
                }
                tx = x + lam * d[X];
                Eigen::VectorXd Ft;
                bool ok = tx < 0.0;
                if (ok) {
                    try {
                        tmd = match(tx);
                        tnorm = residual_matched(q, tx, tmd, trial, Ft);
                    } catch (const std::exception&) {
                        ok = false;
                    }
                }
                if (ok && std::isfinite(tnorm) && (Ft.norm() < (1.0 - 1e-4 * lam) * merit || tnorm <= opt.tol)) {
                    merit = Ft.norm();
                    F = std::move(Ft);
                    break;
                }
                lam *= 0.5;
                tnorm = INFINITY;
            }
            if (!std::isfinite(tnorm)) break;
            res.state = trial;
            x = tx;
            md = tmd;
            norm = tnorm;
            res.iterations = it + 1;
        }
        res.residual = norm;
        res.converged = norm <= opt.tol;
        if (!res.converged && opt.throw_on_failure)
            throw ConvergenceError("RadialBvp: matched Newton did not converge, residual " + num(norm) +
                                   " after " + std::to_string(res.iterations) + " iterations");
        return res;
    }

    double residual_matched(double q, double x, const MatchData& md, const BvpState& s,
                            Eigen::VectorXd& F) const
    {
        Eigen::VectorXd G;
        residual(q, std::exp(x), md.f, s, G);
        F.resize(2 * N_ + 1);
        F.head(2 * N_) = G;
        const double rN = r(N_), fN = s.f[N_];
        F[2 * N_] = s.w[N_] / (rN * fN * fN) - md.v;
        return F.cwiseAbs().maxCoeff();
    }

    /// Residual vector; returns its sup-norm.
    double residual(double q, double k, double f_right, const BvpState& s, Eigen::VectorXd& F) const
    {
        F.setZero(2 * N_);
        const auto& f = s.f;
        const auto& w = s.w;
        const double n2 = double(n_) * n_;
        for (int i = 1; i < N_; ++i) {
            const double ri = r(i);
            double d1 = 0, d2 = 0;
            const auto& st = fst_[i];
            for (std::size_t j = 0; j < st.idx.size(); ++j) {
                const double fj = fval(f, st.idx[j]);
                d1 += st.c1[j] * fj;
                d2 += st.c2[j] * fj;
            }
            const double fi_ = f[i];
            F[fi(i)] = d2 + d1 / ri - n2 * fi_ / (ri * ri) + fi_ * (1 - fi_ * fi_) -
                       w[i] * w[i] / (ri * ri * fi_ * fi_ * fi_);
        }
        F[fi(N_)] = f[N_] - f_right;
        for (int i = 1; i <= N_; ++i) {
            const auto& qw = wq_[i];
            double integ = 0;
            for (std::size_t j = 0; j < qw.idx.size(); ++j) integ += qw.wt[j] * gval(q, k, f, qw.idx[j], qw.s_var);
            F[wi(i)] = (w[i] - w[i - 1] - integ) / h_;
        }
        return F.size() ? F.cwiseAbs().maxCoeff() : 0.0;
    }

    /// Cumulative integrals int_0^{r_i} of h(r, f(r)) with the same quadrature
    /// as the w equation. hs is the integrand divided by 2r (s = r^2 form)
    /// used on the first intervals; both must be supplied.
    std::vector<double> cumulative(const std::vector<double>& f,
                                   const std::function<double(double, double)>& hr,
                                   const std::function<double(double, double)>& hs) const
    {
        std::vector<double> out(N_ + 1, 0.0);
        for (int i = 1; i <= N_; ++i) {
            const auto& qw = wq_[i];
            double integ = 0;
            for (std::size_t j = 0; j < qw.idx.size(); ++j) {
                const int m = qw.idx[j];
                const int a = std::abs(m);
                const double fa = f[a];
                double val = qw.s_var ? hs(r(a), fa) : hr(r(a), fa);
                if (m < 0 && !qw.s_var) val = -val; // odd extension of r-integrands
                integ += qw.wt[j] * val;
            }
            out[i] = out[i - 1] + integ;
        }
        return out;
    }

    /// First and second derivative of a nodal array with the f stencils.
    void derivatives(const std::vector<double>& f, std::vector<double>& d1,
                     std::vector<double>& d2) const
    {
        d1.assign(N_ + 1, 0.0);
        d2.assign(N_ + 1, 0.0);
        for (int i = 1; i <= N_; ++i) {
            const auto& st = fst_[i];
            for (std::size_t j = 0; j < st.idx.size(); ++j) {
                const double fj = fval(f, st.idx[j]);
                d1[i] += st.c1[j] * fj;
                d2[i] += st.c2[j] * fj;
            }
        }
        const auto& st = fst_[0];
        for (std::size_t j = 0; j < st.idx.size(); ++j) {
            const double fj = fval(f, st.idx[j]);
            d1[0] += st.c1[j] * fj;
            d2[0] += st.c2[j] * fj;
        }
    }

private:
    struct Stencil {
        std::vector<int> idx; ///< node indices, negative = parity ghost
        std::vector<double> c1, c2;
    };
    struct QuadRule {
        std::vector<int> idx;
        std::vector<double> wt;
        bool s_var = false;
    };

    int fi(int i) const { return 2 * (i - 1); }
    int wi(int i) const { return 2 * (i - 1) + 1; }
    double parity() const { return (n_ % 2) ? -1.0 : 1.0; }

    double fval(const std::vector<double>& f, int m) const
    {
        return m >= 0 ? f[m] : parity() * f[-m];
    }

    /// w-integrand at node |m|; in s-form G = g/(2r)
    double gval(double q, double k, const std::vector<double>& f, int m, bool s_var) const
    {
        const int a = std::abs(m);
        const double fa = f[a], f2 = fa * fa;
        if (s_var) return -0.5 * q * f2 * (1 - f2 - k * k);
        const double g = -q * r(a) * f2 * (1 - f2 - k * k);
        return m < 0 ? -g : g;
    }
    double dgval(double q, double k, const std::vector<double>& f, int m, bool s_var) const
    {
        const int a = std::abs(m);
        const double fa = f[a];
        const double dd = -q * (2 * fa * (1 - k * k) - 4 * fa * fa * fa);
        if (s_var) return 0.5 * dd;
        const double g = r(a) * dd;
        return m < 0 ? -g : g;
    }

    void build_stencils()
    {
        const int p = spec_.order, half = p / 2;
        fst_.resize(N_ + 1);
        for (int i = 0; i <= N_; ++i) {
            Stencil st;
            int lo, hi;
            if (i + half <= N_) {
                lo = i - half;
                hi = i + half;
            } else {
                lo = N_ - p - 1;
                hi = N_;
            }
            std::vector<double> x;
            for (int m = lo; m <= hi; ++m) {
                st.idx.push_back(m);
                x.push_back(double(m - i));
            }
            const auto c = fd::fornberg(0.0, x, 2);
            for (std::size_t j = 0; j < x.size(); ++j) {
                st.c1.push_back(c[j][1] / h_);
                st.c2.push_back(c[j][2] / (h_ * h_));
            }
            fst_[i] = std::move(st);
        }
        const int P = spec_.quad_points, S = P / 2;
        wq_.resize(N_ + 1);
        for (int i = 1; i <= N_; ++i) {
            QuadRule qr;
            if (i <= S) {
                qr.s_var = true;
                std::vector<double> x;
                for (int j = 0; j < P; ++j) {
                    qr.idx.push_back(j);
                    x.push_back(double(j) * j);
                }
                const auto w = fd::integration_weights(x, double(i - 1) * (i - 1), double(i) * i);
                for (double wj : w) qr.wt.push_back(wj * h_ * h_);
            } else {
                int lo = i - S;
                if (lo + P - 1 > N_) lo = N_ - P + 1;
                std::vector<double> x;
                for (int j = 0; j < P; ++j) {
                    qr.idx.push_back(lo + j);
                    x.push_back(double(lo + j));
                }
                const auto w = fd::integration_weights(x, double(i - 1), double(i));
                for (double wj : w) qr.wt.push_back(wj * h_);
            }
            wq_[i] = std::move(qr);
        }
    }

    Eigen::SparseMatrix<double> jacobian(double q, double k, const BvpState& s) const
    {
        std::vector<Eigen::Triplet<double>> T;
        triplets(q, k, s, T);
        Eigen::SparseMatrix<double> J(2 * N_, 2 * N_);
        J.setFromTriplets(T.begin(), T.end());
        return J;
    }

    void triplets(double q, double k, const BvpState& s, std::vector<Eigen::Triplet<double>>& T) const
    {
        T.reserve(static_cast<std::size_t>(N_) * (spec_.order + spec_.quad_points + 8));
        const auto& f = s.f;
        const auto& w = s.w;
        const double n2 = double(n_) * n_;
        const double par = parity();
        for (int i = 1; i < N_; ++i) {
            const double ri = r(i);
            const auto& st = fst_[i];
            for (std::size_t j = 0; j < st.idx.size(); ++j) {
                int m = st.idx[j];
                double c = st.c2[j] + st.c1[j] / ri;
                if (m < 0) {
                    m = -m;
                    c *= par;
                }
                if (m == 0) continue;
                T.emplace_back(fi(i), fi(m), c);
            }
            const double fi_ = f[i], r2 = ri * ri;
            const double dN = -n2 / r2 + 1 - 3 * fi_ * fi_ + 3 * w[i] * w[i] / (r2 * fi_ * fi_ * fi_ * fi_);
            const double dW = -2 * w[i] / (r2 * fi_ * fi_ * fi_);
            T.emplace_back(fi(i), fi(i), dN);
            T.emplace_back(fi(i), wi(i), dW);
        }
        T.emplace_back(fi(N_), fi(N_), 1.0);
        for (int i = 1; i <= N_; ++i) {
            T.emplace_back(wi(i), wi(i), 1.0 / h_);
            if (i > 1) T.emplace_back(wi(i), wi(i - 1), -1.0 / h_);
            const auto& qw = wq_[i];
            for (std::size_t j = 0; j < qw.idx.size(); ++j) {
                const int a = std::abs(qw.idx[j]);
                if (a == 0) continue;
                T.emplace_back(wi(i), fi(a), -qw.wt[j] * dgval(q, k, f, qw.idx[j], qw.s_var) / h_);
            }
        }
    }

    int n_;
    BvpGridSpec spec_;
    int N_ = 0;
    double h_ = 0;
    std::vector<Stencil> fst_;
    std::vector<QuadRule> wq_;
};

} // namespace spiral
