#include "nls2d/integrators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "nls2d/ordering.hpp"
#include "nls2d/quadrature.hpp"

namespace nls2d {

int method_order(MethodId m) {
    switch (m) {
        case MethodId::Gauss2:
        case MethodId::Avf2: return 2;
        default: return 4;
    }
}

std::string method_name(MethodId m) {
    switch (m) {
        case MethodId::Rk4: return "RK4";
        case MethodId::Gauss2: return "GAUSS2";
        case MethodId::Gauss4: return "GAUSS4";
        case MethodId::Avf2: return "AVF2";
        case MethodId::Avf4: return "AVF4";
        case MethodId::Mb4: return "MB4";
    }
    return "?";
}

std::optional<MethodId> parse_method(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (s == "RK4") return MethodId::Rk4;
    if (s == "GAUSS2") return MethodId::Gauss2;
    if (s == "GAUSS4") return MethodId::Gauss4;
    if (s == "AVF2") return MethodId::Avf2;
    if (s == "AVF4") return MethodId::Avf4;
    if (s == "MB4") return MethodId::Mb4;
    return std::nullopt;
}

State rk4_step(const GridModel& model, const State& u0, double h) {
    const int n = model.points();
    const State k1 = rhs(model, u0);
    State tmp(n);
    for (int k = 0; k < n; ++k) tmp[k] = u0[k] + 0.5 * h * k1[k];
    const State k2 = rhs(model, tmp);
    for (int k = 0; k < n; ++k) tmp[k] = u0[k] + 0.5 * h * k2[k];
    const State k3 = rhs(model, tmp);
    for (int k = 0; k < n; ++k) tmp[k] = u0[k] + h * k3[k];
    const State k4 = rhs(model, tmp);
    State u1(n);
    for (int k = 0; k < n; ++k)
        u1[k] = u0[k] + h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
    return u1;
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Coupled matrix I_{s*2N} - h (C (x) J) for a 2-stage implicit method,
/// assembled on J's pattern block-wise.
SparseCsr coupled_matrix2(const SparseCsr& j, double h, const double c[2][2]) {
    const int m = j.rows;  // 2N
    SparseCsr out;
    out.rows = out.cols = 2 * m;
    out.row_ptr.assign(2 * m + 1, 0);
    out.col_idx.reserve(4 * j.col_idx.size());
    out.values.reserve(4 * j.col_idx.size());
    for (int bi = 0; bi < 2; ++bi) {
        for (int r = 0; r < m; ++r) {
            for (int bj = 0; bj < 2; ++bj) {
                const double coef = -h * c[bi][bj];
                for (int p = j.row_ptr[r]; p < j.row_ptr[r + 1]; ++p) {
                    double val = coef * j.values[p];
                    if (bi == bj && j.col_idx[p] == r) val += 1.0;
                    out.col_idx.push_back(bj * m + j.col_idx[p]);
                    out.values.push_back(val);
                }
            }
            out.row_ptr[bi * m + r + 1] = static_cast<int>(out.col_idx.size());
        }
    }
    return out;
}

void split_into(const State& u, std::span<double> v) {
    const std::size_t n = u.size();
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = u[k].real();
        v[n + k] = u[k].imag();
    }
}

}  // namespace

State gauss_step(const GridModel& model, const State& u0, double h, int stages,
                 const NewtonConfig& cfg, StepStats* stats, SolverKind solver,
                 const std::vector<int>* cached_order) {
    cfg.validate();
    const int n = model.points();
    const SparseCsr j = assemble_jacobian(model, u0);

    if (stages == 1) {
        // implicit midpoint: U = u0 + (h/2) f(U), u1 = u0 + h f(U)
        const auto t0 = std::chrono::steady_clock::now();
        SparseCsr m = stage_matrix(j, 0.5 * h);
        std::vector<int> local;
        if (!cached_order) {
            local = split_column_order(model, 2);
            cached_order = &local;
        }
        const LinearSystem sys(std::move(m), solver, *cached_order);
        if (stats) stats->solve_seconds += seconds_since(t0);

        State u = u0;
        std::vector<double> res(2 * n), sol(2 * n);
        double rnorm = 0.0;
        for (int iter = 1; iter <= cfg.max_iters; ++iter) {
            const State f = rhs(model, u);
            State g(n);
            for (int k = 0; k < n; ++k) g[k] = u[k] - u0[k] - 0.5 * h * f[k];
            split_into(g, res);
            for (auto& x : res) x = -x;
            const auto t1 = std::chrono::steady_clock::now();
            sys.solve(res, sol);
            if (stats) stats->solve_seconds += seconds_since(t1);
            rnorm = 0.0;
            bool finite = true;
            for (int k = 0; k < 2 * n; ++k) {
                rnorm = std::max(rnorm, std::abs(sol[k]));
                finite = finite && std::isfinite(sol[k]);
            }
            for (int k = 0; k < n; ++k) u[k] += Complex(sol[k], sol[n + k]);
            if (stats) ++stats->newton_iters;
            if (!finite)
                throw NonConvergenceError("gauss_step(1): iteration diverged",
                                          std::numeric_limits<double>::infinity());
            if (rnorm <= cfg.epsilon) {
                const State f1 = rhs(model, u);
                State u1(n);
                for (int k = 0; k < n; ++k) u1[k] = u0[k] + h * f1[k];
                return u1;
            }
        }
        throw NonConvergenceError("gauss_step(1): no convergence", rnorm);
    }

    if (stages != 2) throw std::invalid_argument("gauss_step: stages must be 1 or 2");

    const double r3 = std::sqrt(3.0);
    const double a[2][2] = {{0.25, 0.25 - r3 / 6.0}, {0.25 + r3 / 6.0, 0.25}};
    const double b[2] = {0.5, 0.5};

    const auto t0 = std::chrono::steady_clock::now();
    SparseCsr m = coupled_matrix2(j, h, a);
    std::vector<int> local;
    if (!cached_order) {
        local = split_column_order(model, 4);
        cached_order = &local;
    }
    const LinearSystem sys(std::move(m), solver, *cached_order);
    if (stats) stats->solve_seconds += seconds_since(t0);

    std::array<State, 2> u{u0, u0};
    std::vector<double> res(4 * n), sol(4 * n);
    double rnorm = 0.0;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const std::array<State, 2> f = {rhs(model, u[0]), rhs(model, u[1])};
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < n; ++k) {
                const Complex g = u[i][k] - u0[k] - h * (a[i][0] * f[0][k] + a[i][1] * f[1][k]);
                res[2 * n * i + k] = -g.real();
                res[2 * n * i + n + k] = -g.imag();
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        sys.solve(res, sol);
        if (stats) stats->solve_seconds += seconds_since(t1);
        rnorm = 0.0;
        bool finite = true;
        for (double x : sol) {
            rnorm = std::max(rnorm, std::abs(x));
            finite = finite && std::isfinite(x);
        }
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < n; ++k)
                u[i][k] += Complex(sol[2 * n * i + k], sol[2 * n * i + n + k]);
        if (stats) ++stats->newton_iters;
        if (!finite)
            throw NonConvergenceError("gauss_step(2): iteration diverged",
                                      std::numeric_limits<double>::infinity());
        if (rnorm <= cfg.epsilon) {
            const std::array<State, 2> f1 = {rhs(model, u[0]), rhs(model, u[1])};
            State u1(n);
            for (int k = 0; k < n; ++k)
                u1[k] = u0[k] + h * (b[0] * f1[0][k] + b[1] * f1[1][k]);
            return u1;
        }
    }
    throw NonConvergenceError("gauss_step(2): no convergence", rnorm);
}

State avf2_step(const GridModel& model, const State& u0, double h, const NewtonConfig& cfg,
                StepStats* stats, SolverKind solver, const std::vector<int>* cached_order) {
    cfg.validate();
    const int n = model.points();
    const double g = model.gamma();

    // B2[a][b][c] = int_0^1 m_a m_b m_c dxi over m0 = 1-xi, m1 = xi
    // (degree 3; 2-node Gauss is exact): 1/4 on the diagonal, 1/12 mixed.
    static const auto b2 = [] {
        std::array<std::array<std::array<double, 2>, 2>, 2> t{};
        const QuadratureRule q = gauss_legendre_01(2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int c = 0; c < 2; ++c) {
                    double s = 0.0;
                    for (std::size_t gg = 0; gg < q.nodes.size(); ++gg) {
                        const double x = q.nodes[gg];
                        const double m[2] = {1.0 - x, x};
                        s += q.weights[gg] * m[a] * m[b] * m[c];
                    }
                    t[a][b][c] = s;
                }
        return t;
    }();

    const SparseCsr j = assemble_jacobian(model, u0);
    const auto t0 = std::chrono::steady_clock::now();
    SparseCsr m = stage_matrix(j, 0.5 * h);
    std::vector<int> local;
    if (!cached_order) {
        local = split_column_order(model, 2);
        cached_order = &local;
    }
    const LinearSystem sys(std::move(m), solver, *cached_order);
    if (stats) stats->solve_seconds += seconds_since(t0);

    State u1 = u0;
    State mid(n), kv(n);
    std::vector<double> res(2 * n), sol(2 * n);
    constexpr Complex mi(0.0, -1.0);
    double rnorm = 0.0;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        for (int k = 0; k < n; ++k) mid[k] = 0.5 * (u0[k] + u1[k]);
        model.apply_kv(mid, kv);
        for (int k = 0; k < n; ++k) {
            const std::array<Complex, 2> z = {u0[k], u1[k]};
            Complex cubic = 0.0;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    for (int c = 0; c < 2; ++c)
                        cubic += b2[a][b][c] * std::conj(z[a]) * z[b] * z[c];
            const Complex gval = u1[k] - u0[k] - h * (mi * kv[k] + Complex(0.0, g) * cubic);
            res[k] = -gval.real();
            res[n + k] = -gval.imag();
        }
        const auto t1 = std::chrono::steady_clock::now();
        sys.solve(res, sol);
        if (stats) stats->solve_seconds += seconds_since(t1);
        rnorm = 0.0;
        bool finite = true;
        for (double x : sol) {
            rnorm = std::max(rnorm, std::abs(x));
            finite = finite && std::isfinite(x);
        }
        for (int k = 0; k < n; ++k) u1[k] += Complex(sol[k], sol[n + k]);
        if (stats) ++stats->newton_iters;
        if (!finite)
            throw NonConvergenceError("avf2_step: iteration diverged",
                                      std::numeric_limits<double>::infinity());
        if (rnorm <= cfg.epsilon) return u1;
    }
    throw NonConvergenceError("avf2_step: no convergence", rnorm);
}

State avf4_step(const GridModel& model, const State& u0, double h, const NewtonConfig& cfg,
                StepStats* stats, SolverKind solver, const std::vector<int>* cached_order) {
    cfg.validate();
    const int n = model.points();
    const double g = model.gamma();

    struct Avf4Tables {
        double mt[2][2];           // (1/b_i) int l_i L_j, the Newton coupling
        double wt[2][3][3][3];     // (1/b_i) int l_i phi_a phi_b phi_c
    };
    static const Avf4Tables tab = [] {
        Avf4Tables t{};
        const double r3 = std::sqrt(3.0);
        const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
        const double b[2] = {0.5, 0.5};
        auto ell = [&](int i, double x) {
            return i == 0 ? (x - c2) / (c1 - c2) : (x - c1) / (c2 - c1);
        };
        // L_j(x) = int_0^x ell_j: linear integrand, closed form
        auto bigl = [&](int j, double x) {
            return j == 0 ? (0.5 * x * x - c2 * x) / (c1 - c2) : (0.5 * x * x - c1 * x) / (c2 - c1);
        };
        const QuadratureRule q2 = gauss_legendre_01(2);  // degree 3
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = 0.0;
                for (std::size_t gg = 0; gg < q2.nodes.size(); ++gg)
                    s += q2.weights[gg] * ell(i, q2.nodes[gg]) * bigl(j, q2.nodes[gg]);
                t.mt[i][j] = s / b[i];
            }
        const QuadratureRule q4 = gauss_legendre_01(4);  // degree 7
        auto phi = [&](int a, double x) { return a == 0 ? 1.0 : bigl(a - 1, x); };
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < 3; ++a)
                for (int b_ = 0; b_ < 3; ++b_)
                    for (int c = 0; c < 3; ++c) {
                        double s = 0.0;
                        for (std::size_t gg = 0; gg < q4.nodes.size(); ++gg)
                            s += q4.weights[gg] * ell(i, q4.nodes[gg]) * phi(a, q4.nodes[gg]) *
                                 phi(b_, q4.nodes[gg]) * phi(c, q4.nodes[gg]);
                        t.wt[i][a][b_][c] = s / b[i];
                    }
        return t;
    }();

    const SparseCsr j = assemble_jacobian(model, u0);
    const auto t0 = std::chrono::steady_clock::now();
    SparseCsr m = coupled_matrix2(j, h, tab.mt);
    std::vector<int> local;
    if (!cached_order) {
        local = split_column_order(model, 4);
        cached_order = &local;
    }
    const LinearSystem sys(std::move(m), solver, *cached_order);
    if (stats) stats->solve_seconds += seconds_since(t0);

    // Unknowns are the state-scale stage increments z_i = h D_i, so the
    // residual and the convergence measure carry the same units as the other
    // implicit methods (a derivative-scale residual would sit above epsilon
    // from rounding alone once h*||K|| is large).
    const State f0 = rhs(model, u0);
    std::array<State, 2> zinc;
    for (auto& zi : zinc) {
        zi.resize(n);
        for (int k = 0; k < n; ++k) zi[k] = h * f0[k];
    }
    State combo(n), kv(n);
    std::vector<double> res(4 * n), sol(4 * n);
    constexpr Complex mi(0.0, -1.0);
    double rnorm = 0.0;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < n; ++k)
                combo[k] = u0[k] + tab.mt[i][0] * zinc[0][k] + tab.mt[i][1] * zinc[1][k];
            model.apply_kv(combo, kv);
            for (int k = 0; k < n; ++k) {
                const std::array<Complex, 3> z = {u0[k], zinc[0][k], zinc[1][k]};
                Complex cubic = 0.0;
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        for (int c = 0; c < 3; ++c)
                            cubic += tab.wt[i][a][b][c] * std::conj(z[a]) * z[b] * z[c];
                const Complex gval =
                    zinc[i][k] - h * (mi * kv[k] + Complex(0.0, g) * cubic);
                res[2 * n * i + k] = -gval.real();
                res[2 * n * i + n + k] = -gval.imag();
            }
        }
        const auto t1 = std::chrono::steady_clock::now();
        sys.solve(res, sol);
        if (stats) stats->solve_seconds += seconds_since(t1);
        rnorm = 0.0;
        bool finite = true;
        for (double x : sol) {
            rnorm = std::max(rnorm, std::abs(x));
            finite = finite && std::isfinite(x);
        }
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < n; ++k)
                zinc[i][k] += Complex(sol[2 * n * i + k], sol[2 * n * i + n + k]);
        if (stats) ++stats->newton_iters;
        if (!finite)
            throw NonConvergenceError("avf4_step: iteration diverged",
                                      std::numeric_limits<double>::infinity());
        if (rnorm <= cfg.epsilon) {
            State u1(n);
            for (int k = 0; k < n; ++k) u1[k] = u0[k] + 0.5 * zinc[0][k] + 0.5 * zinc[1][k];
            return u1;
        }
    }
    throw NonConvergenceError("avf4_step: no convergence", rnorm);
}

StepDriver::StepDriver(const GridModel& model, MethodId method, NewtonConfig cfg,
                       SolverKind solver, WorkerPool* pool)
    : model_(model), method_(method), cfg_(cfg), solver_(solver), pool_(pool) {
    cfg_.validate();
    if (method_ == MethodId::Rk4) return;
    if (method_ == MethodId::Gauss4 || method_ == MethodId::Avf4)
        order4n_ = split_column_order(model, 4);
    else
        order2n_ = split_column_order(model, 2);
}

State StepDriver::plain_step(const State& u0, double h, StepStats* stats) {
    switch (method_) {
        case MethodId::Rk4: return rk4_step(model_, u0, h);
        case MethodId::Gauss2: return gauss_step(model_, u0, h, 1, cfg_, stats, solver_, &order2n_);
        case MethodId::Gauss4: return gauss_step(model_, u0, h, 2, cfg_, stats, solver_, &order4n_);
        case MethodId::Avf2: return avf2_step(model_, u0, h, cfg_, stats, solver_, &order2n_);
        case MethodId::Avf4: return avf4_step(model_, u0, h, cfg_, stats, solver_, &order4n_);
        case MethodId::Mb4:
            return mb4_step(model_, scheme_, u0, h, cfg_, pool_, stats, solver_, &order2n_);
    }
    throw std::logic_error("StepDriver: unknown method");
}

State StepDriver::advance(const State& u0, double h, StepStats* stats) {
    if (method_ == MethodId::Rk4) return rk4_step(model_, u0, h);
    if (method_ == MethodId::Mb4)
        return mb4_step(model_, scheme_, u0, h, cfg_, pool_, stats, solver_, &order2n_);

    // halving-on-failure for the other implicit methods
    double last_residual = 0.0;
    for (int halving = 0; halving <= cfg_.max_step_halvings; ++halving) {
        const int substeps = 1 << halving;
        const double hs = h / substeps;
        State u = u0;
        bool ok = true;
        StepStats attempt;
        for (int s = 0; s < substeps && ok; ++s) {
            try {
                u = plain_step(u, hs, &attempt);
            } catch (const NonConvergenceError& e) {
                last_residual = e.last_residual;
                ok = false;
            }
        }
        if (ok) {
            if (stats) {
                stats->newton_iters += attempt.newton_iters;
                stats->solve_seconds += attempt.solve_seconds;
                stats->halvings += halving;
            }
            return u;
        }
    }
    throw NonConvergenceError("advance: no convergence after " +
                                  std::to_string(cfg_.max_step_halvings) + " step halvings",
                              last_residual);
}

}  // namespace nls2d
