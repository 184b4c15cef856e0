#include "nls2d/mb4_integrator.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "nls2d/ordering.hpp"

namespace nls2d {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

LinearSystem::LinearSystem(SparseCsr a, SolverKind kind, std::span<const int> column_order) {
    if (kind == SolverKind::Direct) {
        lu_ = std::make_unique<SparseLu>(a, column_order);
    } else {
        prec_ = std::make_unique<Ilu0>(a);
        matrix_ = std::move(a);
    }
}

void LinearSystem::solve(std::span<const double> b, std::span<double> x) const {
    if (lu_) {
        lu_->solve(b, x);
    } else {
        gmres(*matrix_, *prec_, b, x);
    }
}

SparseCsr assemble_jacobian(const GridModel& model, const State& u0) {
    const int n = model.points();
    if (static_cast<int>(u0.size()) != n)
        throw std::invalid_argument("assemble_jacobian: state length mismatch");
    const SparseCsr& k = model.kinetic();
    const auto v = model.potential();
    const double g = model.gamma();

    SparseCsr j;
    j.rows = j.cols = 2 * n;
    j.row_ptr.assign(2 * n + 1, 0);
    const std::size_t guess = 2 * (k.col_idx.size() + 2 * n);
    j.col_idx.reserve(guess);
    j.values.reserve(guess);

    // row r (p-part): diag -2g p q at r, then row of (K+V) - g diag(p^2+3q^2) at N+c
    for (int r = 0; r < n; ++r) {
        const double p = u0[r].real();
        const double q = u0[r].imag();
        j.col_idx.push_back(r);
        j.values.push_back(-2.0 * g * p * q);
        bool diag_done = false;
        for (int pp = k.row_ptr[r]; pp < k.row_ptr[r + 1]; ++pp) {
            const int c = k.col_idx[pp];
            double val = k.values[pp];
            if (c == r) {
                val += v[r] - g * (p * p + 3.0 * q * q);
                diag_done = true;
            } else if (!diag_done && c > r) {
                // K row may lack the diagonal for a custom kinetic matrix
                j.col_idx.push_back(n + r);
                j.values.push_back(v[r] - g * (p * p + 3.0 * q * q));
                diag_done = true;
            }
            j.col_idx.push_back(n + c);
            j.values.push_back(val);
        }
        if (!diag_done) {
            j.col_idx.push_back(n + r);
            j.values.push_back(v[r] - g * (p * p + 3.0 * q * q));
        }
        j.row_ptr[r + 1] = static_cast<int>(j.col_idx.size());
    }
    // row N+r (q-part): -(K+V) + g diag(3p^2+q^2) at c, diag 2g p q at N+r
    for (int r = 0; r < n; ++r) {
        const double p = u0[r].real();
        const double q = u0[r].imag();
        bool diag_done = false;
        for (int pp = k.row_ptr[r]; pp < k.row_ptr[r + 1]; ++pp) {
            const int c = k.col_idx[pp];
            double val = -k.values[pp];
            if (c == r) {
                val += -v[r] + g * (3.0 * p * p + q * q);
                diag_done = true;
            } else if (!diag_done && c > r) {
                j.col_idx.push_back(r);
                j.values.push_back(-v[r] + g * (3.0 * p * p + q * q));
                diag_done = true;
            }
            j.col_idx.push_back(c);
            j.values.push_back(val);
        }
        if (!diag_done) {
            j.col_idx.push_back(r);
            j.values.push_back(-v[r] + g * (3.0 * p * p + q * q));
        }
        j.col_idx.push_back(n + r);
        j.values.push_back(2.0 * g * p * q);
        j.row_ptr[n + r + 1] = static_cast<int>(j.col_idx.size());
    }
    return j;
}

std::vector<int> split_column_order(const GridModel& model, int blocks) {
    const int n = model.points();
    // grid-node graph: kinetic pattern with the diagonal forced in
    SparseCsr pattern = model.kinetic();
    {
        std::vector<Triplet> t;
        t.reserve(pattern.col_idx.size() + n);
        for (int r = 0; r < n; ++r) {
            t.push_back({r, r, 1.0});
            for (int p = pattern.row_ptr[r]; p < pattern.row_ptr[r + 1]; ++p)
                t.push_back({r, pattern.col_idx[p], 1.0});
        }
        pattern = csr_from_triplets(n, n, std::move(t));
    }
    const std::vector<int> node_order = amd_order(pattern);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n) * blocks);
    for (int c : node_order)
        for (int b = 0; b < blocks; ++b) order.push_back(b * n + c);
    return order;
}

SparseCsr stage_matrix(const SparseCsr& jacobian, double h_lambda) {
    SparseCsr m = jacobian;
    for (int r = 0; r < m.rows; ++r) {
        for (int p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p) {
            m.values[p] = (m.col_idx[p] == r ? 1.0 : 0.0) - h_lambda * m.values[p];
        }
    }
    return m;
}

StageSystem StageSystem::build(const SparseCsr& jacobian, const Mb4Scheme& scheme, double h,
                               SolverKind kind, std::span<const int> column_order,
                               WorkerPool* pool) {
    StageSystem sys;
    std::vector<std::function<void()>> tasks;
    for (int i = 0; i < 3; ++i) {
        tasks.push_back([&, i] {
            sys.systems[i] = std::make_unique<LinearSystem>(
                stage_matrix(jacobian, h * scheme.eigenvalues()[i]), kind, column_order);
        });
    }
    if (pool)
        pool->run_all(std::move(tasks));
    else
        for (auto& t : tasks) t();
    return sys;
}

std::array<State, 3> eval_phi(const GridModel& model, const Mb4Scheme& scheme, const State& u0,
                              const std::array<State, 3>& stages, double h) {
    const int n = model.points();
    const double g = model.gamma();
    constexpr Complex mi(0.0, -1.0);

    std::array<State, 3> phi;
    State combo(n), kv(n);
    for (int i = 1; i <= 3; ++i) {
        for (int k = 0; k < n; ++k) {
            combo[k] = scheme.e_ext(i, 0) * u0[k] + scheme.e_ext(i, 1) * stages[0][k] +
                       scheme.e_ext(i, 2) * stages[1][k] + scheme.e_ext(i, 3) * stages[2][k];
        }
        model.apply_kv(combo, kv);
        State& out = phi[i - 1];
        out.resize(n);
        for (int k = 0; k < n; ++k) {
            const std::array<Complex, 4> z = {u0[k], stages[0][k], stages[1][k], stages[2][k]};
            Complex cubic = 0.0;
            for (int a = 0; a < 4; ++a) {
                Complex inner = 0.0;
                for (int b = 0; b < 4; ++b) {
                    // W is symmetric in (b,c); fold the off-diagonal terms
                    inner += scheme.w(i, a, b, b) * z[b] * z[b];
                    for (int c = b + 1; c < 4; ++c)
                        inner += 2.0 * scheme.w(i, a, b, c) * z[b] * z[c];
                }
                cubic += std::conj(z[a]) * inner;
            }
            out[k] = stages[i - 1][k] - u0[k] - h * (mi * kv[k] + Complex(0.0, g) * cubic);
        }
    }
    return phi;
}

NewtonResult newton_solve(const GridModel& model, const Mb4Scheme& scheme, const StageSystem& sys,
                          const State& u0, double h, const NewtonConfig& cfg, WorkerPool* pool,
                          double* solve_seconds) {
    cfg.validate();
    const int n = model.points();
    NewtonResult res;
    res.stages = {u0, u0, u0};

    const SmallMat& t = scheme.t();
    const SmallMat& ti = scheme.t_inv();
    std::array<std::vector<double>, 3> rhs_split, sol_split;
    for (auto& v : rhs_split) v.resize(2 * n);
    for (auto& v : sol_split) v.resize(2 * n);

    double rnorm = 0.0;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        const std::array<State, 3> phi = eval_phi(model, scheme, u0, res.stages, h);

        // rhs_i = -(T^{-1} (x) I) Phi, in split form
        for (int i = 0; i < 3; ++i) {
            for (int k = 0; k < n; ++k) {
                const Complex s = ti(i, 0) * phi[0][k] + ti(i, 1) * phi[1][k] + ti(i, 2) * phi[2][k];
                rhs_split[i][k] = -s.real();
                rhs_split[i][n + k] = -s.imag();
            }
        }

        std::vector<std::function<void()>> tasks;
        for (int i = 0; i < 3; ++i)
            tasks.push_back([&, i] { sys.systems[i]->solve(rhs_split[i], sol_split[i]); });
        const auto ts = std::chrono::steady_clock::now();
        if (pool)
            pool->run_all(std::move(tasks));
        else
            for (auto& tk : tasks) tk();
        if (solve_seconds) *solve_seconds += seconds_since(ts);

        // r = (T (x) I) rbar; apply and measure in split form
        rnorm = 0.0;
        bool finite = true;
        for (int i = 0; i < 3; ++i) {
            State& stage = res.stages[i];
            for (int k = 0; k < n; ++k) {
                const double rp = t(i, 0) * sol_split[0][k] + t(i, 1) * sol_split[1][k] +
                                  t(i, 2) * sol_split[2][k];
                const double rq = t(i, 0) * sol_split[0][n + k] + t(i, 1) * sol_split[1][n + k] +
                                  t(i, 2) * sol_split[2][n + k];
                stage[k] += Complex(rp, rq);
                rnorm = std::max(rnorm, std::max(std::abs(rp), std::abs(rq)));
                finite = finite && std::isfinite(rp) && std::isfinite(rq);
            }
        }
        res.iterations = iter;
        if (!finite)
            throw NonConvergenceError("newton_solve: iteration diverged (non-finite update)",
                                      std::numeric_limits<double>::infinity());
        if (rnorm <= cfg.epsilon) return res;
    }
    throw NonConvergenceError("newton_solve: no convergence after " +
                                  std::to_string(cfg.max_iters) + " iterations",
                              rnorm);
}

namespace {

State mb4_single_step(const GridModel& model, const Mb4Scheme& scheme, const State& u0, double h,
                      const NewtonConfig& cfg, WorkerPool* pool, StepStats* stats,
                      SolverKind solver, const std::vector<int>& order) {
    const SparseCsr j = assemble_jacobian(model, u0);
    const auto t0 = std::chrono::steady_clock::now();
    const StageSystem sys = StageSystem::build(j, scheme, h, solver, order, pool);
    if (stats) stats->solve_seconds += seconds_since(t0);

    NewtonResult nr = newton_solve(model, scheme, sys, u0, h, cfg, pool,
                                   stats ? &stats->solve_seconds : nullptr);
    if (stats) stats->newton_iters += nr.iterations;
    return std::move(nr.stages[2]);  // c3 = 1: u1 = U_{c3}
}

}  // namespace

State mb4_step(const GridModel& model, const Mb4Scheme& scheme, const State& u0, double h,
               const NewtonConfig& cfg, WorkerPool* pool, StepStats* stats, SolverKind solver,
               const std::vector<int>* cached_order) {
    cfg.validate();
    if (!(h > 0.0)) throw std::invalid_argument("mb4_step: h must be positive");

    std::vector<int> local_order;
    if (!cached_order) {
        local_order = split_column_order(model, 2);
        cached_order = &local_order;
    }

    double last_residual = 0.0;
    for (int halving = 0; halving <= cfg.max_step_halvings; ++halving) {
        const int substeps = 1 << halving;
        const double hs = h / substeps;
        State u = u0;
        bool ok = true;
        StepStats attempt;
        for (int s = 0; s < substeps; ++s) {
            try {
                u = mb4_single_step(model, scheme, u, hs, cfg, pool, &attempt, solver,
                                    *cached_order);
            } catch (const NonConvergenceError& e) {
                last_residual = e.last_residual;
                ok = false;
                break;
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
    throw NonConvergenceError("mb4_step: no convergence after " +
                                  std::to_string(cfg.max_step_halvings) + " step halvings",
                              last_residual);
}

}  // namespace nls2d
