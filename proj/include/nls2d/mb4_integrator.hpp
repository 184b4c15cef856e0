#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nls2d/iterative.hpp"
#include "nls2d/lattice.hpp"
#include "nls2d/mb4_scheme.hpp"
#include "nls2d/sparse_lu.hpp"
#include "nls2d/worker_pool.hpp"

namespace nls2d {

class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
    double at_time = -1.0;  // filled in by the harness
};

struct NewtonConfig {
    double epsilon = 1e-13;    // stop when ||r||_inf <= epsilon (split reals)
    int max_iters = 50;
    int max_step_halvings = 4;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("NewtonConfig: epsilon must be > 0");
        if (max_iters < 1) throw std::invalid_argument("NewtonConfig: max_iters must be >= 1");
        if (max_step_halvings < 0) throw std::invalid_argument("NewtonConfig: negative halvings");
    }
};

enum class SolverKind { Direct, Gmres };

/// Reusable handle for the repeated solves against one stage matrix: a direct
/// factorization by default, ILU(0)-preconditioned GMRES behind the flag.
class LinearSystem {
public:
    LinearSystem(SparseCsr a, SolverKind kind, std::span<const int> column_order);
    void solve(std::span<const double> b, std::span<double> x) const;

private:
    std::unique_ptr<SparseLu> lu_;
    std::unique_ptr<Ilu0> prec_;
    std::optional<SparseCsr> matrix_;  // kept only for the iterative path
};

/// Real-split Jacobian of the right-hand side at u0 (2N x 2N):
///   [ -2g p q          K + V - g(p^2+3q^2) ]
///   [ -(K+V) + g(3p^2+q^2)        2g p q   ]
/// with an explicit diagonal in every row so stage matrices share the pattern.
SparseCsr assemble_jacobian(const GridModel& model, const State& u0);

/// Elimination order for the split systems: fill-reducing order of the grid
/// graph, expanded so each node's split components are eliminated together.
/// Keeping the (p,q) pair adjacent lets threshold pivoting act inside the
/// node block (the dominant entries sit in the off-diagonal blocks), which
/// preserves the fill pattern of the symmetric analysis.
/// `blocks` = 2 for the 2N systems, 4 for the two-stage coupled 4N systems.
std::vector<int> split_column_order(const GridModel& model, int blocks);

/// Stage matrix I - h*lambda*J on J's pattern.
SparseCsr stage_matrix(const SparseCsr& jacobian, double h_lambda);

/// The three factorized systems (I - h lambda_i J), i = 1..3. Construction
/// and the per-iteration solves may run on up to three workers.
struct StageSystem {
    std::array<std::unique_ptr<LinearSystem>, 3> systems;

    static StageSystem build(const SparseCsr& jacobian, const Mb4Scheme& scheme, double h,
                             SolverKind kind, std::span<const int> column_order,
                             WorkerPool* pool);
};

/// Residual Phi_i = U_i - u0 - h [ -i(K+V)(E_i0 u0 + sum_j E_ij U_j)
///                                 + i gamma sum_{abc} W_i[abc] conj(z_a) z_b z_c ]
/// with z = (u0, U_1, U_2, U_3) per grid point.
std::array<State, 3> eval_phi(const GridModel& model, const Mb4Scheme& scheme, const State& u0,
                              const std::array<State, 3>& stages, double h);

struct NewtonResult {
    std::array<State, 3> stages;
    int iterations = 0;
};

/// Simplified Newton iteration of the stage equations, starting from
/// U^0 = (u0,u0,u0): transform by T^{-1}, three independent solves, transform
/// back, update, stop when ||r||_inf <= epsilon.
NewtonResult newton_solve(const GridModel& model, const Mb4Scheme& scheme, const StageSystem& sys,
                          const State& u0, double h, const NewtonConfig& cfg,
                          WorkerPool* pool = nullptr, double* solve_seconds = nullptr);

struct StepStats {
    int newton_iters = 0;
    int halvings = 0;
    double solve_seconds = 0.0;  // matrix assembly excluded: factorize + triangular solves
};

/// One time step of size h: assemble J at u0, factorize the three stage
/// systems, run the Newton iteration, return U_{c3} (c3 = 1). On
/// non-convergence the step is retried as 2^k sub-steps of h/2^k, up to
/// cfg.max_step_halvings.
State mb4_step(const GridModel& model, const Mb4Scheme& scheme, const State& u0, double h,
               const NewtonConfig& cfg, WorkerPool* pool = nullptr, StepStats* stats = nullptr,
               SolverKind solver = SolverKind::Direct,
               const std::vector<int>* cached_order = nullptr);

}  // namespace nls2d
