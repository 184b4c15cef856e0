#pragma once

#include <functional>
#include <optional>
#include <string>

#include "nls2d/mb4_integrator.hpp"

namespace nls2d {

enum class MethodId { Rk4, Gauss2, Gauss4, Avf2, Avf4, Mb4 };

int method_order(MethodId m);
std::string method_name(MethodId m);
std::optional<MethodId> parse_method(const std::string& name);

/// Classical explicit 4-stage Runge-Kutta step.
State rk4_step(const GridModel& model, const State& u0, double h);

/// Gauss collocation with 1 stage (implicit midpoint, order 2) or 2 stages
/// (order 4). The 2-stage coupled Newton matrix I - h(A (x) J) has complex
/// eigenvalues, so it is solved as one sparse system of dimension 4N.
State gauss_step(const GridModel& model, const State& u0, double h, int stages,
                 const NewtonConfig& cfg, StepStats* stats = nullptr,
                 SolverKind solver = SolverKind::Direct,
                 const std::vector<int>* cached_order = nullptr);

/// Average-vector-field step (order 2):
///   u1 = u0 + h int_0^1 f((1-xi) u0 + xi u1) dxi,
/// with the degree-3 cubic-term integrals precomputed exactly.
State avf2_step(const GridModel& model, const State& u0, double h, const NewtonConfig& cfg,
                StepStats* stats = nullptr, SolverKind solver = SolverKind::Direct,
                const std::vector<int>* cached_order = nullptr);

/// Energy-preserving collocation with 2 Gauss nodes (order 4). The stage
/// derivatives satisfy D_i = (1/b_i) int_0^1 l_i(xi) f(sigma(xi)) dxi with
/// sigma(xi) = u0 + h sum_j (int_0^xi l_j) D_j and u1 = sigma(1); the Newton
/// iteration solves for the state-scale increments h D_i through one coupled
/// sparse 4N system.
State avf4_step(const GridModel& model, const State& u0, double h, const NewtonConfig& cfg,
                StepStats* stats = nullptr, SolverKind solver = SolverKind::Direct,
                const std::vector<int>* cached_order = nullptr);

/// Single-step driver for any method, applying the shared halving-on-failure
/// policy (2^k sub-steps of h/2^k after k halvings).
class StepDriver {
public:
    StepDriver(const GridModel& model, MethodId method, NewtonConfig cfg,
               SolverKind solver = SolverKind::Direct, WorkerPool* pool = nullptr);

    State advance(const State& u0, double h, StepStats* stats = nullptr);

    const Mb4Scheme& scheme() const { return scheme_; }

private:
    State plain_step(const State& u0, double h, StepStats* stats);

    const GridModel& model_;
    MethodId method_;
    NewtonConfig cfg_;
    SolverKind solver_;
    WorkerPool* pool_;
    Mb4Scheme scheme_;
    std::vector<int> order2n_;  // cached elimination order, 2N pattern
    std::vector<int> order4n_;  // 4N pattern (two-stage coupled systems)
};

}  // namespace nls2d
