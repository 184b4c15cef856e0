#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nls2d/sparse_matrix.hpp"

namespace nls2d {

using Complex = std::complex<double>;

/// Complex amplitude vector over the grid points, ordered k = j*nx + i.
using State = std::vector<Complex>;

/// Split view [p; q] of a state (real parts then imaginary parts).
std::vector<double> split_state(const State& u);
State join_state(std::span<const double> v);

/// Regular nx x ny grid on [0,lx] x [0,ly] with periodic boundaries.
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;

    GridSpec(int nx_, int ny_, double lx_, double ly_);

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    int points() const { return nx * ny; }
    int index(int i, int j) const { return j * nx + i; }  // 0-based
};

/// Periodic 5-point kinetic operator
/// K = -(I_ny (x) D_nx/hx^2 + D_ny/hy^2 (x) I_nx), symmetric positive
/// semidefinite; wraparound neighbours coincide for nx or ny = 2.
SparseCsr build_kinetic(const GridSpec& grid);

/// Potential that is v0 at grid point (0,0) and zero elsewhere.
std::vector<double> build_delta_potential(const GridSpec& grid, double v0);

/// u(x,y) = 1 + 2 cos x + 2 cos y sampled at x_i = i hx, y_j = j hy.
State initial_condition(const GridSpec& grid);

struct Observables;

/// The discretized problem: i du/dt = K u - gamma |u|^2 u + V u.
class GridModel {
public:
    GridModel(GridSpec grid, double gamma);
    GridModel(GridSpec grid, double gamma, std::vector<double> potential);
    /// Custom kinetic operator; accepted iff real symmetric.
    GridModel(GridSpec grid, double gamma, SparseCsr kinetic, std::vector<double> potential);

    const GridSpec& grid() const { return grid_; }
    const SparseCsr& kinetic() const { return kinetic_; }
    std::span<const double> potential() const { return potential_; }
    double gamma() const { return gamma_; }
    int points() const { return grid_.points(); }

    /// y = (K + V) u
    void apply_kv(std::span<const Complex> u, std::span<Complex> y) const;

private:
    GridSpec grid_;
    SparseCsr kinetic_;
    std::vector<double> potential_;
    double gamma_;
    double kinetic_inf_norm_;

    friend Observables observables(const GridModel&, const State&);
};

/// f(u) = -i K u + i gamma (conj(u) o u) o u - i V u
State rhs(const GridModel& model, const State& u);

struct Observables {
    double u_kinetic = 0.0;    // u^H K u
    double u_nonlinear = 0.0;  // -(gamma/2) sum |u_k|^4
    double u_external = 0.0;   // sum V_k |u_k|^2
    double total_energy = 0.0;
    double probability = 0.0;    // sum |u_k|^2
    double participation = 0.0;  // sum |u_k|^4 / probability^2 (normalized)
    double raw_quartic = 0.0;    // sum |u_k|^4
};

Observables observables(const GridModel& model, const State& u);

}  // namespace nls2d
