#include "nls2d/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace nls2d {

std::vector<double> split_state(const State& u) {
    const std::size_t n = u.size();
    std::vector<double> v(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        v[k] = u[k].real();
        v[n + k] = u[k].imag();
    }
    return v;
}

State join_state(std::span<const double> v) {
    if (v.size() % 2 != 0) throw std::invalid_argument("join_state: odd length");
    const std::size_t n = v.size() / 2;
    State u(n);
    for (std::size_t k = 0; k < n; ++k) u[k] = Complex(v[k], v[n + k]);
    return u;
}

GridSpec::GridSpec(int nx_, int ny_, double lx_, double ly_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("GridSpec: nx and ny must be >= 2");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("GridSpec: domain lengths must be positive");
}

SparseCsr build_kinetic(const GridSpec& grid) {
    const double cx = 1.0 / (grid.hx() * grid.hx());
    const double cy = 1.0 / (grid.hy() * grid.hy());
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(grid.points()) * 5);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const int k = grid.index(i, j);
            t.push_back({k, k, 2.0 * cx + 2.0 * cy});
            t.push_back({k, grid.index((i + 1) % grid.nx, j), -cx});
            t.push_back({k, grid.index((i - 1 + grid.nx) % grid.nx, j), -cx});
            t.push_back({k, grid.index(i, (j + 1) % grid.ny), -cy});
            t.push_back({k, grid.index(i, (j - 1 + grid.ny) % grid.ny), -cy});
        }
    }
    return csr_from_triplets(grid.points(), grid.points(), std::move(t));
}

std::vector<double> build_delta_potential(const GridSpec& grid, double v0) {
    std::vector<double> v(grid.points(), 0.0);
    v[grid.index(0, 0)] = v0;
    return v;
}

State initial_condition(const GridSpec& grid) {
    State u(grid.points());
    for (int j = 0; j < grid.ny; ++j) {
        const double y = j * grid.hy();
        for (int i = 0; i < grid.nx; ++i) {
            const double x = i * grid.hx();
            u[grid.index(i, j)] = Complex(1.0 + 2.0 * std::cos(x) + 2.0 * std::cos(y), 0.0);
        }
    }
    return u;
}

GridModel::GridModel(GridSpec grid, double gamma)
    : GridModel(grid, gamma, std::vector<double>(grid.points(), 0.0)) {}

GridModel::GridModel(GridSpec grid, double gamma, std::vector<double> potential)
    : GridModel(grid, gamma, build_kinetic(grid), std::move(potential)) {}

GridModel::GridModel(GridSpec grid, double gamma, SparseCsr kinetic, std::vector<double> potential)
    : grid_(grid), kinetic_(std::move(kinetic)), potential_(std::move(potential)), gamma_(gamma) {
    if (kinetic_.rows != grid_.points() || kinetic_.cols != grid_.points())
        throw std::invalid_argument("GridModel: kinetic matrix dimension mismatch");
    if (static_cast<int>(potential_.size()) != grid_.points())
        throw std::invalid_argument("GridModel: potential length mismatch");
    if (!is_symmetric(kinetic_))
        throw std::invalid_argument("GridModel: kinetic matrix must be symmetric");
    kinetic_inf_norm_ = inf_norm(kinetic_);
}

void GridModel::apply_kv(std::span<const Complex> u, std::span<Complex> y) const {
    multiply(kinetic_, u, y);
    for (int k = 0; k < grid_.points(); ++k) y[k] += potential_[k] * u[k];
}

State rhs(const GridModel& model, const State& u) {
    const int n = model.points();
    if (static_cast<int>(u.size()) != n) throw std::invalid_argument("rhs: state length mismatch");
    State y(n);
    multiply(model.kinetic(), std::span<const Complex>(u), std::span<Complex>(y));
    const auto v = model.potential();
    const double g = model.gamma();
    constexpr Complex mi(0.0, -1.0);
    for (int k = 0; k < n; ++k) {
        const double n2 = std::norm(u[k]);
        y[k] = mi * (y[k] + v[k] * u[k] - g * n2 * u[k]);
    }
    return y;
}

Observables observables(const GridModel& model, const State& u) {
    const int n = model.points();
    if (static_cast<int>(u.size()) != n) throw std::invalid_argument("observables: state length mismatch");
    State ku(n);
    multiply(model.kinetic(), std::span<const Complex>(u), std::span<Complex>(ku));

    Complex quad = 0.0;
    double prob = 0.0, quart = 0.0, ext = 0.0;
    const auto v = model.potential();
    for (int k = 0; k < n; ++k) {
        quad += std::conj(u[k]) * ku[k];
        const double n2 = std::norm(u[k]);
        prob += n2;
        quart += n2 * n2;
        ext += v[k] * n2;
    }

    // u^H K u is real for symmetric K; the imaginary residue is a health check.
    const double imag_scale = std::max(std::abs(quad.real()), model.kinetic_inf_norm_ * prob);
    if (std::abs(quad.imag()) > 1e-12 * imag_scale && imag_scale > 0.0)
        throw std::runtime_error("observables: non-real kinetic quadratic form");

    Observables obs;
    obs.u_kinetic = quad.real();
    obs.u_nonlinear = -0.5 * model.gamma() * quart;
    obs.u_external = ext;
    obs.total_energy = obs.u_kinetic + obs.u_nonlinear + obs.u_external;
    obs.probability = prob;
    obs.raw_quartic = quart;
    obs.participation = prob > 0.0 ? quart / (prob * prob) : 0.0;
    return obs;
}

}  // namespace nls2d
