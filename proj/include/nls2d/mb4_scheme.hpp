#pragma once

#include <array>
#include <iosfwd>

#include "nls2d/small_dense.hpp"

namespace nls2d {

/// Coefficient polynomial of the scheme,
///   A(tau,zeta) = [tau, tau^2/2, tau^3/3] M [1, zeta, zeta^2]^T,
/// evaluated with the alpha1-parameterized matrix M. A(0,zeta) = 0 and the
/// output weights are B(zeta) = A(1,zeta).
double eval_A(double alpha1, double tau, double zeta);

/// Cubic Lagrange basis over the nodes {0, c1, c2, c3}; l_i(c_j) = delta_ij.
double lagrange_basis(const std::array<double, 4>& nodes, int i, double zeta);

/// Fourth-order energy-preserving three-stage scheme. All constants are
/// precomputed at construction:
///  - e_ext[i][j] = int_0^1 A(c_i, z) l_j(z) dz          (i = 1..3, j = 0..3)
///  - w[i][a][b][c] = int_0^1 A(c_i, z) l_a l_b l_c dz   (cubic-term weights)
///  - eigendecomposition of the 3x3 core E = T diag(lambda) T^{-1}
/// Fixed-node Gauss-Legendre quadrature is exact for both integrand degrees
/// (5 and 11).
class Mb4Scheme {
public:
    static constexpr double kAlpha1Bound = -300.0 * 0.7770503941;

    explicit Mb4Scheme(double alpha1 = -300.0 * 19.0 / 8.0,
                       std::array<double, 3> nodes = {1.0 / 3.0, 2.0 / 3.0, 1.0});

    double alpha1() const { return alpha1_; }
    const std::array<double, 4>& nodes() const { return nodes_; }  // includes c0 = 0
    double eval_A(double tau, double zeta) const { return nls2d::eval_A(alpha1_, tau, zeta); }
    double lagrange(int i, double zeta) const { return lagrange_basis(nodes_, i, zeta); }

    /// The 3x3 matrix sandwiched between [tau, tau^2/2, tau^3/3] and
    /// [1, zeta, zeta^2]^T in eval_A.
    SmallMat a_coeff() const;

    double e_ext(int i, int j) const { return e_ext_[i - 1][j]; }            // i in 1..3, j in 0..3
    double w(int i, int a, int b, int c) const { return w_[i - 1][a][b][c]; }  // i in 1..3

    const std::array<double, 3>& eigenvalues() const { return eig_.values; }
    const SmallMat& t() const { return eig_.t; }
    const SmallMat& t_inv() const { return eig_.t_inv; }

    /// Plain-text key=value dump of every constant (17 significant digits).
    void dump(std::ostream& os) const;

    /// E table at a chosen quadrature order (>= 4 is exact); used by the
    /// constructor with 4 nodes and by quadrature-robustness checks.
    static std::array<std::array<double, 4>, 3> integrate_e(double alpha1,
                                                            const std::array<double, 4>& nodes,
                                                            int points);

private:
    double alpha1_;
    std::array<double, 4> nodes_;
    std::array<std::array<double, 4>, 3> e_ext_{};
    std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 3> w_{};
    Eig3 eig_;
};

}  // namespace nls2d
