#include "nls2d/mb4_scheme.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "nls2d/quadrature.hpp"

namespace nls2d {

namespace {

using ld = long double;

// The alpha1 block of the coefficient matrix is the rank-1 outer product of
// (1, -6, 6), so the matrix product collapses to a cancellation-free form:
//   A = 4 tau - 3 tau^2 - 6 tau zeta + 6 tau^2 zeta
//       + alpha1 * tau (1 - tau)(1 - 2 tau) * (1 - 6 zeta + 6 zeta^2).
template <typename F>
F eval_A_impl(F a, F tau, F zeta) {
    const F base = tau * (F(4) - F(6) * zeta) + tau * tau * (F(6) * zeta - F(3));
    const F tfac = tau * (F(1) - tau) * (F(1) - F(2) * tau);
    const F zfac = F(1) - F(6) * zeta * (F(1) - zeta);
    return base + a * tfac * zfac;
}

// Gauss-Legendre (node, weight) pairs on [0,1] in extended precision.
std::vector<std::pair<ld, ld>> rule_ld(int n) {
    std::vector<std::pair<ld, ld>> r(n);
    for (int i = 0; i < n; ++i) {
        ld x = std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
        ld dp = 0.0L;
        for (int it = 0; it < 200; ++it) {
            ld p0 = 1.0L, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const ld p2 = ((2.0L * k - 1.0L) * x * p1 - (k - 1.0L) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0L);
            const ld dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-20L) break;
        }
        r[n - 1 - i] = {0.5L * (x + 1.0L), 1.0L / ((1.0L - x * x) * dp * dp)};
    }
    return r;
}

ld lagrange_ld(const std::array<ld, 4>& nodes, int i, ld z) {
    ld v = 1.0L;
    for (int j = 0; j < 4; ++j) {
        if (j != i) v *= (z - nodes[j]) / (nodes[i] - nodes[j]);
    }
    return v;
}

std::array<ld, 4> widen(const std::array<double, 4>& nodes) {
    return {static_cast<ld>(nodes[0]), static_cast<ld>(nodes[1]), static_cast<ld>(nodes[2]),
            static_cast<ld>(nodes[3])};
}

}  // namespace

double eval_A(double alpha1, double tau, double zeta) {
    return eval_A_impl<double>(alpha1, tau, zeta);
}

double lagrange_basis(const std::array<double, 4>& nodes, int i, double zeta) {
    if (i < 0 || i > 3) throw std::invalid_argument("lagrange_basis: index out of range");
    double v = 1.0;
    for (int j = 0; j < 4; ++j) {
        if (j == i) continue;
        const double d = nodes[i] - nodes[j];
        if (d == 0.0) throw std::invalid_argument("lagrange_basis: coincident nodes");
        v *= (zeta - nodes[j]) / d;
    }
    return v;
}

Mb4Scheme::Mb4Scheme(double alpha1, std::array<double, 3> c) : alpha1_(alpha1) {
    if (!(alpha1 < kAlpha1Bound))
        throw std::invalid_argument("Mb4Scheme: alpha1 must be < -300*0.7770503941");
    nodes_ = {0.0, c[0], c[1], c[2]};
    if (c[2] != 1.0) throw std::invalid_argument("Mb4Scheme: c3 must be 1");
    for (int i = 1; i < 4; ++i) {
        if (!(nodes_[i] > 0.0) || nodes_[i] > 1.0)
            throw std::invalid_argument("Mb4Scheme: nodes must lie in (0,1]");
        for (int j = 0; j < i; ++j)
            if (nodes_[i] == nodes_[j]) throw std::invalid_argument("Mb4Scheme: nodes must be distinct");
    }

    // The tables are assembled in extended precision: the quadrature is exact
    // for the polynomial degrees involved (5 for E, 11 for W), so the rounded
    // doubles match the exact integrals to the last bit or two.
    const std::array<ld, 4> nodes_ld = widen(nodes_);
    const ld alpha_ld = static_cast<ld>(alpha1_);

    // E: integrand degree 2 + 3 = 5, exact with 4 Gauss nodes.
    e_ext_ = integrate_e(alpha1_, nodes_, 4);

    // W: integrand degree 2 + 9 = 11, exact with 6 Gauss nodes. The two
    // unconjugated factors commute, so only b <= c is integrated and the
    // tensor is symmetric by construction.
    const auto q6 = rule_ld(6);
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int cc = b; cc < 4; ++cc) {
                    ld s = 0.0L;
                    for (const auto& [z, w] : q6)
                        s += w * eval_A_impl<ld>(alpha_ld, nodes_ld[i + 1], z) *
                             lagrange_ld(nodes_ld, a, z) * lagrange_ld(nodes_ld, b, z) *
                             lagrange_ld(nodes_ld, cc, z);
                    w_[i][a][b][cc] = static_cast<double>(s);
                    w_[i][a][cc][b] = w_[i][a][b][cc];
                }

    SmallMat core(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) core(i, j) = e_ext_[i][j + 1];
    eig_ = eig3_real(core);
}

SmallMat Mb4Scheme::a_coeff() const {
    const double a = alpha1_;
    SmallMat m(3, 3);
    m(0, 0) = a + 4.0;
    m(0, 1) = -6.0 * a - 6.0;
    m(0, 2) = 6.0 * a;
    m(1, 0) = -6.0 * a - 6.0;
    m(1, 1) = 36.0 * a + 12.0;
    m(1, 2) = -36.0 * a;
    m(2, 0) = 6.0 * a;
    m(2, 1) = -36.0 * a;
    m(2, 2) = 36.0 * a;
    return m;
}

std::array<std::array<double, 4>, 3> Mb4Scheme::integrate_e(double alpha1,
                                                            const std::array<double, 4>& nodes,
                                                            int points) {
    const std::array<ld, 4> nodes_ld = widen(nodes);
    const auto rule = rule_ld(points);
    std::array<std::array<double, 4>, 3> e{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) {
            ld s = 0.0L;
            for (const auto& [z, w] : rule)
                s += w * eval_A_impl<ld>(static_cast<ld>(alpha1), nodes_ld[i + 1], z) *
                     lagrange_ld(nodes_ld, j, z);
            e[i][j] = static_cast<double>(s);
        }
    return e;
}

void Mb4Scheme::dump(std::ostream& os) const {
    char buf[96];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s = %.17g\n", key, v);
        os << buf;
    };
    put("alpha1", alpha1_);
    for (int i = 1; i < 4; ++i) {
        std::snprintf(buf, sizeof(buf), "c%d = %.17g\n", i, nodes_[i]);
        os << buf;
    }
    for (int i = 1; i <= 3; ++i)
        for (int j = 0; j < 4; ++j) {
            char key[16];
            std::snprintf(key, sizeof(key), "E_%d_%d", i, j);
            put(key, e_ext(i, j));
        }
    for (int i = 0; i < 3; ++i) {
        char key[16];
        std::snprintf(key, sizeof(key), "lambda%d", i + 1);
        put(key, eig_.values[i]);
    }
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    char key[24];
                    std::snprintf(key, sizeof(key), "W_%d_%d_%d_%d", i, a, b, c);
                    put(key, w(i, a, b, c));
                }
}

}  // namespace nls2d
