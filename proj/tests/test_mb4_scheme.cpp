#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nls2d/mb4_scheme.hpp"
#include "nls2d/quadrature.hpp"
#include "support/scheme_reference.hpp"

using namespace nls2d;

TEST_CASE("eval_A: zero at tau = 0 and the alpha1-independent corner value") {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> z(0.0, 1.0);
    for (int k = 0; k < 20; ++k) CHECK(eval_A(scheme_reference::kAlpha1, 0.0, z(rng)) == 0.0);
    CHECK(eval_A(scheme_reference::kAlpha1, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_A(-500.0, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(eval_A(scheme_reference::kAlpha1, 0.5, 0.5) ==
          doctest::Approx(scheme_reference::kAHalfHalf).epsilon(1e-14));
}

TEST_CASE("lagrange basis: delta property, partition of unity, frozen value") {
    const std::array<double, 4> nodes = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(lagrange_basis(nodes, i, nodes[j]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> z(0.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        const double zeta = z(rng);
        double s = 0.0;
        for (int i = 0; i < 4; ++i) s += lagrange_basis(nodes, i, zeta);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(lagrange_basis(nodes, 3, 0.5) ==
          doctest::Approx(scheme_reference::kL3Half).epsilon(1e-15));
}

TEST_CASE("eval_A equals the explicit matrix product") {
    const Mb4Scheme scheme;
    const SmallMat m = scheme.a_coeff();
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    for (int trial = 0; trial < 25; ++trial) {
        const double tau = val(rng), zeta = val(rng);
        const double tv[3] = {tau, tau * tau / 2.0, tau * tau * tau / 3.0};
        const double zv[3] = {1.0, zeta, zeta * zeta};
        double prod = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) prod += tv[i] * m(i, j) * zv[j];
        // the matrix product carries ~|alpha1|-scale cancellation, so compare
        // at that scale
        CHECK(std::abs(scheme.eval_A(tau, zeta) - prod) <=
              1e-13 * std::abs(scheme.alpha1()));
    }
}

TEST_CASE("scheme constructor validates alpha1 and nodes") {
    CHECK_THROWS_AS(Mb4Scheme(-100.0), std::invalid_argument);           // forbidden alpha1
    CHECK_THROWS_AS(Mb4Scheme(-233.0), std::invalid_argument);           // just inside the bound
    CHECK_NOTHROW(Mb4Scheme(-234.0));
    CHECK_THROWS_AS(Mb4Scheme(-712.5, {0.25, 0.5, 0.75}), std::invalid_argument);  // c3 != 1
    CHECK_THROWS_AS(Mb4Scheme(-712.5, {0.5, 0.5, 1.0}), std::invalid_argument);    // duplicate
}

TEST_CASE("E matrix matches the exact-rational oracle") {
    const Mb4Scheme scheme;
    for (int i = 1; i <= 3; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(scheme.e_ext(i, j) - scheme_reference::kE[i - 1][j]) <=
                  1e-14 * std::abs(scheme_reference::kE[i - 1][j]) + 1e-15);
}

TEST_CASE("E row sums equal the plain integral of A (partition of unity)") {
    const Mb4Scheme scheme;
    const QuadratureRule q = gauss_legendre_01(4);
    for (int i = 1; i <= 3; ++i) {
        double direct = 0.0;
        for (std::size_t g = 0; g < q.nodes.size(); ++g)
            direct += q.weights[g] * scheme.eval_A(scheme.nodes()[i], q.nodes[g]);
        double rowsum = 0.0;
        for (int j = 0; j < 4; ++j) rowsum += scheme.e_ext(i, j);
        CHECK(rowsum == doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("E is insensitive to the quadrature order (4 vs 8 nodes)") {
    const Mb4Scheme scheme;
    const auto e8 = Mb4Scheme::integrate_e(scheme.alpha1(), scheme.nodes(), 8);
    for (int i = 1; i <= 3; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(std::abs(e8[i - 1][j] - scheme.e_ext(i, j)) <=
                  1e-15 * std::max(1.0, std::abs(e8[i - 1][j])));
}

TEST_CASE("W tensor: symmetry, collapse to E row sums, oracle agreement") {
    const Mb4Scheme scheme;
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    CHECK(scheme.w(i, a, b, c) == scheme.w(i, a, c, b));

    for (int i = 1; i <= 3; ++i) {
        double total = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) total += scheme.w(i, a, b, c);
        double rowsum = 0.0;
        for (int j = 0; j < 4; ++j) rowsum += scheme.e_ext(i, j);
        CHECK(total == doctest::Approx(rowsum).epsilon(1e-12));
    }

    double max_abs = 0.0;
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    max_abs = std::max(max_abs, std::abs(scheme_reference::kW[i - 1][a][b][c]));
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c)
                    CHECK(std::abs(scheme.w(i, a, b, c) - scheme_reference::kW[i - 1][a][b][c]) <=
                          1e-14 * max_abs);
}

TEST_CASE("W tensor agrees with direct 12-node quadrature of the degree-11 integrand") {
    const Mb4Scheme scheme;
    const QuadratureRule q = gauss_legendre_01(12);
    double scale = 0.0;
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(scheme.w(i, a, b, c)));
    for (int i = 1; i <= 3; ++i)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    double direct = 0.0;
                    for (std::size_t g = 0; g < q.nodes.size(); ++g) {
                        const double z = q.nodes[g];
                        direct += q.weights[g] * scheme.eval_A(scheme.nodes()[i], z) *
                                  scheme.lagrange(a, z) * scheme.lagrange(b, z) *
                                  scheme.lagrange(c, z);
                    }
                    CHECK(std::abs(scheme.w(i, a, b, c) - direct) <= 1e-13 * scale);
                }
}

TEST_CASE("eigenvalues: frozen oracle values, realness, node independence") {
    const Mb4Scheme scheme;
    for (int i = 0; i < 3; ++i)
        CHECK(scheme.eigenvalues()[i] ==
              doctest::Approx(scheme_reference::kEigenvalues[i]).epsilon(1e-13));

    const Mb4Scheme alt(-712.5, {0.25, 0.5, 1.0});
    const Mb4Scheme alt2(-712.5, {0.2, 0.6, 1.0});
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(alt.eigenvalues()[i] - scheme.eigenvalues()[i]) <= 1e-10);
        CHECK(std::abs(alt2.eigenvalues()[i] - scheme.eigenvalues()[i]) <= 1e-10);
    }

    // reconstruction residual of the eigendecomposition
    SmallMat core(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) core(i, j) = scheme.e_ext(i + 1, j + 1);
    SmallMat lam(3, 3);
    for (int i = 0; i < 3; ++i) lam(i, i) = scheme.eigenvalues()[i];
    const SmallMat recon = scheme.t() * lam * scheme.t_inv();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(recon(i, j) - core(i, j)) <= 1e-11 * core.inf_norm());
}

TEST_CASE("scheme dump is a parseable key=value table") {
    const Mb4Scheme scheme;
    std::ostringstream os;
    scheme.dump(os);
    std::istringstream is(os.str());
    std::string line;
    int count = 0;
    bool saw_alpha = false, saw_w = false;
    while (std::getline(is, line)) {
        const auto eq = line.find(" = ");
        REQUIRE(eq != std::string::npos);
        const std::string key = line.substr(0, eq);
        const double value = std::stod(line.substr(eq + 3));
        if (key == "alpha1") {
            saw_alpha = true;
            CHECK(value == -712.5);
        }
        if (key == "W_3_3_3_3") {
            saw_w = true;
            CHECK(value == doctest::Approx(scheme_reference::kW[2][3][3][3]).epsilon(1e-15));
        }
        ++count;
    }
    CHECK(saw_alpha);
    CHECK(saw_w);
    CHECK(count == 1 + 3 + 12 + 3 + 192);  // alpha1, c, E, eigenvalues, W
}
