#include "nls2d/small_dense.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nls2d {

SmallMat SmallMat::identity(int n) {
    SmallMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

SmallMat SmallMat::operator*(const SmallMat& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("SmallMat: shape mismatch");
    SmallMat out(rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < rhs.cols_; ++j) out(i, j) += a * rhs(k, j);
        }
    return out;
}

SmallMat SmallMat::inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("SmallMat::inverse: not square");
    const int n = rows_;
    SmallMat a = *this;
    SmallMat inv = identity(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) throw std::runtime_error("SmallMat::inverse: singular");
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a(k, j), a(piv, j));
                std::swap(inv(k, j), inv(piv, j));
            }
        const double d = a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) /= d;
            inv(k, j) /= d;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

double SmallMat::inf_norm() const {
    double best = 0.0;
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

namespace {

double cubic_eval(double c2, double c1, double c0, double x) {
    // monic x^3 - c2 x^2 + c1 x - c0
    return ((x - c2) * x + c1) * x - c0;
}

double cubic_deriv(double c2, double c1, double x) {
    return (3.0 * x - 2.0 * c2) * x + c1;
}

}  // namespace

Eig3 eig3_real(const SmallMat& e) {
    if (e.rows() != 3 || e.cols() != 3) throw std::invalid_argument("eig3_real: expected 3x3");
    const double scale = std::max(e.inf_norm(), 1e-300);

    // characteristic polynomial lambda^3 - c2 lambda^2 + c1 lambda - c0
    const double c2 = e(0, 0) + e(1, 1) + e(2, 2);
    const double c1 = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2) -
                      e(0, 2) * e(2, 0) + e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1);
    const double c0 = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
                      e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                      e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));

    // depressed cubic x^3 + p x + q with lambda = x + c2/3
    const double shift = c2 / 3.0;
    const double p = c1 - c2 * c2 / 3.0;
    const double q = -c0 + c1 * shift - 2.0 * c2 * c2 * c2 / 27.0;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (disc > 1e-14 * std::pow(scale, 6.0) || p >= 0.0)
        throw ComplexEigenvalueError("eig3_real: complex eigenvalue pair detected");

    const double rho = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * rho);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;

    std::array<double, 3> lam;
    for (int k = 0; k < 3; ++k)
        lam[k] = rho * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift;
    std::sort(lam.begin(), lam.end());

    // Newton polish on the monic characteristic polynomial
    for (double& l : lam) {
        for (int it = 0; it < 3; ++it) {
            const double f = cubic_eval(c2, c1, c0, l);
            const double fp = cubic_deriv(c2, c1, l);
            if (fp == 0.0) break;
            const double step = f / fp;
            l -= step;
            if (std::abs(step) <= 1e-18 * std::max(1.0, std::abs(l))) break;
        }
    }
    std::sort(lam.begin(), lam.end());

    const double sep = std::min(lam[1] - lam[0], lam[2] - lam[1]);
    if (sep < 1e-12 * std::max(1.0, std::abs(lam[2])))
        throw ComplexEigenvalueError("eig3_real: eigenvalues not separated");

    // eigenvectors by the best-conditioned cross product of rows of (E - lambda I)
    SmallMat t(3, 3);
    for (int k = 0; k < 3; ++k) {
        std::array<std::array<double, 3>, 3> m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = e(i, j) - (i == j ? lam[k] : 0.0);
        std::array<double, 3> best{0.0, 0.0, 0.0};
        double best_norm = -1.0;
        const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        for (const auto& pr : pairs) {
            const auto& a = m[pr[0]];
            const auto& b = m[pr[1]];
            const std::array<double, 3> v = {a[1] * b[2] - a[2] * b[1],
                                             a[2] * b[0] - a[0] * b[2],
                                             a[0] * b[1] - a[1] * b[0]};
            const double nn = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if (nn > best_norm) {
                best_norm = nn;
                best = v;
            }
        }
        if (best_norm <= 0.0)
            throw ComplexEigenvalueError("eig3_real: defective eigenvector");
        double nrm = std::sqrt(best_norm);
        int imax = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(best[i]) > std::abs(best[imax])) imax = i;
        if (best[imax] < 0.0) nrm = -nrm;  // deterministic sign
        for (int i = 0; i < 3; ++i) t(i, k) = best[i] / nrm;
    }

    Eig3 out{lam, t, t.inverse()};

    // residual health check: E T = T diag(lambda)
    SmallMat lam_m(3, 3);
    for (int i = 0; i < 3; ++i) lam_m(i, i) = lam[i];
    const SmallMat lhs = e * out.t;
    const SmallMat rhs = out.t * lam_m;
    double resid = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) resid = std::max(resid, std::abs(lhs(i, j) - rhs(i, j)));
    if (resid > 1e-12 * scale)
        throw ComplexEigenvalueError("eig3_real: eigendecomposition residual too large");
    return out;
}

}  // namespace nls2d
