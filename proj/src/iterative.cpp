#include "nls2d/iterative.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "nls2d/sparse_lu.hpp"

namespace nls2d {

Ilu0::Ilu0(const SparseCsr& a) : lu_(a) {
    const int n = a.rows;
    if (a.rows != a.cols) throw std::invalid_argument("Ilu0: matrix not square");
    diag_.assign(n, -1);
    for (int r = 0; r < n; ++r) {
        for (int p = lu_.row_ptr[r]; p < lu_.row_ptr[r + 1]; ++p)
            if (lu_.col_idx[p] == r) diag_[r] = p;
        if (diag_[r] < 0) throw SingularMatrixError("Ilu0: missing diagonal in row " + std::to_string(r));
    }

    // IKJ Gaussian elimination restricted to the pattern.
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i) {
        for (int p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) pos[lu_.col_idx[p]] = p;
        for (int p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) {
            const int k = lu_.col_idx[p];
            if (k >= i) break;
            const double piv = lu_.values[diag_[k]];
            if (piv == 0.0) throw SingularMatrixError("Ilu0: zero pivot in row " + std::to_string(k));
            const double lik = (lu_.values[p] /= piv);
            for (int pp = diag_[k] + 1; pp < lu_.row_ptr[k + 1]; ++pp) {
                const int j = lu_.col_idx[pp];
                const int pj = pos[j];
                if (pj >= 0) lu_.values[pj] -= lik * lu_.values[pp];
            }
        }
        for (int p = lu_.row_ptr[i]; p < lu_.row_ptr[i + 1]; ++p) pos[lu_.col_idx[p]] = -1;
    }
}

void Ilu0::apply(std::span<const double> r, std::span<double> z) const {
    const int n = lu_.rows;
    if (static_cast<int>(r.size()) != n || static_cast<int>(z.size()) != n)
        throw std::invalid_argument("Ilu0::apply: dimension mismatch");
    // forward: L y = r (unit lower)
    for (int i = 0; i < n; ++i) {
        double s = r[i];
        for (int p = lu_.row_ptr[i]; p < diag_[i]; ++p) s -= lu_.values[p] * z[lu_.col_idx[p]];
        z[i] = s;
    }
    // backward: U z = y
    for (int i = n - 1; i >= 0; --i) {
        double s = z[i];
        for (int p = diag_[i] + 1; p < lu_.row_ptr[i + 1]; ++p) s -= lu_.values[p] * z[lu_.col_idx[p]];
        z[i] = s / lu_.values[diag_[i]];
    }
}

namespace {
double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}
}  // namespace

double gmres(const SparseCsr& a, const Ilu0& prec, std::span<const double> b,
             std::span<double> x, const GmresOptions& opt) {
    const int n = a.rows;
    if (static_cast<int>(b.size()) != n || static_cast<int>(x.size()) != n)
        throw std::invalid_argument("gmres: dimension mismatch");
    const int m = std::min(opt.restart, n);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return 0.0;
    }

    std::fill(x.begin(), x.end(), 0.0);
    std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
    std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1), r(n), z(n), w(n);
    double rel = 1.0;

    for (int iter = 0; iter < opt.max_iters;) {
        // r = b - A x
        multiply(a, std::span<const double>(x), std::span<double>(r));
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        double beta = norm2(r);
        rel = beta / bnorm;
        if (rel <= opt.tol) return rel;

        for (int i = 0; i < n; ++i) v[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int j = 0;
        for (; j < m && iter < opt.max_iters; ++j, ++iter) {
            prec.apply(v[j], z);
            multiply(a, std::span<const double>(z), std::span<double>(w));
            for (int i = 0; i <= j; ++i) {
                double dot = 0.0;
                for (int kk = 0; kk < n; ++kk) dot += w[kk] * v[i][kk];
                h[i][j] = dot;
                for (int kk = 0; kk < n; ++kk) w[kk] -= dot * v[i][kk];
            }
            h[j + 1][j] = norm2(w);
            if (h[j + 1][j] > 0.0)
                for (int kk = 0; kk < n; ++kk) v[j + 1][kk] = w[kk] / h[j + 1][j];

            // apply accumulated Givens rotations, then form a new one
            for (int i = 0; i < j; ++i) {
                const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            const double denom = std::hypot(h[j][j], h[j + 1][j]);
            if (denom == 0.0) throw SingularMatrixError("gmres: breakdown");
            cs[j] = h[j][j] / denom;
            sn[j] = h[j + 1][j] / denom;
            h[j][j] = denom;
            h[j + 1][j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];

            rel = std::abs(g[j + 1]) / bnorm;
            if (rel <= opt.tol) {
                ++j;
                break;
            }
        }

        // y = H^{-1} g, x += M^{-1} (V y)
        std::vector<double> y(j);
        for (int i = j - 1; i >= 0; --i) {
            double s = g[i];
            for (int kk = i + 1; kk < j; ++kk) s -= h[i][kk] * y[kk];
            y[i] = s / h[i][i];
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int kk = 0; kk < j; ++kk)
            for (int i = 0; i < n; ++i) w[i] += v[kk][i] * y[kk];
        prec.apply(w, z);
        for (int i = 0; i < n; ++i) x[i] += z[i];

        multiply(a, std::span<const double>(x), std::span<double>(r));
        for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
        rel = norm2(r) / bnorm;
        if (rel <= opt.tol) return rel;
    }
    return rel;
}

}  // namespace nls2d
