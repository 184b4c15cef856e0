#include "nls2d/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nls2d/ordering.hpp"

namespace nls2d {

SparseLu::SparseLu(const SparseCsr& a, double pivot_tol) {
    const std::vector<int> q = amd_order(a);
    factor(a, q, pivot_tol);
}

SparseLu::SparseLu(const SparseCsr& a, std::span<const int> column_order, double pivot_tol) {
    factor(a, column_order, pivot_tol);
}

void SparseLu::factor(const SparseCsr& a, std::span<const int> q, double tol) {
    if (a.rows != a.cols) throw std::invalid_argument("SparseLu: matrix not square");
    n_ = a.rows;
    if (static_cast<int>(q.size()) != n_) throw std::invalid_argument("SparseLu: bad column order");
    q_.assign(q.begin(), q.end());
    pinv_.assign(n_, -1);

    const SparseCsr at = transpose(a);  // row j of at = column j of a

    lp_.assign(1, 0);
    up_.assign(1, 0);
    li_.clear();
    lx_.clear();
    ui_.clear();
    ux_.clear();
    const long guess = 8L * std::max(1, a.nnz());
    li_.reserve(guess);
    lx_.reserve(guess);
    ui_.reserve(guess);
    ux_.reserve(guess);

    std::vector<double> x(n_, 0.0);
    std::vector<int> topo(n_), stack(n_), pstack(n_);
    std::vector<int> marked(n_, -1);

    for (int k = 0; k < n_; ++k) {
        const int col = q_[k];

        // --- pattern of x = L \ A(:,col) by DFS over the partial L ---
        int top = n_;
        for (int p = at.row_ptr[col]; p < at.row_ptr[col + 1]; ++p) {
            const int start = at.col_idx[p];
            if (marked[start] == k) continue;
            int head = 0;
            stack[0] = start;
            while (head >= 0) {
                const int i = stack[head];
                const int piv = pinv_[i];
                if (marked[i] != k) {
                    marked[i] = k;
                    pstack[head] = piv < 0 ? 0 : lp_[piv];
                }
                bool descended = false;
                if (piv >= 0) {
                    int pp = pstack[head];
                    const int pend = lp_[piv + 1];
                    for (; pp < pend; ++pp) {
                        const int child = li_[pp];  // original row index
                        if (marked[child] != k) {
                            pstack[head] = pp + 1;
                            stack[++head] = child;
                            descended = true;
                            break;
                        }
                    }
                    if (!descended) pstack[head] = pend;
                }
                if (!descended) {
                    topo[--top] = i;
                    --head;
                }
            }
        }

        // --- numeric sparse triangular solve (topological order) ---
        for (int p = top; p < n_; ++p) x[topo[p]] = 0.0;
        for (int p = at.row_ptr[col]; p < at.row_ptr[col + 1]; ++p)
            x[at.col_idx[p]] = at.values[p];
        for (int p = top; p < n_; ++p) {
            const int i = topo[p];
            const int piv = pinv_[i];
            if (piv < 0) continue;
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (int pp = lp_[piv] + 1; pp < lp_[piv + 1]; ++pp)
                x[li_[pp]] -= lx_[pp] * xi;
        }

        // --- pivot: prefer the natural diagonal within the threshold ---
        int ipiv = -1;
        double amax = 0.0;
        for (int p = top; p < n_; ++p) {
            const int i = topo[p];
            if (pinv_[i] < 0) {
                const double t = std::abs(x[i]);
                if (t > amax) {
                    amax = t;
                    ipiv = i;
                }
            }
        }
        if (ipiv < 0 || amax <= 0.0)
            throw SingularMatrixError("SparseLu: zero pivot at column " + std::to_string(k));
        if (pinv_[col] < 0 && std::abs(x[col]) >= tol * amax) ipiv = col;
        const double pivot = x[ipiv];

        // --- assemble U column k (pivotal rows) and L column k ---
        for (int p = top; p < n_; ++p) {
            const int i = topo[p];
            if (pinv_[i] >= 0) {
                ui_.push_back(pinv_[i]);
                ux_.push_back(x[i]);
            }
        }
        ui_.push_back(k);
        ux_.push_back(pivot);
        up_.push_back(static_cast<int>(ui_.size()));

        pinv_[ipiv] = k;
        li_.push_back(ipiv);
        lx_.push_back(1.0);
        for (int p = top; p < n_; ++p) {
            const int i = topo[p];
            if (pinv_[i] < 0) {
                li_.push_back(i);
                lx_.push_back(x[i] / pivot);
            }
            x[i] = 0.0;
        }
        lp_.push_back(static_cast<int>(li_.size()));
    }

    // L row indices from original to pivot numbering.
    for (auto& i : li_) i = pinv_[i];
}

void SparseLu::solve(std::span<const double> b, std::span<double> x) const {
    if (static_cast<int>(b.size()) != n_ || static_cast<int>(x.size()) != n_)
        throw std::invalid_argument("SparseLu::solve: dimension mismatch");
    std::vector<double> w(n_);
    for (int i = 0; i < n_; ++i) w[pinv_[i]] = b[i];
    // L z = w, unit diagonal stored first in each column
    for (int j = 0; j < n_; ++j) {
        const double wj = w[j];
        if (wj == 0.0) continue;
        for (int p = lp_[j] + 1; p < lp_[j + 1]; ++p) w[li_[p]] -= lx_[p] * wj;
    }
    // U y = z, diagonal stored last in each column
    for (int j = n_ - 1; j >= 0; --j) {
        const double wj = (w[j] /= ux_[up_[j + 1] - 1]);
        if (wj == 0.0) continue;
        for (int p = up_[j]; p < up_[j + 1] - 1; ++p) w[ui_[p]] -= ux_[p] * wj;
    }
    for (int k = 0; k < n_; ++k) x[q_[k]] = w[k];
}

std::vector<double> SparseLu::solve(std::span<const double> b) const {
    std::vector<double> x(n_);
    solve(b, x);
    return x;
}

}  // namespace nls2d
