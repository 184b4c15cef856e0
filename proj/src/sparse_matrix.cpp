#include "nls2d/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nls2d {

SparseCsr csr_from_triplets(int rows, int cols, std::vector<Triplet> entries) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("csr_from_triplets: negative dimension");
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
            throw std::invalid_argument("csr_from_triplets: index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseCsr m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    m.col_idx.reserve(entries.size());
    m.values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        const int r = entries[k].row;
        const int c = entries[k].col;
        double v = 0.0;
        while (k < entries.size() && entries[k].row == r && entries[k].col == c) {
            v += entries[k].value;
            ++k;
        }
        m.col_idx.push_back(c);
        m.values.push_back(v);
        m.row_ptr[r + 1] = static_cast<int>(m.col_idx.size());
    }
    for (int r = 0; r < rows; ++r)
        m.row_ptr[r + 1] = std::max(m.row_ptr[r + 1], m.row_ptr[r]);
    return m;
}

SparseCsr transpose(const SparseCsr& a) {
    SparseCsr t;
    t.rows = a.cols;
    t.cols = a.rows;
    t.row_ptr.assign(t.rows + 1, 0);
    t.col_idx.resize(a.col_idx.size());
    t.values.resize(a.values.size());
    for (int c : a.col_idx) ++t.row_ptr[c + 1];
    for (int r = 0; r < t.rows; ++r) t.row_ptr[r + 1] += t.row_ptr[r];
    std::vector<int> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    for (int r = 0; r < a.rows; ++r) {
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
            const int dst = next[a.col_idx[p]]++;
            t.col_idx[dst] = r;
            t.values[dst] = a.values[p];
        }
    }
    return t;
}

bool is_symmetric(const SparseCsr& a, double tol) {
    if (a.rows != a.cols) return false;
    const SparseCsr t = transpose(a);
    if (t.row_ptr != a.row_ptr || t.col_idx != a.col_idx) return false;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (std::abs(a.values[k] - t.values[k]) > tol) return false;
    }
    return true;
}

double inf_norm(const SparseCsr& a) {
    double best = 0.0;
    for (int r = 0; r < a.rows; ++r) {
        double s = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) s += std::abs(a.values[p]);
        best = std::max(best, s);
    }
    return best;
}

void multiply(const SparseCsr& a, std::span<const double> x, std::span<double> y) {
    if (static_cast<int>(x.size()) != a.cols || static_cast<int>(y.size()) != a.rows)
        throw std::invalid_argument("multiply: dimension mismatch");
    for (int r = 0; r < a.rows; ++r) {
        double s = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            s += a.values[p] * x[a.col_idx[p]];
        y[r] = s;
    }
}

void multiply(const SparseCsr& a, std::span<const std::complex<double>> x,
              std::span<std::complex<double>> y) {
    if (static_cast<int>(x.size()) != a.cols || static_cast<int>(y.size()) != a.rows)
        throw std::invalid_argument("multiply: dimension mismatch");
    for (int r = 0; r < a.rows; ++r) {
        std::complex<double> s = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            s += a.values[p] * x[a.col_idx[p]];
        y[r] = s;
    }
}

}  // namespace nls2d
