#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "nls2d/sparse_matrix.hpp"

namespace nls2d {

class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

/// Sparse LU factorization P A Q = L U with a fill-reducing column order Q
/// and threshold partial pivoting (diagonal preferred while it is within a
/// factor 1/tol of the column maximum). Immutable once built; solve() may be
/// called concurrently.
class SparseLu {
public:
    explicit SparseLu(const SparseCsr& a, double pivot_tol = 0.1);
    SparseLu(const SparseCsr& a, std::span<const int> column_order, double pivot_tol = 0.1);

    int dim() const { return n_; }
    long factor_nnz() const { return static_cast<long>(li_.size() + ui_.size()); }

    void solve(std::span<const double> b, std::span<double> x) const;
    std::vector<double> solve(std::span<const double> b) const;

private:
    void factor(const SparseCsr& a, std::span<const int> q, double tol);

    int n_ = 0;
    // L unit-lower CSC (diagonal first per column), U upper CSC (diagonal last),
    // both with rows numbered in pivot order.
    std::vector<int> lp_, li_, up_, ui_;
    std::vector<double> lx_, ux_;
    std::vector<int> pinv_;  // original row -> pivot position
    std::vector<int> q_;     // column order
};

}  // namespace nls2d
