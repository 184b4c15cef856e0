#pragma once

#include <complex>
#include <span>
#include <vector>

namespace nls2d {

/// Compressed-row sparse matrix. Column indices are strictly increasing
/// within each row; duplicate triplets are summed during assembly.
struct SparseCsr {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;   // size rows+1
    std::vector<int> col_idx;
    std::vector<double> values;

    int nnz() const { return static_cast<int>(col_idx.size()); }
};

struct Triplet {
    int row;
    int col;
    double value;
};

SparseCsr csr_from_triplets(int rows, int cols, std::vector<Triplet> entries);

SparseCsr transpose(const SparseCsr& a);

/// Exact structural + value symmetry (entry-wise comparison with A^T).
bool is_symmetric(const SparseCsr& a, double tol = 0.0);

double inf_norm(const SparseCsr& a);

void multiply(const SparseCsr& a, std::span<const double> x, std::span<double> y);
void multiply(const SparseCsr& a, std::span<const std::complex<double>> x,
              std::span<std::complex<double>> y);

}  // namespace nls2d
