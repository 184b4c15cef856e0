#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace nls2d {

/// Row-major dense matrix for the small scheme-side work (dimension <= 8).
class SmallMat {
public:
    SmallMat() = default;
    SmallMat(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0 || rows > kMax || cols > kMax)
            throw std::invalid_argument("SmallMat: dimension out of range");
        data_.fill(0.0);
    }
    static SmallMat identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * kMax + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * kMax + c]; }

    SmallMat operator*(const SmallMat& rhs) const;
    SmallMat inverse() const;   // Gaussian elimination with partial pivoting
    double inf_norm() const;

    static constexpr int kMax = 8;

private:
    int rows_ = 0, cols_ = 0;
    std::array<double, kMax * kMax> data_{};
};

struct Eig3 {
    std::array<double, 3> values;  // ascending
    SmallMat t;                    // columns are eigenvectors
    SmallMat t_inv;
};

class ComplexEigenvalueError : public std::runtime_error {
public:
    explicit ComplexEigenvalueError(const std::string& what) : std::runtime_error(what) {}
};

/// Eigendecomposition of a real 3x3 matrix that is required to have three
/// distinct real eigenvalues; throws ComplexEigenvalueError otherwise.
Eig3 eig3_real(const SmallMat& e);

}  // namespace nls2d
