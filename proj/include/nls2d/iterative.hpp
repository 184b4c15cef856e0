#pragma once

#include <span>
#include <vector>

#include "nls2d/sparse_matrix.hpp"

namespace nls2d {

/// Zero-fill incomplete LU on the matrix's own pattern.
class Ilu0 {
public:
    explicit Ilu0(const SparseCsr& a);
    void apply(std::span<const double> r, std::span<double> z) const;  // z = (LU)^{-1} r

private:
    SparseCsr lu_;            // factors stored in place of A's pattern
    std::vector<int> diag_;   // position of the diagonal in each row
};

struct GmresOptions {
    double tol = 1e-12;   // relative residual
    int restart = 50;
    int max_iters = 2000;
};

/// Right-preconditioned restarted GMRES. Returns the attained relative
/// residual; throws SingularMatrixError on breakdown.
double gmres(const SparseCsr& a, const Ilu0& prec, std::span<const double> b,
             std::span<double> x, const GmresOptions& opt = {});

}  // namespace nls2d
