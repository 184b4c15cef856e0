#pragma once

#include <vector>

namespace nls2d {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [0,1]; exact for polynomials of degree <= 2n-1.
QuadratureRule gauss_legendre_01(int n);

}  // namespace nls2d
