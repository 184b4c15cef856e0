#pragma once

#include <vector>

#include "nls2d/sparse_matrix.hpp"

namespace nls2d {

/// Fill-reducing elimination order for the pattern of A + A^T (approximate
/// minimum degree on the quotient graph, with element absorption).
/// Returns a permutation: order[k] = index of the k-th pivot.
std::vector<int> amd_order(const SparseCsr& a);

}  // namespace nls2d
