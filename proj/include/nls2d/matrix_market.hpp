#pragma once

#include <iosfwd>
#include <string>

#include "nls2d/sparse_matrix.hpp"

namespace nls2d {

/// Coordinate-format Matrix Market dump (1-based indices, 17 significant digits).
void write_matrix_market(std::ostream& os, const SparseCsr& a);
void write_matrix_market(const std::string& path, const SparseCsr& a);

}  // namespace nls2d
