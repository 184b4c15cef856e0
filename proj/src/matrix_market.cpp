#include "nls2d/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace nls2d {

void write_matrix_market(std::ostream& os, const SparseCsr& a) {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << a.rows << ' ' << a.cols << ' ' << a.nnz() << '\n';
    char buf[64];
    for (int r = 0; r < a.rows; ++r) {
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p) {
            std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r + 1, a.col_idx[p] + 1, a.values[p]);
            os << buf;
        }
    }
}

void write_matrix_market(const std::string& path, const SparseCsr& a) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_matrix_market: cannot open " + path);
    write_matrix_market(f, a);
}

}  // namespace nls2d
