#pragma once

#include <iosfwd>
#include <string>

#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

/// Reads a coordinate real (or integer) general or symmetric Matrix Market
/// file. Symmetric storage is mirrored and duplicates are summed. Throws
/// ParseError with the 1-based line number.
SparseMatrix read_matrix_market(const std::string& path);
SparseMatrix parse_matrix_market(std::istream& in);

/// Writes coordinate real general with %.17g values, which read back
/// bit-identically.
void write_matrix_market(const SparseMatrix& m, std::ostream& out);
void write_matrix_market(const SparseMatrix& m, const std::string& path);

}  // namespace jdgsvd
