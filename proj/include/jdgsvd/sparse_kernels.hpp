#pragma once

#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

// Two implementations of every sparse kernel. The serial ones are the
// reference used by the tests; the parallel ones are what the solver calls.
//
// spmv: both visit each row in index order, so results are bit-identical.
// spmv_transpose: the parallel version splits the rows into a fixed number of
// chunks that depends only on nnz (never on the thread count) and reduces the
// chunk partials in chunk order, so it is deterministic but may differ from
// the serial result in the last bits.

namespace serial {
Vector spmv(const SparseMatrix& m, const Vector& x);
Vector spmv_transpose(const SparseMatrix& m, const Vector& y);
double one_norm(const SparseMatrix& m);
}  // namespace serial

namespace parallel {
Vector spmv(const SparseMatrix& m, const Vector& x);
Vector spmv_transpose(const SparseMatrix& m, const Vector& y);
}  // namespace parallel

/// y = M x. Throws DimensionError on a length mismatch.
inline Vector spmv(const SparseMatrix& m, const Vector& x) { return parallel::spmv(m, x); }
/// y = M^T x without materializing M^T.
inline Vector spmv_transpose(const SparseMatrix& m, const Vector& y) {
    return parallel::spmv_transpose(m, y);
}
/// Cached max absolute column sum.
inline double one_norm(const SparseMatrix& m) { return m.one_norm(); }

/// Column-by-column M X and M^T Y for small blocks of vectors.
Matrix spmm(const SparseMatrix& m, const Matrix& x);
Matrix spmm_transpose(const SparseMatrix& m, const Matrix& y);

/// Number of row chunks used by parallel::spmv_transpose.
Index transpose_chunk_count(const SparseMatrix& m);

}  // namespace jdgsvd
