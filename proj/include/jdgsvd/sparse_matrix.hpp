#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace jdgsvd {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Triplet {
    Index row;
    Index col;
    double value;
};

/// Compressed sparse row matrix. Immutable after construction; the 1-norm
/// is computed once when the matrix is built.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Takes ownership of CSR arrays and validates them.
    SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                 std::vector<Index> col_indices, std::vector<double> values);

    /// Duplicates are summed; explicit zeros are kept.
    static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries);
    /// Stores every entry with |a_ij| > drop_tol.
    static SparseMatrix from_dense(const Matrix& dense, double drop_tol = 0.0);
    static SparseMatrix identity(Index n);
    static SparseMatrix zero(Index rows, Index cols);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    const std::vector<Index>& row_offsets() const noexcept { return row_offsets_; }
    const std::vector<Index>& col_indices() const noexcept { return col_indices_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Maximum absolute column sum.
    double one_norm() const noexcept { return one_norm_; }

    Matrix to_dense() const;

private:
    void validate() const;

    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Index> row_offsets_{0};
    std::vector<Index> col_indices_;
    std::vector<double> values_;
    double one_norm_ = 0.0;
};

/// A (m x n, p x n) pair. Regularity is assumed, not checked here.
struct MatrixPair {
    SparseMatrix a;
    SparseMatrix b;

    MatrixPair(SparseMatrix a_in, SparseMatrix b_in);

    Index n() const noexcept { return a.cols(); }
    Index m() const noexcept { return a.rows(); }
    Index p() const noexcept { return b.rows(); }
};

}  // namespace jdgsvd
