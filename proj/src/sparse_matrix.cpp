#include "jdgsvd/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jdgsvd/errors.hpp"

namespace jdgsvd {

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
    validate();
    std::vector<double> colsum(static_cast<std::size_t>(cols_), 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        colsum[static_cast<std::size_t>(col_indices_[k])] += std::abs(values_[k]);
    }
    one_norm_ = colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

void SparseMatrix::validate() const {
    if (rows_ < 0 || cols_ < 0) throw DimensionError("negative matrix dimension");
    if (static_cast<Index>(row_offsets_.size()) != rows_ + 1) {
        throw DimensionError("row_offsets must have rows+1 entries");
    }
    if (row_offsets_.front() != 0 || row_offsets_.back() != nnz()) {
        throw DimensionError("row_offsets must start at 0 and end at the number of values");
    }
    if (col_indices_.size() != values_.size()) {
        throw DimensionError("col_indices and values differ in length");
    }
    for (Index i = 0; i < rows_; ++i) {
        const Index begin = row_offsets_[i];
        const Index end = row_offsets_[i + 1];
        if (end < begin) throw DimensionError("row_offsets must be nondecreasing");
        for (Index k = begin; k < end; ++k) {
            const Index c = col_indices_[k];
            if (c < 0 || c >= cols_) {
                throw DimensionError("column index out of range in row " + std::to_string(i));
            }
            if (k > begin && c <= col_indices_[k - 1]) {
                throw DimensionError("column indices not strictly increasing in row " +
                                     std::to_string(i));
            }
        }
    }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw DimensionError("triplet index out of range");
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& x, const Triplet& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<Index> cols_out;
    std::vector<double> vals_out;
    cols_out.reserve(entries.size());
    vals_out.reserve(entries.size());
    Index last_row = -1;
    Index last_col = -1;
    for (const auto& t : entries) {
        if (t.row == last_row && t.col == last_col) {
            vals_out.back() += t.value;
            continue;
        }
        cols_out.push_back(t.col);
        vals_out.push_back(t.value);
        ++offsets[static_cast<std::size_t>(t.row) + 1];
        last_row = t.row;
        last_col = t.col;
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense, double drop_tol) {
    std::vector<Index> offsets{0};
    std::vector<Index> cols_out;
    std::vector<double> vals_out;
    for (Index i = 0; i < dense.rows(); ++i) {
        for (Index j = 0; j < dense.cols(); ++j) {
            const double v = dense(i, j);
            if (std::abs(v) > drop_tol) {
                cols_out.push_back(j);
                vals_out.push_back(v);
            }
        }
        offsets.push_back(static_cast<Index>(vals_out.size()));
    }
    return SparseMatrix(dense.rows(), dense.cols(), std::move(offsets), std::move(cols_out),
                        std::move(vals_out));
}

SparseMatrix SparseMatrix::identity(Index n) {
    std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
    std::vector<Index> cols_out(static_cast<std::size_t>(n));
    for (Index i = 0; i <= n; ++i) offsets[static_cast<std::size_t>(i)] = i;
    for (Index i = 0; i < n; ++i) cols_out[static_cast<std::size_t>(i)] = i;
    return SparseMatrix(n, n, std::move(offsets), std::move(cols_out),
                        std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

SparseMatrix SparseMatrix::zero(Index rows, Index cols) {
    return SparseMatrix(rows, cols, std::vector<Index>(static_cast<std::size_t>(rows) + 1, 0), {},
                        {});
}

Matrix SparseMatrix::to_dense() const {
    Matrix dense = Matrix::Zero(rows_, cols_);
    for (Index i = 0; i < rows_; ++i) {
        for (Index k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            dense(i, col_indices_[k]) = values_[k];
        }
    }
    return dense;
}

MatrixPair::MatrixPair(SparseMatrix a_in, SparseMatrix b_in) : a(std::move(a_in)), b(std::move(b_in)) {
    if (a.cols() != b.cols()) {
        throw DimensionError("A and B must have the same number of columns");
    }
}

}  // namespace jdgsvd
