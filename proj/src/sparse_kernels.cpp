#include "jdgsvd/sparse_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "jdgsvd/errors.hpp"

namespace jdgsvd {
namespace {

constexpr Index kNnzPerChunk = 16384;
constexpr Index kMaxChunks = 16;

void check_length(Index expected, Index got, const char* what) {
    if (expected != got) {
        throw DimensionError(std::string(what) + ": vector length " + std::to_string(got) +
                             " does not match " + std::to_string(expected));
    }
}

inline double row_dot(const SparseMatrix& m, Index i, const double* x) {
    const auto& off = m.row_offsets();
    const auto& col = m.col_indices();
    const auto& val = m.values();
    double s = 0.0;
    for (Index k = off[i]; k < off[i + 1]; ++k) s += val[k] * x[col[k]];
    return s;
}

inline void scatter_rows(const SparseMatrix& m, Index row_begin, Index row_end, const double* y,
                         double* out) {
    const auto& off = m.row_offsets();
    const auto& col = m.col_indices();
    const auto& val = m.values();
    for (Index i = row_begin; i < row_end; ++i) {
        const double yi = y[i];
        for (Index k = off[i]; k < off[i + 1]; ++k) out[col[k]] += val[k] * yi;
    }
}

}  // namespace

Index transpose_chunk_count(const SparseMatrix& m) {
    return std::clamp<Index>(m.nnz() / kNnzPerChunk, 1, std::max<Index>(1, std::min(kMaxChunks, m.rows())));
}

namespace serial {

Vector spmv(const SparseMatrix& m, const Vector& x) {
    check_length(m.cols(), x.size(), "spmv");
    Vector y(m.rows());
    for (Index i = 0; i < m.rows(); ++i) y[i] = row_dot(m, i, x.data());
    return y;
}

Vector spmv_transpose(const SparseMatrix& m, const Vector& y) {
    check_length(m.rows(), y.size(), "spmv_transpose");
    Vector x = Vector::Zero(m.cols());
    scatter_rows(m, 0, m.rows(), y.data(), x.data());
    return x;
}

double one_norm(const SparseMatrix& m) {
    std::vector<double> colsum(static_cast<std::size_t>(m.cols()), 0.0);
    for (Index k = 0; k < m.nnz(); ++k) colsum[m.col_indices()[k]] += std::abs(m.values()[k]);
    return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

}  // namespace serial

namespace parallel {

Vector spmv(const SparseMatrix& m, const Vector& x) {
    check_length(m.cols(), x.size(), "spmv");
    Vector y(m.rows());
    const Index rows = m.rows();
    const double* xp = x.data();
    double* yp = y.data();
#pragma omp parallel for schedule(static) if (m.nnz() > kNnzPerChunk)
    for (Index i = 0; i < rows; ++i) yp[i] = row_dot(m, i, xp);
    return y;
}

Vector spmv_transpose(const SparseMatrix& m, const Vector& y) {
    check_length(m.rows(), y.size(), "spmv_transpose");
    const Index chunks = transpose_chunk_count(m);
    if (chunks == 1) return serial::spmv_transpose(m, y);

    const Index n = m.cols();
    const Index rows = m.rows();
    Matrix partial = Matrix::Zero(n, chunks);
#pragma omp parallel for schedule(static)
    for (Index c = 0; c < chunks; ++c) {
        const Index begin = rows * c / chunks;
        const Index end = rows * (c + 1) / chunks;
        scatter_rows(m, begin, end, y.data(), partial.col(c).data());
    }
    Vector x(n);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) {
        double s = 0.0;
        for (Index c = 0; c < chunks; ++c) s += partial(j, c);
        x[j] = s;
    }
    return x;
}

}  // namespace parallel

Matrix spmm(const SparseMatrix& m, const Matrix& x) {
    check_length(m.cols(), x.rows(), "spmm");
    Matrix y(m.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) y.col(j) = spmv(m, x.col(j));
    return y;
}

Matrix spmm_transpose(const SparseMatrix& m, const Matrix& y) {
    check_length(m.rows(), y.rows(), "spmm_transpose");
    Matrix x(m.cols(), y.cols());
    for (Index j = 0; j < y.cols(); ++j) x.col(j) = spmv_transpose(m, y.col(j));
    return x;
}

}  // namespace jdgsvd
