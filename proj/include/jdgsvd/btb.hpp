#pragma once

#include <optional>

#include "jdgsvd/core.hpp"
#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

/// Lower band of L with B^T B = L L^T. Entry L(i, j), i - bandwidth <= j <= i,
/// is stored at bands[i * (bandwidth + 1) + (i - j)].
class BandedCholeskyFactor {
public:
    BandedCholeskyFactor(Index n, Index bandwidth, std::vector<double> bands);

    Index n() const noexcept { return n_; }
    Index bandwidth() const noexcept { return bandwidth_; }

    double operator()(Index i, Index j) const;

    /// Solves L y = b.
    Vector solve_lower(const Vector& b) const;
    /// Solves L^T y = b.
    Vector solve_upper(const Vector& b) const;
    /// (L L^T)^{-1} b.
    Vector solve(const Vector& b) const;
    /// L^T x.
    Vector multiply_transpose(const Vector& x) const;

    Matrix to_dense() const;

private:
    Index n_;
    Index bandwidth_;
    std::vector<double> bands_;
};

/// Half-bandwidth of B^T B implied by the sparsity of B: the widest column
/// span of any row of B.
Index btb_bandwidth(const SparseMatrix& b);

/// Banded Cholesky factorization of B^T B, formed directly in band storage.
/// Throws BandwidthError when the bandwidth exceeds the limit and
/// NotPositiveDefiniteError (naming the pivot) when B lacks full column rank
/// to working precision.
BandedCholeskyFactor btb_cholesky(const SparseMatrix& b, Index bandwidth_limit = 64);

struct CgResult {
    Vector x;
    Index iterations = 0;
    double relative_residual = 0.0;
};

/// Conjugate gradients on B^T B s = rhs, applying B^T B as two sparse products.
/// Throws ConvergenceError carrying the achieved relative residual.
CgResult btb_cg(const SparseMatrix& b, const Vector& rhs, double tol, Index max_iter);

/// Applies (B^T B)^{-1} by whichever route the options select. Immutable and
/// safe to call from several threads.
class BtbSolver {
public:
    BtbSolver(const SparseMatrix& b, const SolverOptions& opts);

    Vector solve(const Vector& rhs) const;
    /// Column-by-column solve; columns are independent and solved in parallel.
    Matrix solve_columns(const Matrix& rhs) const;
    /// Serial reference for solve_columns.
    Matrix solve_columns_serial(const Matrix& rhs) const;

    const std::optional<BandedCholeskyFactor>& factor() const noexcept { return factor_; }

private:
    const SparseMatrix* b_;
    std::optional<BandedCholeskyFactor> factor_;
    double cg_tol_;
    Index cg_max_iter_;
};

/// Single-shot form of the solve: uses the factor when one is given, CG otherwise.
Vector btb_solve(const SparseMatrix& b, const BandedCholeskyFactor* factor, const Vector& rhs,
                 const SolverOptions& opts);

}  // namespace jdgsvd
