#include "jdgsvd/btb.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "jdgsvd/errors.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace jdgsvd {

BandedCholeskyFactor::BandedCholeskyFactor(Index n, Index bandwidth, std::vector<double> bands)
    : n_(n), bandwidth_(bandwidth), bands_(std::move(bands)) {
    if (static_cast<Index>(bands_.size()) != n_ * (bandwidth_ + 1)) {
        throw DimensionError("band storage size does not match n * (bandwidth + 1)");
    }
}

double BandedCholeskyFactor::operator()(Index i, Index j) const {
    if (j > i || i - j > bandwidth_) return 0.0;
    return bands_[static_cast<std::size_t>(i * (bandwidth_ + 1) + (i - j))];
}

Vector BandedCholeskyFactor::solve_lower(const Vector& b) const {
    if (b.size() != n_) throw DimensionError("solve_lower: length mismatch");
    Vector y = b;
    const Index w = bandwidth_ + 1;
    for (Index i = 0; i < n_; ++i) {
        const double* row = &bands_[static_cast<std::size_t>(i * w)];
        double s = y[i];
        const Index j0 = std::max<Index>(0, i - bandwidth_);
        for (Index j = j0; j < i; ++j) s -= row[i - j] * y[j];
        y[i] = s / row[0];
    }
    return y;
}

Vector BandedCholeskyFactor::solve_upper(const Vector& b) const {
    if (b.size() != n_) throw DimensionError("solve_upper: length mismatch");
    Vector y = b;
    const Index w = bandwidth_ + 1;
    for (Index i = n_ - 1; i >= 0; --i) {
        y[i] /= bands_[static_cast<std::size_t>(i * w)];
        const double yi = y[i];
        const double* row = &bands_[static_cast<std::size_t>(i * w)];
        const Index j0 = std::max<Index>(0, i - bandwidth_);
        // Column i of L^T is row i of L.
        for (Index j = j0; j < i; ++j) y[j] -= row[i - j] * yi;
    }
    return y;
}

Vector BandedCholeskyFactor::solve(const Vector& b) const { return solve_upper(solve_lower(b)); }

Vector BandedCholeskyFactor::multiply_transpose(const Vector& x) const {
    if (x.size() != n_) throw DimensionError("multiply_transpose: length mismatch");
    Vector y = Vector::Zero(n_);
    const Index w = bandwidth_ + 1;
    for (Index i = 0; i < n_; ++i) {
        const double* row = &bands_[static_cast<std::size_t>(i * w)];
        const Index j0 = std::max<Index>(0, i - bandwidth_);
        for (Index j = j0; j <= i; ++j) y[j] += row[i - j] * x[i];
    }
    return y;
}

Matrix BandedCholeskyFactor::to_dense() const {
    Matrix l = Matrix::Zero(n_, n_);
    for (Index i = 0; i < n_; ++i) {
        for (Index j = std::max<Index>(0, i - bandwidth_); j <= i; ++j) l(i, j) = (*this)(i, j);
    }
    return l;
}

Index btb_bandwidth(const SparseMatrix& b) {
    Index bw = 0;
    const auto& off = b.row_offsets();
    const auto& col = b.col_indices();
    for (Index i = 0; i < b.rows(); ++i) {
        if (off[i + 1] > off[i]) bw = std::max(bw, col[off[i + 1] - 1] - col[off[i]]);
    }
    return bw;
}

BandedCholeskyFactor btb_cholesky(const SparseMatrix& b, Index bandwidth_limit) {
    const Index n = b.cols();
    const Index bw = btb_bandwidth(b);
    if (bw > bandwidth_limit) {
        throw BandwidthError("B^T B has half-bandwidth " + std::to_string(bw) +
                             " above the limit " + std::to_string(bandwidth_limit) +
                             "; use the CG route (btb_solve = cg)");
    }
    const Index w = bw + 1;
    std::vector<double> band(static_cast<std::size_t>(n * w), 0.0);

    // Accumulate B^T B row by row of B: each row contributes an outer product
    // of its entries, all of which fall inside the band.
    const auto& off = b.row_offsets();
    const auto& col = b.col_indices();
    const auto& val = b.values();
    for (Index r = 0; r < b.rows(); ++r) {
        for (Index k2 = off[r]; k2 < off[r + 1]; ++k2) {
            const Index i = col[k2];
            for (Index k1 = off[r]; k1 <= k2; ++k1) {
                const Index j = col[k1];
                band[static_cast<std::size_t>(i * w + (i - j))] += val[k2] * val[k1];
            }
        }
    }

    double max_diag = 0.0;
    for (Index i = 0; i < n; ++i) max_diag = std::max(max_diag, band[static_cast<std::size_t>(i * w)]);
    const double pivot_floor =
        static_cast<double>(std::max<Index>(n, 1)) * std::numeric_limits<double>::epsilon() * max_diag;

    for (Index j = 0; j < n; ++j) {
        double* rowj = &band[static_cast<std::size_t>(j * w)];
        double d = rowj[0];
        const Index k0 = std::max<Index>(0, j - bw);
        for (Index k = k0; k < j; ++k) d -= rowj[j - k] * rowj[j - k];
        if (!(d > pivot_floor)) {
            throw NotPositiveDefiniteError(
                "B^T B is not positive definite: B is rank deficient to working precision", j);
        }
        const double ljj = std::sqrt(d);
        rowj[0] = ljj;
        const Index i_end = std::min(n - 1, j + bw);
        for (Index i = j + 1; i <= i_end; ++i) {
            double* rowi = &band[static_cast<std::size_t>(i * w)];
            double s = rowi[i - j];
            const Index kk0 = std::max<Index>(k0, i - bw);
            for (Index k = kk0; k < j; ++k) s -= rowi[i - k] * rowj[j - k];
            rowi[i - j] = s / ljj;
        }
    }
    return BandedCholeskyFactor(n, bw, std::move(band));
}

CgResult btb_cg(const SparseMatrix& b, const Vector& rhs, double tol, Index max_iter) {
    const Index n = b.cols();
    if (rhs.size() != n) throw DimensionError("btb_cg: rhs length mismatch");
    CgResult out;
    out.x = Vector::Zero(n);
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return out;

    Vector r = rhs;
    Vector p = r;
    double rr = r.squaredNorm();
    const double stop = tol * rhs_norm;
    for (Index it = 1; it <= max_iter; ++it) {
        const Vector bp = spmv(b, p);
        const double pap = bp.squaredNorm();
        if (!(pap > 0.0)) break;
        const double step = rr / pap;
        out.x += step * p;
        r -= step * spmv_transpose(b, bp);
        const double rr_new = r.squaredNorm();
        out.iterations = it;
        if (std::sqrt(rr_new) <= stop) {
            // Confirm with the true residual; the recurrence can drift.
            const double true_res = (rhs - spmv_transpose(b, spmv(b, out.x))).norm();
            if (true_res <= stop) {
                out.relative_residual = true_res / rhs_norm;
                return out;
            }
            r = rhs - spmv_transpose(b, spmv(b, out.x));
            p = r;
            rr = r.squaredNorm();
            continue;
        }
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    const double achieved = (rhs - spmv_transpose(b, spmv(b, out.x))).norm() / rhs_norm;
    throw ConvergenceError("CG on B^T B did not converge in " + std::to_string(max_iter) +
                               " iterations",
                           achieved);
}

BtbSolver::BtbSolver(const SparseMatrix& b, const SolverOptions& opts)
    : b_(&b),
      cg_tol_(opts.cg_tol),
      cg_max_iter_(opts.cg_max_iter > 0 ? opts.cg_max_iter : 2 * b.cols()) {
    if (opts.btb_solve == BtbSolveKind::banded_cholesky) {
        factor_ = btb_cholesky(b, opts.btb_bandwidth_limit);
    }
}

Vector BtbSolver::solve(const Vector& rhs) const {
    if (factor_) return factor_->solve(rhs);
    return btb_cg(*b_, rhs, cg_tol_, cg_max_iter_).x;
}

Matrix BtbSolver::solve_columns(const Matrix& rhs) const {
    Matrix out(rhs.rows(), rhs.cols());
    const Index cols = rhs.cols();
    // Errors cannot propagate out of an OpenMP region; collect the first one.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (cols > 1)
    for (Index j = 0; j < cols; ++j) {
        try {
            out.col(j) = solve(rhs.col(j));
        } catch (...) {
#pragma omp critical(jdgsvd_btb_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

Matrix BtbSolver::solve_columns_serial(const Matrix& rhs) const {
    Matrix out(rhs.rows(), rhs.cols());
    for (Index j = 0; j < rhs.cols(); ++j) out.col(j) = solve(rhs.col(j));
    return out;
}

Vector btb_solve(const SparseMatrix& b, const BandedCholeskyFactor* factor, const Vector& rhs,
                 const SolverOptions& opts) {
    if (rhs.size() != b.cols()) throw DimensionError("btb_solve: rhs length mismatch");
    if (factor) return factor->solve(rhs);
    const Index max_iter = opts.cg_max_iter > 0 ? opts.cg_max_iter : 2 * b.cols();
    return btb_cg(b, rhs, opts.cg_tol, max_iter).x;
}

}  // namespace jdgsvd
