#pragma once

#include <optional>

#include "jdgsvd/btb.hpp"
#include "jdgsvd/core.hpp"
#include "jdgsvd/dense.hpp"
#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

/// Which projected matrices a subspace carries besides its QR factors.
enum class CacheKind {
    none,           ///< standard extraction needs only R_A, R_B
    cpf,            ///< H_{A,B+} = U^T A (B^T B)^{-1} A^T U
    inverse_free,   ///< P = A^T A X, Q = B^T B X and their Gram matrices
};

CacheKind cache_kind_for(Method m);

/// Searching subspaces X = span(x), AX = span(u), BX = span(v) with
/// A x = u r_a and B x = v r_b.
struct SubspaceState {
    Matrix x;
    Matrix u;
    Matrix v;
    Matrix r_a;
    Matrix r_b;

    std::optional<Matrix> h_ab_dag;

    // Inverse-free caches. h_a = P^T P, h_b = Q^T Q, h_ab = P^T Q.
    std::optional<Matrix> p;
    std::optional<Matrix> q;
    std::optional<Matrix> h_a;
    std::optional<Matrix> h_b;
    std::optional<Matrix> h_ab;

    /// Incremental updates since the caches were last built from scratch.
    Index updates = 0;

    Index k() const noexcept { return x.cols(); }
};

/// Read-only pieces the subspace operations share.
struct SubspaceContext {
    const MatrixPair* pair = nullptr;
    CacheKind caches = CacheKind::none;
    /// Required for CacheKind::cpf.
    const BtbSolver* btb = nullptr;
};

/// Builds R_A, R_B, the left bases and the caches for an orthonormal x.
/// Used at initialization, for periodic refreshes, and as a test oracle.
SubspaceState build_subspace(const SubspaceContext& ctx, const Matrix& x);

/// One-dimensional subspace spanned by v0 after orthogonalizing it against
/// y_basis (an orthonormal basis of Y_c; may have zero columns).
SubspaceState init_subspace(const SubspaceContext& ctx, const Vector& v0,
                            const Matrix& y_basis = Matrix(0, 0));

/// Adds the component of t orthogonal to X and to y_basis. Throws
/// StagnationError when that component is below 1e-13 * ‖t‖.
void expand(const SubspaceContext& ctx, SubspaceState& s, const Vector& t,
            const Matrix& y_basis = Matrix(0, 0));

/// Replaces X by X Q for a column-orthonormal k x k' matrix Q, updating the
/// factors and caches without touching A or B.
void change_basis(SubspaceState& s, const Matrix& q);

/// Keeps span(X D1). Throws RankDeficiencyError if D1 is rank deficient.
void thick_restart(SubspaceState& s, const Matrix& d1);

/// Removes the converged direction X d, leaving a subspace orthogonal to
/// (A^T A + B^T B) X d. Requires k >= 2.
void purge(SubspaceState& s, const Vector& d);

/// Largest deviation of the state from its defining relations, for tests
/// and debug checks: orthonormality of the three bases and the two QR
/// relations relative to ‖A‖_1 + ‖B‖_1.
struct SubspaceDefects {
    double x_orthonormality = 0.0;
    double u_orthonormality = 0.0;
    double v_orthonormality = 0.0;
    double a_factorization = 0.0;
    double b_factorization = 0.0;
};

SubspaceDefects subspace_defects(const MatrixPair& pair, const SubspaceState& s);

}  // namespace jdgsvd
