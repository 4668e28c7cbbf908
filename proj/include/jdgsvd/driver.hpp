#pragma once

#include <functional>

#include "jdgsvd/core.hpp"
#include "jdgsvd/extraction.hpp"
#include "jdgsvd/subspace.hpp"

namespace jdgsvd {

/// Converged partial GSVD (C_c, S_c, U_c, V_c, X_c) with
/// Y_c = (A^T A + B^T B) X_c and X_c^T Y_c = I.
struct DeflationSet {
    Vector c_c;
    Vector s_c;
    Matrix u_c;
    Matrix v_c;
    Matrix x_c;
    Matrix y_c;
    /// Orthonormal basis of span(Y_c), used to keep new directions out of it.
    Matrix y_basis;

    Index j() const noexcept { return x_c.cols(); }
};

DeflationSet empty_deflation_set(const MatrixPair& pair);

/// Appends a converged component. y is formed with fresh sparse products.
/// Throws NumericalBreakdown when x is not (A^T A + B^T B)-orthogonal to the
/// previous X_c to within 1e-6.
void deflate_append(DeflationSet& set, const GsvdComponent& c, const MatrixPair& pair);

/// Recomputes A x and B x, rescales x to (A^T A + B^T B)-norm one and takes
/// alpha, beta, u, v from the fresh products.
GsvdComponent certify(const MatrixPair& pair, const Vector& x);

/// Observation points for tests and instrumentation. All are optional.
struct SolverHooks {
    std::function<void(const SubspaceState&, const ExtractionResult&)> on_extraction;
    /// After the deflation set grew and the subspace was purged.
    std::function<void(const DeflationSet&, const SubspaceState&)> on_converged;
    std::function<void(const SubspaceState& before, const Matrix& kept, const SubspaceState& after)>
        on_restart;
};

/// Starting vector chosen by the options for a problem of this shape.
Vector initial_vector(const MatrixPair& pair, const SolverOptions& opts);

/// Computes the num_components nontrivial GSVD components nearest the target.
/// Running out of outer iterations is not an error: the result then has
/// converged == false. Method preconditions throw PreconditionError.
PartialGsvdResult solve(const MatrixPair& pair, const SolverOptions& opts,
                        const SolverHooks& hooks = {});

/// The coefficient vectors a thick restart keeps: `first`, then candidates in
/// order, skipping any that are numerically dependent on those already
/// taken, up to `count` columns.
Matrix select_restart_vectors(const Vector& first, const std::vector<Candidate>& candidates,
                              Index count);

}  // namespace jdgsvd
