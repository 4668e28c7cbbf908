#pragma once

#include <functional>

#include "jdgsvd/core.hpp"
#include "jdgsvd/extraction.hpp"

namespace jdgsvd {

/// The deflated correction equation
///   (I - Y_p X_p^T)(A^T A - rho^2 B^T B)(I - X_p Y_p^T) t = rhs,  t ⟂ Y_p.
struct CorrectionContext {
    double rho = 0.0;
    RhoMode rho_mode = RhoMode::fixed_tau;
    Matrix x_p;
    Matrix y_p;
    Vector rhs;
};

/// x_c and y_c hold the converged vectors and (A^T A + B^T B) x_c; they may
/// have zero columns.
CorrectionContext build_context(const ExtractionResult& res, const Matrix& x_c, const Matrix& y_c,
                                const MatrixPair& pair, const SolverOptions& opts);

/// Applies the projected operator with four sparse products.
Vector apply_operator(const CorrectionContext& ctx, const MatrixPair& pair, const Vector& t);

using LinearOperator = std::function<Vector(const Vector&)>;
/// Called after every iteration with the iteration count and the iterate.
using IterateObserver = std::function<void(Index, const Vector&)>;

struct MinresResult {
    Vector x;
    Index iterations = 0;
    /// Recurrence estimate of ‖b - A x‖ / ‖b‖.
    double relative_residual = 0.0;
    bool converged = false;
};

/// MINRES for a symmetric (possibly indefinite) operator from a zero start.
/// Stops when the residual estimate drops to tol * ‖b‖ or after max_iter
/// steps; the last iterate is returned either way. Throws NumericalBreakdown
/// on NaN.
MinresResult minres(const LinearOperator& op, const Vector& b, double tol, Index max_iter,
                    const IterateObserver& observer = {});

struct CorrectionSolution {
    Vector t;
    Index iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// MINRES on the correction equation with the inner stopping rule
/// min{2 c eps, 0.01}. The returned t is orthogonal to Y_p.
CorrectionSolution minres_solve(const CorrectionContext& ctx, const MatrixPair& pair,
                                const SolverOptions& opts, const IterateObserver& observer = {});

/// Dense direct solve of the same equation through the bordered system
/// [[A^T A - rho^2 B^T B, Y_p], [Y_p^T, 0]]. Small problems only.
CorrectionSolution exact_solve(const CorrectionContext& ctx, const MatrixPair& pair);

}  // namespace jdgsvd
