#include "jdgsvd/correction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "jdgsvd/errors.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace jdgsvd {

CorrectionContext build_context(const ExtractionResult& res, const Matrix& x_c, const Matrix& y_c,
                                const MatrixPair& pair, const SolverOptions& opts) {
    const Index n = pair.n();
    if (x_c.cols() != y_c.cols() || (x_c.cols() > 0 && (x_c.rows() != n || y_c.rows() != n))) {
        throw DimensionError("deflation blocks do not match the problem");
    }
    CorrectionContext ctx;
    const double scale = res.beta * pair.a.one_norm() + res.alpha * pair.b.one_norm();
    if (res.residual_norm > scale * opts.fixtol) {
        ctx.rho = opts.target;
        ctx.rho_mode = RhoMode::fixed_tau;
    } else {
        ctx.rho = res.theta;
        ctx.rho_mode = RhoMode::dynamic;
    }
    const Index j = x_c.cols();
    ctx.x_p.resize(n, j + 1);
    ctx.y_p.resize(n, j + 1);
    if (j > 0) {
        ctx.x_p.leftCols(j) = x_c;
        ctx.y_p.leftCols(j) = y_c;
    }
    ctx.x_p.col(j) = res.x;
    ctx.y_p.col(j) = res.alpha * res.atu + res.beta * res.btv;
    ctx.rhs = -(res.residual - ctx.y_p * (ctx.x_p.transpose() * res.residual));
    return ctx;
}

Vector apply_operator(const CorrectionContext& ctx, const MatrixPair& pair, const Vector& t) {
    const Vector s = t - ctx.x_p * (ctx.y_p.transpose() * t);
    Vector w = spmv_transpose(pair.a, spmv(pair.a, s));
    w -= (ctx.rho * ctx.rho) * spmv_transpose(pair.b, spmv(pair.b, s));
    return w - ctx.y_p * (ctx.x_p.transpose() * w);
}

MinresResult minres(const LinearOperator& op, const Vector& b, double tol, Index max_iter,
                    const IterateObserver& observer) {
    MinresResult out;
    const Index n = b.size();
    out.x = Vector::Zero(n);
    const double beta1 = b.norm();
    if (beta1 == 0.0) {
        out.converged = true;
        return out;
    }
    if (!std::isfinite(beta1)) throw NumericalBreakdown("MINRES right-hand side is not finite");

    // Lanczos three-term recurrence with Givens rotations applied on the fly.
    Vector r1 = b;
    Vector r2 = b;
    Vector y = b;
    Vector v(n);
    Vector w = Vector::Zero(n);
    Vector w1(n);
    Vector w2 = Vector::Zero(n);
    double beta = beta1;
    double oldb = 0.0;
    double dbar = 0.0;
    double epsln = 0.0;
    double phibar = beta1;
    double cs = -1.0;
    double sn = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();

    for (Index itn = 1; itn <= max_iter; ++itn) {
        v = y / beta;
        y = op(v);
        if (itn >= 2) y -= (beta / oldb) * r1;
        const double alfa = v.dot(y);
        y -= (alfa / beta) * r2;
        r1 = r2;
        r2 = y;
        oldb = beta;
        beta = r2.norm();
        if (!std::isfinite(alfa) || !std::isfinite(beta)) {
            throw NumericalBreakdown("MINRES produced a non-finite value");
        }

        const double oldeps = epsln;
        const double delta = cs * dbar + sn * alfa;
        const double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;
        const double gamma = std::max(std::hypot(gbar, beta), eps);
        cs = gbar / gamma;
        sn = beta / gamma;
        const double phi = cs * phibar;
        phibar = sn * phibar;

        w1 = w2;
        w2 = w;
        w = (v - oldeps * w1 - delta * w2) / gamma;
        out.x += phi * w;
        out.iterations = itn;
        out.relative_residual = std::abs(phibar) / beta1;
        if (observer) observer(itn, out.x);

        if (out.relative_residual <= tol) {
            out.converged = true;
            break;
        }
        // Invariant Krylov subspace: the current iterate is exact.
        if (beta <= eps * beta1) {
            out.converged = true;
            break;
        }
    }
    if (!out.x.allFinite()) throw NumericalBreakdown("MINRES iterate is not finite");
    return out;
}

CorrectionSolution minres_solve(const CorrectionContext& ctx, const MatrixPair& pair,
                                const SolverOptions& opts, const IterateObserver& observer) {
    const Index max_iter = opts.max_inner > 0 ? opts.max_inner : 2 * pair.n();
    const MinresResult m = minres([&](const Vector& t) { return apply_operator(ctx, pair, t); },
                                  ctx.rhs, opts.inner_tolerance(), max_iter, observer);
    CorrectionSolution out;
    // The iterates live in the orthogonal complement of X_p; the oblique
    // projector moves the answer into the complement of Y_p without changing
    // its image under the operator.
    out.t = m.x - ctx.x_p * (ctx.y_p.transpose() * m.x);
    out.iterations = m.iterations;
    out.relative_residual = m.relative_residual;
    out.converged = m.converged;
    return out;
}

CorrectionSolution exact_solve(const CorrectionContext& ctx, const MatrixPair& pair) {
    const Index n = pair.n();
    const Index j = ctx.y_p.cols();
    const Matrix a = pair.a.to_dense();
    const Matrix b = pair.b.to_dense();
    Matrix k = Matrix::Zero(n + j, n + j);
    k.topLeftCorner(n, n) = a.transpose() * a - (ctx.rho * ctx.rho) * (b.transpose() * b);
    k.topRightCorner(n, j) = ctx.y_p;
    k.bottomLeftCorner(j, n) = ctx.y_p.transpose();
    Vector rhs = Vector::Zero(n + j);
    rhs.head(n) = ctx.rhs;
    const Vector sol = Eigen::FullPivLU<Matrix>(k).solve(rhs);
    if (!sol.allFinite()) throw NumericalBreakdown("bordered correction system is singular");
    CorrectionSolution out;
    out.t = sol.head(n);
    const double rn = ctx.rhs.norm();
    out.relative_residual = rn > 0.0 ? (apply_operator(ctx, pair, out.t) - ctx.rhs).norm() / rn : 0.0;
    out.converged = true;
    return out;
}

}  // namespace jdgsvd
