#include "jdgsvd/subspace.hpp"

#include <cmath>

#include "jdgsvd/errors.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace jdgsvd {
namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// Appends w to the factor (q, r) of the columns seen so far. When w already
/// lies in span(q), e.g. for x in the null space of A, a fresh orthonormal
/// direction goes into q and the new diagonal entry of r is zero.
void append_column(Matrix& q, Matrix& r, const Vector& w) {
    const Index k = q.cols();
    Vector coeffs;
    Vector q_new;
    double gamma = 0.0;
    try {
        const QrAppend up = qr_append(ThinQr{q, r}, w);
        coeffs = up.r_new;
        q_new = up.q_new;
        gamma = up.gamma;
    } catch (const InSpanError&) {
        coeffs = orthogonalize(q, w).coeffs;
        q_new = complement_vector(q);
    }
    q.conservativeResize(Eigen::NoChange, k + 1);
    q.col(k) = q_new;
    Matrix grown = Matrix::Zero(k + 1, k + 1);
    grown.topLeftCorner(k, k) = r;
    grown.col(k).head(k) = coeffs;
    grown(k, k) = gamma;
    r = std::move(grown);
}

Vector solve_btb(const SubspaceContext& ctx, const Vector& rhs) {
    if (!ctx.btb) throw PreconditionError("CPF caches need a (B^T B)^{-1} solver");
    return ctx.btb->solve(rhs);
}

}  // namespace

CacheKind cache_kind_for(Method m) {
    switch (m) {
        case Method::standard: return CacheKind::none;
        case Method::cpf_harmonic: return CacheKind::cpf;
        case Method::if_harmonic: return CacheKind::inverse_free;
    }
    return CacheKind::none;
}

SubspaceState build_subspace(const SubspaceContext& ctx, const Matrix& x) {
    const MatrixPair& pair = *ctx.pair;
    if (x.rows() != pair.n()) throw DimensionError("subspace basis has the wrong number of rows");
    SubspaceState s;
    s.x = x;
    const Matrix ax = spmm(pair.a, x);
    const Matrix bx = spmm(pair.b, x);
    ThinQr fa = thin_qr(ax, RankPolicy::complete);
    ThinQr fb = thin_qr(bx, RankPolicy::complete);
    s.u = std::move(fa.q);
    s.r_a = std::move(fa.r);
    s.v = std::move(fb.q);
    s.r_b = std::move(fb.r);

    if (ctx.caches == CacheKind::cpf) {
        if (!ctx.btb) throw PreconditionError("CPF caches need a (B^T B)^{-1} solver");
        const Matrix sol = ctx.btb->solve_columns(spmm_transpose(pair.a, s.u));
        s.h_ab_dag = symmetrized(s.u.transpose() * spmm(pair.a, sol));
    } else if (ctx.caches == CacheKind::inverse_free) {
        s.p = spmm_transpose(pair.a, ax);
        s.q = spmm_transpose(pair.b, bx);
        s.h_a = symmetrized(s.p->transpose() * *s.p);
        s.h_b = symmetrized(s.q->transpose() * *s.q);
        s.h_ab = s.p->transpose() * *s.q;
    }
    return s;
}

SubspaceState init_subspace(const SubspaceContext& ctx, const Vector& v0, const Matrix& y_basis) {
    if (v0.size() != ctx.pair->n()) throw DimensionError("initial vector length does not match n");
    if (!(v0.norm() > 0.0)) throw Error("initial vector is zero");
    Vector x = v0;
    if (y_basis.cols() > 0) {
        const OrthoStep st = orthogonalize(y_basis, v0);
        if (st.in_span) throw StagnationError("initial vector lies in the deflated directions");
        x = st.q;
    } else {
        x /= x.norm();
    }
    return build_subspace(ctx, Matrix(x));
}

void expand(const SubspaceContext& ctx, SubspaceState& s, const Vector& t, const Matrix& y_basis) {
    const MatrixPair& pair = *ctx.pair;
    const Index n = pair.n();
    if (t.size() != n) throw DimensionError("expansion vector length does not match n");
    const Index k = s.k();

    Matrix against(n, k + y_basis.cols());
    against.leftCols(k) = s.x;
    if (y_basis.cols() > 0) against.rightCols(y_basis.cols()) = y_basis;
    const OrthoStep st = orthogonalize(against, t, 1e-13);
    if (st.in_span) throw StagnationError("stagnated expansion: correction lies in the current subspace");
    const Vector& x_plus = st.q;

    const Vector ax = spmv(pair.a, x_plus);
    const Vector bx = spmv(pair.b, x_plus);
    s.x.conservativeResize(Eigen::NoChange, k + 1);
    s.x.col(k) = x_plus;
    append_column(s.u, s.r_a, ax);
    append_column(s.v, s.r_b, bx);

    if (ctx.caches == CacheKind::cpf) {
        const Vector sol = solve_btb(ctx, spmv_transpose(pair.a, s.u.col(k)));
        const Vector col = s.u.transpose() * spmv(pair.a, sol);
        Matrix& h = *s.h_ab_dag;
        h.conservativeResize(k + 1, k + 1);
        h.col(k) = col;
        h.row(k) = col.transpose();
    } else if (ctx.caches == CacheKind::inverse_free) {
        const Vector p_new = spmv_transpose(pair.a, ax);
        const Vector q_new = spmv_transpose(pair.b, bx);
        s.p->conservativeResize(Eigen::NoChange, k + 1);
        s.p->col(k) = p_new;
        s.q->conservativeResize(Eigen::NoChange, k + 1);
        s.q->col(k) = q_new;
        const Matrix& p = *s.p;
        const Matrix& q = *s.q;

        const Vector ha_col = p.transpose() * p_new;
        s.h_a->conservativeResize(k + 1, k + 1);
        s.h_a->col(k) = ha_col;
        s.h_a->row(k) = ha_col.transpose();

        const Vector hb_col = q.transpose() * q_new;
        s.h_b->conservativeResize(k + 1, k + 1);
        s.h_b->col(k) = hb_col;
        s.h_b->row(k) = hb_col.transpose();

        s.h_ab->conservativeResize(k + 1, k + 1);
        s.h_ab->col(k) = p.transpose() * q_new;
        s.h_ab->row(k) = (q.transpose() * p_new).transpose();
    }
    ++s.updates;
}

void change_basis(SubspaceState& s, const Matrix& q) {
    if (q.rows() != s.k()) throw DimensionError("basis change has the wrong number of rows");
    s.x = s.x * q;
    const ThinQr fe = thin_qr(s.r_a * q, RankPolicy::complete);
    const ThinQr ff = thin_qr(s.r_b * q, RankPolicy::complete);
    s.u = s.u * fe.q;
    s.r_a = fe.r;
    s.v = s.v * ff.q;
    s.r_b = ff.r;
    if (s.h_ab_dag) s.h_ab_dag = symmetrized(fe.q.transpose() * *s.h_ab_dag * fe.q);
    if (s.p) {
        s.p = Matrix(*s.p * q);
        s.q = Matrix(*s.q * q);
        s.h_a = symmetrized(q.transpose() * *s.h_a * q);
        s.h_b = symmetrized(q.transpose() * *s.h_b * q);
        s.h_ab = Matrix(q.transpose() * *s.h_ab * q);
    }
    ++s.updates;
}

void thick_restart(SubspaceState& s, const Matrix& d1) {
    if (d1.rows() != s.k()) throw DimensionError("restart coefficients have the wrong number of rows");
    if (d1.cols() < 1 || d1.cols() > s.k()) throw DimensionError("restart keeps between 1 and k vectors");
    change_basis(s, thin_qr(d1, RankPolicy::raise).q);
}

void purge(SubspaceState& s, const Vector& d) {
    if (s.k() < 2) throw DimensionError("purge needs k >= 2; reinitialize instead");
    if (d.size() != s.k()) throw DimensionError("purge coefficient vector has the wrong length");
    const Vector dp = s.r_a.transpose() * (s.r_a * d) + s.r_b.transpose() * (s.r_b * d);
    change_basis(s, orthogonal_complement(dp));
}

SubspaceDefects subspace_defects(const MatrixPair& pair, const SubspaceState& s) {
    SubspaceDefects out;
    const Index k = s.k();
    const Matrix eye = Matrix::Identity(k, k);
    out.x_orthonormality = (s.x.transpose() * s.x - eye).norm();
    out.u_orthonormality = (s.u.transpose() * s.u - eye).norm();
    out.v_orthonormality = (s.v.transpose() * s.v - eye).norm();
    const double scale = std::max(pair.a.one_norm() + pair.b.one_norm(), 1e-300);
    out.a_factorization = (spmm(pair.a, s.x) - s.u * s.r_a).norm() / scale;
    out.b_factorization = (spmm(pair.b, s.x) - s.v * s.r_b).norm() / scale;
    return out;
}

}  // namespace jdgsvd
