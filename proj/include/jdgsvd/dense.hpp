#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

using ComplexVector = Eigen::VectorXcd;

/// Thin QR factor X = Q R with Q column-orthonormal and R upper triangular
/// with a nonnegative diagonal.
struct ThinQr {
    Matrix q;
    Matrix r;
};

/// What thin_qr does with a column that is numerically in the span of the
/// previous ones.
enum class RankPolicy {
    raise,     ///< throw RankDeficiencyError
    complete,  ///< put a fresh orthonormal direction in Q and 0 on R's diagonal
};

/// Two-pass classical Gram-Schmidt ("twice is enough").
ThinQr thin_qr(const Matrix& x, RankPolicy policy = RankPolicy::raise);

/// Result of orthogonalizing one vector against an orthonormal basis.
struct OrthoStep {
    Vector coeffs;   ///< Q^T v accumulated over both passes
    double gamma;    ///< norm of what is left
    Vector q;        ///< normalized remainder (undefined when in_span)
    bool in_span;    ///< gamma < rel_tol * ‖v‖
};

/// Two-pass projection of v against the columns of q (which may be empty).
OrthoStep orthogonalize(const Matrix& q, const Vector& v, double rel_tol = 1e-14);

/// A unit vector orthogonal to the columns of q, built from coordinate
/// vectors. Throws RankDeficiencyError when q already spans the space.
Vector complement_vector(const Matrix& q);

struct QrAppend {
    ThinQr factor;
    double gamma = 0.0;
    Vector r_new;
    Vector q_new;
};

/// Factor of [X, new_col] from the factor of X. Throws InSpanError when
/// gamma < 1e-14 * ‖new_col‖.
QrAppend qr_append(const ThinQr& f, const Vector& new_col);

/// Lower Cholesky factor of a symmetric positive definite matrix.
Matrix cholesky_lower(const Matrix& h);

struct SymmetricEigen {
    Vector values;   ///< ascending
    Matrix vectors;  ///< columns are eigenvectors
};

/// Cyclic Jacobi eigensolver for a small symmetric matrix.
SymmetricEigen sym_eig(const Matrix& s);

/// G w = lambda H w with H symmetric positive definite, through H = L L^T and
/// the symmetric matrix L^{-1} G L^{-T}. Eigenvectors are H-orthonormal.
SymmetricEigen sym_definite_geig(const Matrix& g, const Matrix& h);

struct ComplexEigenpair {
    std::complex<double> value;
    ComplexVector vector;  ///< unit 2-norm
};

/// All eigenpairs of G w = nu H w for nonsymmetric G and SPD H.
std::vector<ComplexEigenpair> real_geig(const Matrix& g, const Matrix& h);

struct SmallSvd {
    Vector values;  ///< descending
    Matrix u;       ///< j x k, orthonormal columns
    Matrix v;       ///< k x k, orthogonal
};

/// One-sided (Hestenes) Jacobi SVD of a j x k matrix with j >= k.
SmallSvd small_svd(const Matrix& m);

/// GSVD of a small pair of k x k upper triangular matrices:
/// R_A d_i = alpha_i e_i, R_B d_i = beta_i f_i, beta_i R_A^T e_i = alpha_i R_B^T f_i,
/// sorted by alpha_i / beta_i ascending.
struct SmallGsvd {
    Vector alphas;
    Vector betas;
    Matrix e_vectors;
    Matrix f_vectors;
    Matrix d_vectors;
};

SmallGsvd small_gsvd(const Matrix& r_a, const Matrix& r_b);

/// Columns 2..k of the Q factor of a full QR of the k x 1 matrix d: an
/// orthonormal basis of the orthogonal complement of span{d}.
Matrix orthogonal_complement(const Vector& d);

}  // namespace jdgsvd
