#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "jdgsvd/generators.hpp"
#include "jdgsvd/rng.hpp"
#include "jdgsvd/sparse_matrix.hpp"

namespace testutil {

using jdgsvd::Index;
using jdgsvd::Matrix;
using jdgsvd::Vector;

inline Matrix random_matrix(Index r, Index c, std::uint64_t seed) {
    jdgsvd::Rng rng(seed);
    return rng.normal_matrix(r, c);
}

inline Matrix random_upper(Index k, std::uint64_t seed) {
    Matrix r = random_matrix(k, k, seed).triangularView<Eigen::Upper>();
    for (Index i = 0; i < k; ++i) r(i, i) = std::abs(r(i, i)) + 0.5;
    return r;
}

inline Matrix random_spd(Index k, std::uint64_t seed) {
    const Matrix g = random_matrix(k, k, seed);
    return g * g.transpose() + static_cast<double>(k) * Matrix::Identity(k, k);
}

inline Matrix orthonormal_columns(Index n, Index k, std::uint64_t seed) {
    return Eigen::HouseholderQR<Matrix>(random_matrix(n, k, seed)).householderQ() * Matrix::Identity(n, k);
}

/// Projector difference between the column spans of two orthonormal bases.
inline double span_distance(const Matrix& q1, const Matrix& q2) {
    return (q1 * q1.transpose() - q2 * q2.transpose()).norm();
}

/// Dense generalized singular values of (A, B) via the pencil (A^T A, A^T A + B^T B);
/// ascending, assumes a regular pair with no infinite values.
inline std::vector<double> dense_gsv(const Matrix& a, const Matrix& b) {
    const Matrix ata = a.transpose() * a;
    const Matrix m = ata + b.transpose() * b;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(ata, m);
    std::vector<double> out;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = std::clamp(es.eigenvalues()[i], 0.0, 1.0);
        out.push_back(std::sqrt(l / (1.0 - l)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// A random regular sparse pair with square, well conditioned B.
inline jdgsvd::MatrixPair random_pair(Index m, Index p, Index n, std::uint64_t seed) {
    Matrix a = random_matrix(m, n, seed);
    Matrix b = random_matrix(p, n, seed + 1000);
    if (p >= n) b.topRows(n) += 3.0 * Matrix::Identity(n, n);
    return jdgsvd::MatrixPair(jdgsvd::SparseMatrix::from_dense(a), jdgsvd::SparseMatrix::from_dense(b));
}

}  // namespace testutil
