#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "jdgsvd/core.hpp"
#include "jdgsvd/rng.hpp"
#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

/// The regularization matrices of the test problems: T is tridiagonal
/// Toeplitz with 3 on the diagonal and 1 off it (p = n); L1 and L2 are the
/// first and second difference operators (p = n - 1 and n - 2).
enum class BKind { T, L1, L2 };

std::optional<BKind> parse_b_kind(std::string_view s);
std::string_view b_kind_name(BKind k);

/// Throws DimensionError for n < 3.
SparseMatrix generate_b(BKind kind, Index n);

/// m x n with about density * m * n normally distributed entries at uniform
/// random positions, and at least one entry in every column.
SparseMatrix random_sparse(Index m, Index n, double density, std::uint64_t seed);

/// n x n orthogonal matrix from the QR factor of a Gaussian matrix.
Matrix random_orthogonal(Index n, Rng& rng);

struct PlantedPair {
    MatrixPair pair;
    /// Exact components, one per spectrum entry, in input order.
    std::vector<GsvdComponent> components;
    Matrix x;
};

/// A = U C X^{-1}, B = V S X^{-1} with orthonormal U (m x n), V (p x n),
/// C = diag(sigma / sqrt(1 + sigma^2)), S = diag(1 / sqrt(1 + sigma^2)) and
/// X = Q1 diag(logspace(0, log10 cond_x)) Q2^T. Stored densely.
PlantedPair generate_planted_pair(Index m, Index p, Index n, const std::vector<double>& spectrum,
                                  double cond_x, std::uint64_t seed);

}  // namespace jdgsvd
