#include "jdgsvd/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include <Eigen/QR>

#include "jdgsvd/errors.hpp"

namespace jdgsvd {

std::optional<BKind> parse_b_kind(std::string_view s) {
    if (s == "T" || s == "t") return BKind::T;
    if (s == "L1" || s == "l1") return BKind::L1;
    if (s == "L2" || s == "l2") return BKind::L2;
    return std::nullopt;
}

std::string_view b_kind_name(BKind k) {
    switch (k) {
        case BKind::T: return "T";
        case BKind::L1: return "L1";
        case BKind::L2: return "L2";
    }
    return "?";
}

SparseMatrix generate_b(BKind kind, Index n) {
    if (n < 3) throw DimensionError("generate_b needs n >= 3");
    std::vector<Triplet> t;
    switch (kind) {
        case BKind::T:
            for (Index i = 0; i < n; ++i) {
                if (i > 0) t.push_back({i, i - 1, 1.0});
                t.push_back({i, i, 3.0});
                if (i + 1 < n) t.push_back({i, i + 1, 1.0});
            }
            return SparseMatrix::from_triplets(n, n, std::move(t));
        case BKind::L1:
            for (Index i = 0; i + 1 < n; ++i) {
                t.push_back({i, i, 1.0});
                t.push_back({i, i + 1, -1.0});
            }
            return SparseMatrix::from_triplets(n - 1, n, std::move(t));
        case BKind::L2:
            for (Index i = 0; i + 2 < n; ++i) {
                t.push_back({i, i, -1.0});
                t.push_back({i, i + 1, 2.0});
                t.push_back({i, i + 2, -1.0});
            }
            return SparseMatrix::from_triplets(n - 2, n, std::move(t));
    }
    throw Error("unknown B kind");
}

SparseMatrix random_sparse(Index m, Index n, double density, std::uint64_t seed) {
    if (m < 1 || n < 1) throw DimensionError("random_sparse needs positive dimensions");
    if (!(density > 0.0 && density <= 1.0)) throw Error("density must lie in (0, 1]");
    Rng rng(seed);
    const auto total = static_cast<double>(m) * static_cast<double>(n);
    const auto target = static_cast<std::uint64_t>(std::llround(density * total));
    std::set<std::pair<Index, Index>> taken;
    std::vector<Triplet> t;
    auto put = [&](Index i, Index j) {
        if (taken.insert({i, j}).second) t.push_back({i, j, rng.normal()});
    };
    for (Index j = 0; j < n; ++j) put(static_cast<Index>(rng.below(static_cast<std::uint64_t>(m))), j);
    while (taken.size() < target) {
        put(static_cast<Index>(rng.below(static_cast<std::uint64_t>(m))),
            static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
    }
    return SparseMatrix::from_triplets(m, n, std::move(t));
}

Matrix random_orthogonal(Index n, Rng& rng) {
    const Matrix g = rng.normal_matrix(n, n);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    // Fix column signs so the factor is unique given g.
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    return q;
}

PlantedPair generate_planted_pair(Index m, Index p, Index n, const std::vector<double>& spectrum,
                                  double cond_x, std::uint64_t seed) {
    if (n < 1 || m < n || p < n) throw DimensionError("planted pair needs m >= n and p >= n");
    if (static_cast<Index>(spectrum.size()) != n) throw DimensionError("spectrum must have n entries");
    if (!(cond_x >= 1.0)) throw Error("cond_x must be at least 1");
    for (double s : spectrum) {
        if (!(s > 0.0) || !std::isfinite(s)) throw Error("spectrum entries must be positive");
    }
    Rng rng(seed);
    const Matrix u = random_orthogonal(m, rng).leftCols(n);
    const Matrix v = random_orthogonal(p, rng).leftCols(n);
    const Matrix q1 = random_orthogonal(n, rng);
    const Matrix q2 = random_orthogonal(n, rng);

    Vector sx(n);
    const double top = std::log10(cond_x);
    for (Index i = 0; i < n; ++i) {
        sx[i] = n == 1 ? 1.0 : std::pow(10.0, top * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    const Matrix x = q1 * sx.asDiagonal() * q2.transpose();
    const Matrix x_inv = q2 * sx.cwiseInverse().asDiagonal() * q1.transpose();

    Vector c(n), s(n);
    for (Index i = 0; i < n; ++i) {
        const double h = std::hypot(1.0, spectrum[i]);
        c[i] = spectrum[i] / h;
        s[i] = 1.0 / h;
    }
    const Matrix a = u * c.asDiagonal() * x_inv;
    const Matrix b = v * s.asDiagonal() * x_inv;

    PlantedPair out{MatrixPair(SparseMatrix::from_dense(a), SparseMatrix::from_dense(b)), {}, x};
    for (Index i = 0; i < n; ++i) {
        GsvdComponent g;
        g.alpha = c[i];
        g.beta = s[i];
        g.u = u.col(i);
        g.v = v.col(i);
        g.x = x.col(i);
        out.components.push_back(std::move(g));
    }
    return out;
}

}  // namespace jdgsvd
