#include <doctest.h>

#include <cmath>

#include "jdgsvd/btb.hpp"
#include "jdgsvd/errors.hpp"
#include "jdgsvd/subspace.hpp"
#include "helpers.hpp"

using namespace jdgsvd;

namespace {

struct Dense {
    Matrix a, b, ata, btb;
    explicit Dense(const MatrixPair& pair)
        : a(pair.a.to_dense()), b(pair.b.to_dense()),
          ata(a.transpose() * a), btb(b.transpose() * b) {}
};

double scale_of(const MatrixPair& pair) { return pair.a.one_norm() + pair.b.one_norm(); }

void check_invariants(const MatrixPair& pair, const SubspaceState& s, double tol = 1e-10) {
    const SubspaceDefects d = subspace_defects(pair, s);
    CHECK(d.x_orthonormality <= tol);
    CHECK(d.u_orthonormality <= tol);
    CHECK(d.v_orthonormality <= tol);
    CHECK(d.a_factorization <= tol);
    CHECK(d.b_factorization <= tol);
}

// Every cache recomputed densely from its definition.
void check_caches(const MatrixPair& pair, const SubspaceState& s, double tol = 1e-8) {
    const Dense m(pair);
    const Matrix& x = s.x;
    const double sc = scale_of(pair);
    CHECK((s.u.transpose() * m.a * x - s.r_a).norm() <= tol * sc);
    CHECK((s.v.transpose() * m.b * x - s.r_b).norm() <= tol * sc);
    CHECK(s.r_a.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() <= tol * sc);
    CHECK(s.r_b.triangularView<Eigen::StrictlyLower>().toDenseMatrix().norm() <= tol * sc);
    if (s.h_ab_dag) {
        const Matrix ref = s.u.transpose() * m.a * m.btb.ldlt().solve(m.a.transpose() * s.u);
        CHECK((*s.h_ab_dag - ref).norm() <= tol * (1.0 + ref.norm()));
        CHECK((*s.h_ab_dag - s.h_ab_dag->transpose()).norm() <= 1e-8 * (1.0 + ref.norm()));
    }
    if (s.h_a) {
        const Matrix p = m.ata * x;
        const Matrix q = m.btb * x;
        const Matrix ha = p.transpose() * p;
        const Matrix hb = q.transpose() * q;
        const Matrix hab = p.transpose() * q;
        CHECK((*s.p - p).norm() <= tol * (1.0 + p.norm()));
        CHECK((*s.q - q).norm() <= tol * (1.0 + q.norm()));
        CHECK((*s.h_a - ha).norm() <= tol * (1.0 + ha.norm()));
        CHECK((*s.h_b - hb).norm() <= tol * (1.0 + hb.norm()));
        CHECK((*s.h_ab - hab).norm() <= tol * (1.0 + hab.norm()));
        CHECK((*s.h_a - s.h_a->transpose()).norm() <= 1e-10 * (1.0 + ha.norm()));
        CHECK((*s.h_b - s.h_b->transpose()).norm() <= 1e-10 * (1.0 + hb.norm()));
    }
}

struct Fixture {
    MatrixPair pair;
    SolverOptions opts;
    BtbSolver btb;
    explicit Fixture(std::uint64_t seed)
        : pair(testutil::random_pair(40, 30, 25, seed)), btb(pair.b, opts) {}
    SubspaceContext ctx(CacheKind k) const { return {&pair, k, &btb}; }
};

SubspaceState grown(const SubspaceContext& ctx, Index k, std::uint64_t seed) {
    Rng rng(seed);
    SubspaceState s = init_subspace(ctx, rng.normal_vector(ctx.pair->n()));
    while (s.k() < k) expand(ctx, s, rng.normal_vector(ctx.pair->n()));
    return s;
}

}  // namespace

TEST_CASE("init_subspace of the identity pair") {
    const MatrixPair pair(SparseMatrix::identity(3), SparseMatrix::identity(3));
    const SubspaceContext ctx{&pair, CacheKind::none, nullptr};
    const SubspaceState s = init_subspace(ctx, Vector::Unit(3, 0));
    CHECK(s.k() == 1);
    CHECK((s.x - Vector::Unit(3, 0)).norm() <= 1e-15);
    CHECK((s.u - Vector::Unit(3, 0)).norm() <= 1e-15);
    CHECK((s.v - Vector::Unit(3, 0)).norm() <= 1e-15);
    CHECK(s.r_a(0, 0) == doctest::Approx(1.0));
    CHECK(s.r_b(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("init_subspace with A = diag(1..4) and v0 = ones") {
    const MatrixPair pair(SparseMatrix::from_dense(Vector(Eigen::Vector4d(1, 2, 3, 4)).asDiagonal()),
                          SparseMatrix::identity(4));
    const SubspaceContext ctx{&pair, CacheKind::none, nullptr};
    const SubspaceState s = init_subspace(ctx, Vector::Ones(4));
    CHECK(s.r_a(0, 0) == doctest::Approx(std::sqrt(30.0) / 2.0));
    check_invariants(pair, s, 1e-12);
}

TEST_CASE("init_subspace rejects a zero vector") {
    const MatrixPair pair(SparseMatrix::identity(3), SparseMatrix::identity(3));
    const SubspaceContext ctx{&pair, CacheKind::none, nullptr};
    CHECK_THROWS_AS((void)init_subspace(ctx, Vector::Zero(3)), Error);
}

TEST_CASE("init_subspace with A v0 = 0 is allowed") {
    Matrix a = Matrix::Identity(3, 3);
    a(0, 0) = 0.0;
    const MatrixPair pair(SparseMatrix::from_dense(a), SparseMatrix::identity(3));
    SolverOptions opts;
    const BtbSolver btb(pair.b, opts);
    const SubspaceContext ctx{&pair, CacheKind::cpf, &btb};
    const SubspaceState s = init_subspace(ctx, Vector::Unit(3, 0));
    CHECK(s.r_a(0, 0) == 0.0);
    CHECK(std::abs(s.u.col(0).norm() - 1.0) <= 1e-14);
}

TEST_CASE("expand with an orthogonal direction") {
    const MatrixPair pair(SparseMatrix::identity(4), SparseMatrix::identity(4));
    const SubspaceContext ctx{&pair, CacheKind::none, nullptr};
    SubspaceState s = init_subspace(ctx, Vector::Unit(4, 0));
    expand(ctx, s, Vector::Unit(4, 2));
    CHECK((s.x.transpose() * s.x - Matrix::Identity(2, 2)).norm() <= 1e-13);
}

TEST_CASE("expand with a vector in the span stagnates") {
    Fixture f(1);
    const SubspaceContext ctx = f.ctx(CacheKind::none);
    SubspaceState s = grown(ctx, 3, 7);
    CHECK_THROWS_AS(expand(ctx, s, s.x.col(1)), StagnationError);
    CHECK_THROWS_AS(expand(ctx, s, s.x * Vector::Ones(3)), StagnationError);
    CHECK(s.k() == 3);
}

TEST_CASE("incremental caches agree with from-scratch definitions") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        Fixture f(seed);
        for (CacheKind kind : {CacheKind::none, CacheKind::cpf, CacheKind::inverse_free}) {
            const SubspaceContext ctx = f.ctx(kind);
            const SubspaceState s = grown(ctx, 12, seed + 10);
            check_invariants(f.pair, s);
            check_caches(f.pair, s);
            CHECK(s.updates >= 11);
        }
    }
}

TEST_CASE("expand against a deflation basis keeps X orthogonal to it") {
    Fixture f(5);
    const SubspaceContext ctx = f.ctx(CacheKind::inverse_free);
    const Matrix y = testutil::orthonormal_columns(25, 2, 3);
    Rng rng(4);
    SubspaceState s = init_subspace(ctx, rng.normal_vector(25), y);
    for (int i = 0; i < 6; ++i) expand(ctx, s, rng.normal_vector(25), y);
    CHECK((s.x.transpose() * y).cwiseAbs().maxCoeff() <= 1e-10);
    check_caches(f.pair, s);
}

TEST_CASE("identity restart leaves the subspace unchanged") {
    Fixture f(6);
    const SubspaceContext ctx = f.ctx(CacheKind::cpf);
    SubspaceState s = grown(ctx, 5, 1);
    const SubspaceState before = s;
    thick_restart(s, Matrix::Identity(5, 5));
    CHECK(testutil::span_distance(s.x, before.x) <= 1e-12);
    // Same bases up to column signs.
    for (Index j = 0; j < 5; ++j) {
        CHECK(std::abs(std::abs(s.x.col(j).dot(before.x.col(j))) - 1.0) <= 1e-12);
        CHECK(std::abs(std::abs(s.r_a(j, j)) - std::abs(before.r_a(j, j))) <= 1e-12 * before.r_a.norm());
    }
    check_caches(f.pair, s);
}

TEST_CASE("restart keeping one vector spans that vector") {
    Fixture f(7);
    const SubspaceContext ctx = f.ctx(CacheKind::inverse_free);
    SubspaceState s = grown(ctx, 6, 2);
    Rng rng(9);
    const Vector d1 = rng.normal_vector(6);
    const Vector target = s.x * d1;
    thick_restart(s, d1);
    CHECK(s.k() == 1);
    Matrix t = target.normalized();
    CHECK(testutil::span_distance(s.x, t) <= 1e-12);
    check_invariants(f.pair, s, 1e-9);
    check_caches(f.pair, s);
}

TEST_CASE("thick restart keeps the chosen approximations and the invariants") {
    for (CacheKind kind : {CacheKind::cpf, CacheKind::inverse_free}) {
        Fixture f(8);
        const SubspaceContext ctx = f.ctx(kind);
        SubspaceState s = grown(ctx, 10, 3);
        const Matrix d1 = testutil::random_matrix(10, 3, 11);
        const Matrix kept = s.x * d1;
        thick_restart(s, d1);
        CHECK(s.k() == 3);
        for (Index i = 0; i < 3; ++i) {
            const Vector xi = kept.col(i);
            CHECK((s.x * (s.x.transpose() * xi) - xi).norm() <= 1e-12 * xi.norm());
        }
        check_invariants(f.pair, s, 1e-9);
        check_caches(f.pair, s);
        // Growth after a restart still matches the definitions.
        Rng rng(12);
        expand(ctx, s, rng.normal_vector(25));
        expand(ctx, s, rng.normal_vector(25));
        check_invariants(f.pair, s, 1e-9);
        check_caches(f.pair, s);
    }
}

TEST_CASE("thick restart rejects rank deficient coefficients") {
    Fixture f(9);
    const SubspaceContext ctx = f.ctx(CacheKind::none);
    SubspaceState s = grown(ctx, 4, 1);
    Matrix d1 = testutil::random_matrix(4, 2, 3);
    d1.col(1) = 2.0 * d1.col(0);
    CHECK_THROWS_AS(thick_restart(s, d1), RankDeficiencyError);
}

TEST_CASE("purge of an axis aligned direction") {
    // A = B = I/sqrt(2) scaled identities on a coordinate subspace.
    const Matrix half = Matrix::Identity(3, 3) / std::sqrt(2.0);
    const MatrixPair pair(SparseMatrix::from_dense(half), SparseMatrix::from_dense(half));
    const SubspaceContext ctx{&pair, CacheKind::none, nullptr};
    SubspaceState s = init_subspace(ctx, Vector::Unit(3, 0));
    expand(ctx, s, Vector::Unit(3, 1));
    purge(s, Vector::Unit(2, 0));
    REQUIRE(s.k() == 1);
    CHECK(std::abs(std::abs(s.x(1, 0)) - 1.0) <= 1e-14);
}

TEST_CASE("purge leaves X orthogonal to (A^T A + B^T B) x") {
    for (CacheKind kind : {CacheKind::none, CacheKind::cpf, CacheKind::inverse_free}) {
        Fixture f(10);
        const Dense m(f.pair);
        const SubspaceContext ctx = f.ctx(kind);
        SubspaceState s = grown(ctx, 7, 4);
        Rng rng(5);
        const Vector d = rng.normal_vector(7);
        const Vector x = s.x * d;
        const Vector y = (m.ata + m.btb) * x;
        purge(s, d);
        CHECK(s.k() == 6);
        CHECK((s.x.transpose() * y).norm() <= 1e-10 * y.norm());
        check_invariants(f.pair, s, 1e-9);
        check_caches(f.pair, s);

        // Expansion against the deflated direction keeps the orthogonality.
        const Matrix yb = y.normalized();
        for (int i = 0; i < 3; ++i) expand(ctx, s, rng.normal_vector(25), yb);
        CHECK((s.x.transpose() * y).norm() <= 1e-10 * y.norm());
        check_caches(f.pair, s);
    }
}

TEST_CASE("purge needs k >= 2") {
    Fixture f(11);
    const SubspaceContext ctx = f.ctx(CacheKind::none);
    SubspaceState s = grown(ctx, 1, 1);
    CHECK_THROWS_AS(purge(s, Vector::Ones(1)), DimensionError);
}

TEST_CASE("build_subspace matches the incremental state") {
    Fixture f(12);
    const SubspaceContext ctx = f.ctx(CacheKind::inverse_free);
    const SubspaceState inc = grown(ctx, 8, 6);
    const SubspaceState ref = build_subspace(ctx, inc.x);
    CHECK(ref.updates == 0);
    CHECK((ref.r_a.cwiseAbs() - inc.r_a.cwiseAbs()).norm() <= 1e-10 * inc.r_a.norm());
    CHECK((*ref.h_ab - *inc.h_ab).norm() <= 1e-10 * inc.h_ab->norm());
    CHECK(testutil::span_distance(ref.u, inc.u) <= 1e-10);
}
