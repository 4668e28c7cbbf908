#include <doctest.h>

#include <cmath>

#include "jdgsvd/core.hpp"
#include "jdgsvd/errors.hpp"
#include "helpers.hpp"

using namespace jdgsvd;

TEST_CASE("order_by_target breaks equal distances toward the smaller value") {
    const auto p = order_by_target({1, 2, 3}, 2.0);
    CHECK(p == std::vector<Index>{1, 0, 2});
}

TEST_CASE("order_by_target sorts by distance") {
    const std::vector<double> s{5, 6, 4};
    const auto p = order_by_target(s, 5.2);
    REQUIRE(p.size() == 3);
    CHECK(s[p[0]] == 5);
    CHECK(s[p[1]] == 6);
    CHECK(s[p[2]] == 4);
}

TEST_CASE("order_by_target singleton and empty") {
    CHECK(order_by_target({7}, 1.0) == std::vector<Index>{0});
    CHECK(order_by_target({}, 1.0).empty());
}

TEST_CASE("order_by_target is deterministic and idempotent") {
    jdgsvd::Rng rng(11);
    std::vector<double> s;
    for (int i = 0; i < 200; ++i) s.push_back(std::floor(rng.uniform(0, 20)));
    const auto p1 = order_by_target(s, 9.5);
    const auto p2 = order_by_target(s, 9.5);
    CHECK(p1 == p2);
    std::vector<double> sorted;
    for (Index i : p1) sorted.push_back(s[i]);
    CHECK(order_by_target(sorted, 9.5) == [&] {
        std::vector<Index> id(sorted.size());
        for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<Index>(i);
        return id;
    }());
    // Equal values keep their input order.
    for (std::size_t i = 1; i < p1.size(); ++i) {
        if (s[p1[i]] == s[p1[i - 1]]) CHECK(p1[i] > p1[i - 1]);
    }
}

TEST_CASE("options defaults and inner tolerance") {
    SolverOptions o;
    CHECK(o.k_max == 30);
    CHECK(o.k_min == 3);
    CHECK(o.tol == 1e-8);
    CHECK(o.fixtol == 1e-4);
    CHECK(o.inner_eps == 1e-4);
    CHECK(o.inner_tolerance() == doctest::Approx(2e-4));
    o.inner_eps = 0.1;
    CHECK(o.inner_tolerance() == 0.01);
}

TEST_CASE("options resolve size-dependent defaults") {
    SolverOptions o;
    const SolverOptions r = o.resolved(100);
    CHECK(r.max_outer == 100);
    CHECK(r.max_inner == 200);
    CHECK(r.cg_max_iter == 200);
    const SolverOptions small = o.resolved(3);
    CHECK(small.k_max == 3);
    CHECK(small.k_min == 2);
    CHECK(small.k_min < small.k_max);
}

TEST_CASE("options reject invalid settings") {
    SolverOptions o;
    o.target = 0.0;
    CHECK_THROWS_AS((void)o.resolved(10), Error);
    o = SolverOptions{};
    o.tol = 1.0;
    CHECK_THROWS_AS((void)o.resolved(10), Error);
    o = SolverOptions{};
    o.k_min = 5;
    o.k_max = 5;
    CHECK_THROWS_AS((void)o.resolved(10), Error);
    o = SolverOptions{};
    o.initial_vector = Vector::Ones(4);
    CHECK_THROWS_AS((void)o.resolved(10), DimensionError);
}

TEST_CASE("method labels round-trip") {
    for (Method m : {Method::standard, Method::cpf_harmonic, Method::if_harmonic}) {
        CHECK(parse_method(method_label(m)) == m);
    }
    CHECK_FALSE(parse_method("xyz").has_value());
    CHECK(method_table_name(Method::if_harmonic) == "IFH");
}

TEST_CASE("check_component accepts an exact component of the identity pair") {
    const MatrixPair pair(SparseMatrix::identity(4), SparseMatrix::identity(4));
    GsvdComponent c;
    const double h = 1.0 / std::sqrt(2.0);
    c.alpha = h;
    c.beta = h;
    c.u = Vector::Unit(4, 1);
    c.v = Vector::Unit(4, 1);
    c.x = h * Vector::Unit(4, 1);
    const ComponentCheck k = check_component(pair, c);
    CHECK(k.passes_invariants());
    CHECK(k.converged(1e-12));
    CHECK(c.sigma() == doctest::Approx(1.0));
}

TEST_CASE("check_component flags a wrong component") {
    const MatrixPair pair(SparseMatrix::from_dense(Vector::LinSpaced(3, 1, 3).asDiagonal().toDenseMatrix()),
                          SparseMatrix::identity(3));
    GsvdComponent c;
    c.alpha = 0.6;
    c.beta = 0.8;
    c.u = Vector::Unit(3, 0);
    c.v = Vector::Unit(3, 1);
    c.x = Vector::Unit(3, 0);
    const ComponentCheck k = check_component(pair, c);
    CHECK_FALSE(k.passes_invariants());
    CHECK_FALSE(k.converged(1e-8));
}
