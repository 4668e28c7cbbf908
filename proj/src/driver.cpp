#include "jdgsvd/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>

#include "jdgsvd/btb.hpp"
#include "jdgsvd/correction.hpp"
#include "jdgsvd/dense.hpp"
#include "jdgsvd/errors.hpp"
#include "jdgsvd/rng.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace jdgsvd {
namespace {

constexpr Index kRefreshAfterUpdates = 200;

template <typename Column>
void append_col(Matrix& m, const Column& c) {
    const Index k = m.cols();
    m.conservativeResize(c.size(), k + 1);
    m.col(k) = c;
}

void append_entry(Vector& v, double value) {
    v.conservativeResize(v.size() + 1);
    v[v.size() - 1] = value;
}

/// A fresh starting direction outside span(Y_c): the configured initial
/// vector if it still has a component there, random otherwise.
Vector fresh_direction(const Vector& v0, const Matrix& y_basis, Rng& rng) {
    if (y_basis.cols() > 0) {
        const OrthoStep st = orthogonalize(y_basis, v0, 1e-8);
        if (!st.in_span) return st.q;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const OrthoStep r = orthogonalize(y_basis, rng.normal_vector(v0.size()), 1e-8);
            if (!r.in_span) return r.q;
        }
        throw StagnationError("no direction left outside the deflated subspace");
    }
    return v0 / v0.norm();
}

std::unique_ptr<BtbSolver> cpf_precondition(const MatrixPair& pair, const SolverOptions& o) {
    const std::string prefix = "CPF-HJDGSVD cannot be applied: ";
    if (pair.p() < pair.n()) {
        throw PreconditionError(prefix + "B is " + std::to_string(pair.p()) + " x " +
                                std::to_string(pair.n()) +
                                " with p < n, so B^T B is singular (use ifh or cpf)");
    }
    std::unique_ptr<BtbSolver> solver;
    try {
        solver = std::make_unique<BtbSolver>(pair.b, o);
    } catch (const NotPositiveDefiniteError& e) {
        throw PreconditionError(prefix + "B does not have full column rank (" + e.what() + ")");
    }
    if (o.btb_solve == BtbSolveKind::cg) {
        // Probe: CG must be able to invert B^T B on a generic right-hand side,
        // which has a component in the null space whenever B is rank deficient.
        Rng probe(o.seed);
        try {
            (void)btb_cg(pair.b, probe.normal_vector(pair.n()), o.cg_tol, o.cg_max_iter);
        } catch (const ConvergenceError& e) {
            throw PreconditionError(prefix + "CG on B^T B failed (" + e.what() + ")");
        }
    }
    return solver;
}

}  // namespace

DeflationSet empty_deflation_set(const MatrixPair& pair) {
    DeflationSet d;
    d.c_c.resize(0);
    d.s_c.resize(0);
    d.u_c.resize(pair.m(), 0);
    d.v_c.resize(pair.p(), 0);
    d.x_c.resize(pair.n(), 0);
    d.y_c.resize(pair.n(), 0);
    d.y_basis.resize(pair.n(), 0);
    return d;
}

GsvdComponent certify(const MatrixPair& pair, const Vector& x_in) {
    GsvdComponent c;
    Vector ax = spmv(pair.a, x_in);
    Vector bx = spmv(pair.b, x_in);
    const double scale = std::hypot(ax.norm(), bx.norm());
    if (!(scale > 0.0)) throw NumericalBreakdown("vector lies in the common null space of A and B");
    c.x = x_in / scale;
    ax /= scale;
    bx /= scale;
    const double na = ax.norm();
    const double nb = bx.norm();
    const double h = std::hypot(na, nb);
    c.alpha = na / h;
    c.beta = nb / h;
    if (na > 0.0) c.u = ax / na;
    else c.u = Vector::Zero(pair.m());
    if (nb > 0.0) c.v = bx / nb;
    else c.v = Vector::Zero(pair.p());
    c.residual_norm =
        (c.beta * spmv_transpose(pair.a, c.u) - c.alpha * spmv_transpose(pair.b, c.v)).norm();
    return c;
}

void deflate_append(DeflationSet& set, const GsvdComponent& c, const MatrixPair& pair) {
    const Vector y = spmv_transpose(pair.a, spmv(pair.a, c.x)) + spmv_transpose(pair.b, spmv(pair.b, c.x));
    if (set.j() > 0) {
        const Vector cross = set.y_c.transpose() * c.x;
        const Vector cross2 = set.x_c.transpose() * y;
        double worst = 0.0;
        for (Index i = 0; i < set.j(); ++i) {
            const double s1 = set.y_c.col(i).norm() * c.x.norm();
            const double s2 = set.x_c.col(i).norm() * y.norm();
            worst = std::max({worst, std::abs(cross[i]) / std::max(s1, 1e-300),
                              std::abs(cross2[i]) / std::max(s2, 1e-300)});
        }
        if (worst > 1e-6) {
            throw NumericalBreakdown("converged vector is not (A^T A + B^T B)-orthogonal to the "
                                     "deflated ones; the subspace is contaminated");
        }
    }
    append_entry(set.c_c, c.alpha);
    append_entry(set.s_c, c.beta);
    append_col(set.u_c, c.u);
    append_col(set.v_c, c.v);
    append_col(set.x_c, c.x);
    append_col(set.y_c, y);
    set.y_basis = thin_qr(set.y_c, RankPolicy::complete).q;
}

Vector initial_vector(const MatrixPair& pair, const SolverOptions& opts) {
    const Index n = pair.n();
    if (opts.initial_vector) {
        if (opts.initial_vector->size() != n) throw DimensionError("initial vector length does not match n");
        const double nv = opts.initial_vector->norm();
        if (!(nv > 0.0) || !std::isfinite(nv)) throw Error("initial vector is zero or not finite");
        return *opts.initial_vector / nv;
    }
    InitialGenerator g = opts.initial_generator;
    if (g == InitialGenerator::automatic) {
        g = pair.p() == n ? InitialGenerator::ones : InitialGenerator::mod4;
    }
    Vector v(n);
    switch (g) {
        case InitialGenerator::ones:
        case InitialGenerator::automatic: v.setOnes(); break;
        case InitialGenerator::mod4:
            for (Index i = 0; i < n; ++i) v[i] = static_cast<double>((i + 1) % 4);
            break;
        case InitialGenerator::random: {
            Rng rng(opts.seed);
            v = rng.normal_vector(n);
            break;
        }
    }
    return v / v.norm();
}

Matrix select_restart_vectors(const Vector& first, const std::vector<Candidate>& candidates,
                              Index count) {
    const Index k = first.size();
    Matrix kept(k, 0);
    Matrix ortho(k, 0);
    auto consider = [&](const Vector& d) {
        if (kept.cols() >= count) return;
        const OrthoStep st = orthogonalize(ortho, d, 1e-8);
        if (st.in_span) return;
        append_col(kept, d);
        append_col(ortho, st.q);
    };
    consider(first);
    for (const Candidate& c : candidates) consider(c.d);
    return kept;
}

PartialGsvdResult solve(const MatrixPair& pair, const SolverOptions& opts, const SolverHooks& hooks) {
    const auto start = std::chrono::steady_clock::now();
    const Index n = pair.n();
    SolverOptions o = opts.resolved(n);
    // The left bases need room for k_max orthonormal columns.
    const Index room = std::min(pair.m(), pair.p());
    if (room < 2) throw DimensionError("A and B need at least two rows each");
    if (o.k_max > room) {
        o.k_max = room;
        o.k_min = std::min(o.k_min, o.k_max - 1);
    }

    std::unique_ptr<BtbSolver> btb;
    if (o.method == Method::cpf_harmonic) btb = cpf_precondition(pair, o);

    SubspaceContext ctx{&pair, cache_kind_for(o.method), btb.get()};
    PartialGsvdResult result;
    result.method = o.method;
    Rng rng(o.seed ^ 0x5eedULL);

    const Vector v0 = initial_vector(pair, o);
    DeflationSet defl = empty_deflation_set(pair);
    SubspaceState state = init_subspace(ctx, v0);

    const auto record = [&](TraceRecord rec) { result.trace.records.push_back(rec); };

    Index outer = 0;
    // Outer iterations spent on a component that passed tol but not yet the
    // tighter level required before deflating it.
    Index polishing = 0;
    while (outer < o.max_outer && static_cast<Index>(result.components.size()) < o.num_components) {
        ++outer;
        if (state.updates > kRefreshAfterUpdates) state = build_subspace(ctx, state.x);

        TraceRecord rec;
        rec.outer_iter = outer;
        rec.component_index = defl.j();

        ExtractionResult res;
        try {
            res = extract(pair, state, o.method, o.target);
        } catch (const NumericalBreakdown&) {
            // Only trivial directions so far (e.g. x in the null space of A).
            rec.theta = std::numeric_limits<double>::quiet_NaN();
            rec.rel_residual = std::numeric_limits<double>::quiet_NaN();
            rec.event = TraceEvent::expand;
            if (state.k() >= o.k_max) {
                state = init_subspace(ctx, fresh_direction(rng.normal_vector(n), defl.y_basis, rng),
                                      defl.y_basis);
                rec.event = TraceEvent::restart;
            }
            expand(ctx, state, rng.normal_vector(n), defl.y_basis);
            record(rec);
            continue;
        }
        if (res.fallback) ++result.fallback_extractions;
        if (hooks.on_extraction) hooks.on_extraction(state, res);

        ResidualTest test = residual_and_test(res, pair, o.tol);
        rec.theta = res.theta;
        rec.alpha = res.alpha;
        rec.beta = res.beta;
        rec.rel_residual = test.relative();
        rec.rho_mode = res.residual_norm > test.scale * o.fixtol ? RhoMode::fixed_tau : RhoMode::dynamic;

        if (test.converged) {
            const GsvdComponent comp = certify(pair, res.x);
            const ComponentCheck check = check_component(pair, comp);
            const bool last = static_cast<Index>(result.components.size()) + 1 >= o.num_components;
            const bool accurate = last || check.converged(o.tol * o.deflation_tol_factor) ||
                                  polishing >= o.deflation_patience;
            if (check.converged(o.tol) && check.in_open_interval && !accurate) {
                ++polishing;
            } else if (check.converged(o.tol) && check.in_open_interval) {
                polishing = 0;
                deflate_append(defl, comp, pair);
                result.components.push_back(comp);
                const bool done = static_cast<Index>(result.components.size()) >= o.num_components;
                if (done) {
                    rec.event = TraceEvent::converge;
                } else if (state.k() >= 2) {
                    purge(state, res.d);
                    rec.event = TraceEvent::purge;
                } else {
                    state = init_subspace(ctx, fresh_direction(v0, defl.y_basis, rng), defl.y_basis);
                    rec.event = TraceEvent::converge;
                }
                if (!done && hooks.on_converged) hooks.on_converged(defl, state);
                record(rec);
                continue;
            }
            if (polishing == 0) {
                // The projected quantities claimed convergence but fresh
                // products disagree: the incremental factors have drifted.
                // Rebuild them and keep iterating on the refreshed approximation.
                state = build_subspace(ctx, state.x);
                res = extract(pair, state, o.method, o.target);
                test = residual_and_test(res, pair, o.tol);
                rec.rel_residual = test.relative();
            }
        }

        rec.event = TraceEvent::expand;
        if (state.k() >= o.k_max) {
            const Matrix kept = select_restart_vectors(res.d, res.candidates, o.k_min);
            if (hooks.on_restart) {
                const SubspaceState before = state;
                thick_restart(state, kept);
                hooks.on_restart(before, kept, state);
            } else {
                thick_restart(state, kept);
            }
            rec.event = TraceEvent::restart;
        }

        const CorrectionContext cc = build_context(res, defl.x_c, defl.y_c, pair, o);
        rec.rho_mode = cc.rho_mode;
        CorrectionSolution sol;
        if (o.inner_solver == InnerSolver::exact_dense) {
            sol = exact_solve(cc, pair);
        } else {
            sol = minres_solve(cc, pair, o);
        }
        rec.inner_iters = sol.iterations;
        result.inner_iterations += sol.iterations;

        try {
            expand(ctx, state, sol.t, defl.y_basis);
        } catch (const StagnationError&) {
            // The correction brought nothing new; nudge the subspace with a
            // random direction so the outer loop can move on.
            expand(ctx, state, rng.normal_vector(n), defl.y_basis);
        }
        record(rec);
    }

    result.outer_iterations = outer;
    result.converged = static_cast<Index>(result.components.size()) >= o.num_components;

    std::vector<double> sig;
    for (const GsvdComponent& c : result.components) sig.push_back(c.sigma());
    std::vector<GsvdComponent> sorted;
    for (Index i : order_by_target(sig, o.target)) sorted.push_back(result.components[i]);
    result.components = std::move(sorted);

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace jdgsvd
