#include "jdgsvd/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jdgsvd/errors.hpp"
#include "jdgsvd/sparse_kernels.hpp"

namespace jdgsvd {

std::string_view method_label(Method m) {
    switch (m) {
        case Method::standard: return "cpf";
        case Method::cpf_harmonic: return "cpfh";
        case Method::if_harmonic: return "ifh";
    }
    return "?";
}

std::string_view method_table_name(Method m) {
    switch (m) {
        case Method::standard: return "CPF";
        case Method::cpf_harmonic: return "CPFH";
        case Method::if_harmonic: return "IFH";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view label) {
    if (label == "cpf" || label == "standard") return Method::standard;
    if (label == "cpfh" || label == "cpf_harmonic") return Method::cpf_harmonic;
    if (label == "ifh" || label == "if_harmonic") return Method::if_harmonic;
    return std::nullopt;
}

std::string_view rho_mode_name(RhoMode m) {
    return m == RhoMode::fixed_tau ? "fixed_tau" : "dynamic";
}

std::string_view event_name(TraceEvent e) {
    switch (e) {
        case TraceEvent::expand: return "expand";
        case TraceEvent::restart: return "restart";
        case TraceEvent::converge: return "converge";
        case TraceEvent::purge: return "purge";
    }
    return "?";
}

double SolverOptions::inner_tolerance() const { return std::min(2.0 * inner_c * inner_eps, 0.01); }

SolverOptions SolverOptions::resolved(Index n) const {
    if (n < 1) throw DimensionError("problem has no columns");
    if (!(target > 0.0) || !std::isfinite(target)) throw Error("target must be positive");
    if (num_components < 1) throw Error("num_components must be at least 1");
    if (!(tol > 0.0 && tol < 1.0)) throw Error("tol must lie in (0, 1)");
    if (!(fixtol > 0.0)) throw Error("fixtol must be positive");
    if (!(inner_eps > 0.0) || !(inner_c > 0.0)) throw Error("inner_eps and inner_c must be positive");
    if (!(cg_tol > 0.0)) throw Error("cg_tol must be positive");
    if (!(deflation_tol_factor > 0.0 && deflation_tol_factor <= 1.0)) {
        throw Error("deflation_tol_factor must lie in (0, 1]");
    }
    if (deflation_patience < 0) throw Error("deflation_patience must be nonnegative");
    if (k_min < 1 || k_max <= k_min) throw Error("need 1 <= k_min < k_max");

    SolverOptions out = *this;
    out.k_max = std::min(k_max, n);
    out.k_min = std::min(k_min, out.k_max - 1);
    if (out.k_min < 1) out.k_min = 1;
    if (out.k_max <= out.k_min) out.k_max = out.k_min + 1;
    if (out.k_max > n) throw Error("problem too small for a restartable subspace (n < 2)");
    if (out.max_outer <= 0) out.max_outer = n;
    if (out.max_inner <= 0) out.max_inner = 2 * n;
    if (out.cg_max_iter <= 0) out.cg_max_iter = 2 * n;
    if (out.initial_vector && out.initial_vector->size() != n) {
        throw DimensionError("initial vector length does not match n");
    }
    return out;
}

bool ComponentCheck::passes_invariants() const {
    return in_open_interval && unit_circle <= 1e-14 && u_norm <= 1e-14 && v_norm <= 1e-14 &&
           x_normalization <= 1e-12 && a_relation <= 1e-12 && b_relation <= 1e-12;
}

ComponentCheck check_component(const MatrixPair& pair, const GsvdComponent& c) {
    ComponentCheck out;
    const Vector ax = spmv(pair.a, c.x);
    const Vector bx = spmv(pair.b, c.x);
    const double na = std::max(pair.a.one_norm(), std::numeric_limits<double>::min());
    const double nb = std::max(pair.b.one_norm(), std::numeric_limits<double>::min());
    out.unit_circle = std::abs(c.alpha * c.alpha + c.beta * c.beta - 1.0);
    out.u_norm = std::abs(c.u.norm() - 1.0);
    out.v_norm = std::abs(c.v.norm() - 1.0);
    out.x_normalization = std::abs(ax.squaredNorm() + bx.squaredNorm() - 1.0);
    out.a_relation = (ax - c.alpha * c.u).norm() / na;
    out.b_relation = (bx - c.beta * c.v).norm() / nb;
    const Vector r = c.beta * spmv_transpose(pair.a, c.u) - c.alpha * spmv_transpose(pair.b, c.v);
    out.residual = r.norm();
    out.residual_bound = c.beta * pair.a.one_norm() + c.alpha * pair.b.one_norm();
    out.in_open_interval = c.alpha > 0.0 && c.alpha < 1.0 && c.beta > 0.0 && c.beta < 1.0;
    return out;
}

std::vector<Index> order_by_target(const std::vector<double>& sigmas, double tau) {
    std::vector<Index> perm(sigmas.size());
    std::iota(perm.begin(), perm.end(), Index{0});
    std::stable_sort(perm.begin(), perm.end(), [&](Index i, Index j) {
        const double di = std::abs(sigmas[i] - tau);
        const double dj = std::abs(sigmas[j] - tau);
        if (di != dj) return di < dj;
        if (sigmas[i] != sigmas[j]) return sigmas[i] < sigmas[j];
        return i < j;
    });
    return perm;
}

}  // namespace jdgsvd
