#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jdgsvd/sparse_matrix.hpp"

namespace jdgsvd {

enum class Method { standard, cpf_harmonic, if_harmonic };
enum class BtbSolveKind { banded_cholesky, cg };
enum class InnerSolver { minres, exact_dense };
enum class RhoMode { fixed_tau, dynamic };
enum class TraceEvent { expand, restart, converge, purge };

/// Named generators for the starting vector of the right searching subspace.
enum class InitialGenerator {
    automatic,  ///< ones(n) when B is square, mod(1:n, 4) otherwise
    ones,
    mod4,
    random,
};

/// Short method labels used in tables and files: cpf, cpfh, ifh.
std::string_view method_label(Method m);
std::string_view method_table_name(Method m);
std::optional<Method> parse_method(std::string_view label);
std::string_view rho_mode_name(RhoMode m);
std::string_view event_name(TraceEvent e);

struct SolverOptions {
    double target = 1.0;
    Index num_components = 1;
    Method method = Method::if_harmonic;
    double tol = 1e-8;
    double fixtol = 1e-4;
    double inner_eps = 1e-4;
    double inner_c = 1.0;
    Index k_max = 30;
    Index k_min = 3;
    /// 0 means n.
    Index max_outer = 0;
    /// 0 means 2n.
    Index max_inner = 0;
    InnerSolver inner_solver = InnerSolver::minres;
    std::optional<Vector> initial_vector;
    InitialGenerator initial_generator = InitialGenerator::automatic;
    BtbSolveKind btb_solve = BtbSolveKind::banded_cholesky;
    Index btb_bandwidth_limit = 64;
    double cg_tol = 1e-12;
    /// 0 means 2n.
    Index cg_max_iter = 0;
    std::uint64_t seed = 1;
    /// Components that later ones are deflated against are iterated on until
    /// their residual reaches tol * deflation_tol_factor, so that their error
    /// does not put a floor under the residuals of the next components. A
    /// component that passes tol but stalls short of that is accepted after
    /// deflation_patience further outer iterations.
    double deflation_tol_factor = 1e-2;
    Index deflation_patience = 5;

    /// Inner stopping threshold min{2 c eps, 0.01}.
    double inner_tolerance() const;

    /// Checks the option invariants for a problem with n columns and returns a
    /// copy with the size-dependent defaults resolved. k_max is capped at n and
    /// k_min at k_max - 1 for problems smaller than the defaults.
    SolverOptions resolved(Index n) const;
};

/// One nontrivial GSVD component (alpha, beta, u, v, x).
struct GsvdComponent {
    double alpha = 0.0;
    double beta = 0.0;
    Vector u;
    Vector v;
    Vector x;
    double residual_norm = 0.0;

    double sigma() const { return beta > 0.0 ? alpha / beta : std::numeric_limits<double>::infinity(); }
};

/// Outcome of checking a component against its defining relations.
struct ComponentCheck {
    double unit_circle = 0.0;     ///< |alpha^2 + beta^2 - 1|
    double u_norm = 0.0;          ///< |‖u‖ - 1|
    double v_norm = 0.0;          ///< |‖v‖ - 1|
    double x_normalization = 0.0; ///< |x^T (A^T A + B^T B) x - 1|
    double a_relation = 0.0;      ///< ‖Ax - alpha u‖ / ‖A‖_1
    double b_relation = 0.0;      ///< ‖Bx - beta v‖ / ‖B‖_1
    double residual = 0.0;        ///< ‖beta A^T u - alpha B^T v‖, from fresh products
    double residual_bound = 0.0;  ///< (beta ‖A‖_1 + alpha ‖B‖_1)
    bool in_open_interval = false;

    bool passes_invariants() const;
    bool converged(double tol) const { return residual <= residual_bound * tol; }
};

/// Recomputes every relation of a component with fresh sparse products.
ComponentCheck check_component(const MatrixPair& pair, const GsvdComponent& c);

struct TraceRecord {
    Index outer_iter = 0;
    Index component_index = 0;
    double theta = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double rel_residual = 0.0;
    Index inner_iters = 0;
    RhoMode rho_mode = RhoMode::fixed_tau;
    TraceEvent event = TraceEvent::expand;
};

struct ConvergenceTrace {
    std::vector<TraceRecord> records;
};

struct PartialGsvdResult {
    Method method = Method::standard;
    std::vector<GsvdComponent> components;
    Index outer_iterations = 0;
    Index inner_iterations = 0;
    /// Extractions that fell back to the standard Ritz pair.
    Index fallback_extractions = 0;
    ConvergenceTrace trace;
    bool converged = false;
    double wall_seconds = 0.0;
};

/// Permutation sorting sigmas by |sigma - tau| ascending; ties go to the
/// smaller sigma, then to the smaller input index.
std::vector<Index> order_by_target(const std::vector<double>& sigmas, double tau);

}  // namespace jdgsvd
