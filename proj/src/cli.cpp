#include "jdgsvd/cli.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jdgsvd/driver.hpp"
#include "jdgsvd/errors.hpp"
#include "jdgsvd/generators.hpp"
#include "jdgsvd/matrix_market.hpp"
#include "jdgsvd/probe.hpp"
#include "jdgsvd/report.hpp"

namespace jdgsvd {
namespace {

struct CliArgs {
    std::string matrix_a;
    std::string a_gen;
    std::string matrix_b;
    std::string b_gen;
    Index m = 0;
    Index n = 0;
    double density = 0.01;
    std::uint64_t seed = 1;
    double target = 0.0;
    Index num = 1;
    std::string method = "ifh";
    double tol = 1e-8;
    double fixtol = 1e-4;
    double inner_eps = 1e-4;
    double inner_c = 1.0;
    Index kmax = 30;
    Index kmin = 3;
    Index max_outer = 0;
    std::string btb = "cholesky";
    std::string trace;
    std::string out;
    bool parallel_methods = false;
    bool probe = false;
};

/// trace.csv -> trace.ifh.csv when several methods share one path.
std::string suffixed(const std::string& path, std::string_view label) {
    const auto slash = path.find_last_of('/');
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + "." + std::string(label);
    }
    return path.substr(0, dot) + "." + std::string(label) + path.substr(dot);
}

MatrixPair load_pair(const CliArgs& a) {
    SparseMatrix ma;
    if (!a.matrix_a.empty()) {
        ma = read_matrix_market(a.matrix_a);
    } else {
        if (a.n < 1) throw DimensionError("--a random_sparse needs --n");
        ma = random_sparse(a.m > 0 ? a.m : a.n, a.n, a.density, a.seed);
    }
    SparseMatrix mb;
    if (!a.matrix_b.empty()) {
        mb = read_matrix_market(a.matrix_b);
    } else {
        mb = generate_b(*parse_b_kind(a.b_gen), ma.cols());
    }
    return MatrixPair(std::move(ma), std::move(mb));
}

struct MethodRun {
    Method method;
    std::optional<PartialGsvdResult> result;
    std::string failure;
    int failure_code = kExitOk;
};

MethodRun run_method(const MatrixPair& pair, SolverOptions opts, Method m) {
    MethodRun run{m, std::nullopt, {}, kExitOk};
    opts.method = m;
    try {
        run.result = solve(pair, opts);
    } catch (const PreconditionError& e) {
        run.failure = e.what();
        run.failure_code = kExitPrecondition;
    } catch (const BandwidthError& e) {
        run.failure = e.what();
        run.failure_code = kExitPrecondition;
    }
    return run;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partial GSVD of a sparse matrix pair by Jacobi-Davidson methods", "jdgsvd"};
    CliArgs a;
    auto* src_a = app.add_option("--matrix-a", a.matrix_a, "Matrix Market file for A")->check(CLI::ExistingFile);
    auto* gen_a = app.add_option("--a", a.a_gen, "Generator for A")->check(CLI::IsMember({"random_sparse"}));
    src_a->excludes(gen_a);
    auto* src_b = app.add_option("--matrix-b", a.matrix_b, "Matrix Market file for B")->check(CLI::ExistingFile);
    auto* gen_b = app.add_option("--b-gen", a.b_gen, "Generator for B")->check(CLI::IsMember({"T", "L1", "L2"}));
    src_b->excludes(gen_b);
    app.add_option("--m", a.m, "Rows of a generated A (default n)")->check(CLI::PositiveNumber);
    app.add_option("--n", a.n, "Columns of a generated A")->check(CLI::PositiveNumber);
    app.add_option("--density", a.density, "Density of a generated A")->capture_default_str();
    app.add_option("--seed", a.seed, "Seed for generated data")->capture_default_str();
    app.add_option("--target", a.target, "Target tau")->required()->check(CLI::PositiveNumber);
    app.add_option("--num", a.num, "Number of components")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("--method", a.method, "Extraction method")
        ->capture_default_str()
        ->check(CLI::IsMember({"cpf", "cpfh", "ifh", "all"}));
    app.add_option("--tol", a.tol, "Outer tolerance")->capture_default_str();
    app.add_option("--fixtol", a.fixtol, "Switch to rho = theta below this")->capture_default_str();
    app.add_option("--inner-eps", a.inner_eps, "Inner tolerance eps")->capture_default_str();
    app.add_option("--inner-c", a.inner_c, "Inner tolerance constant c")->capture_default_str();
    app.add_option("--kmax", a.kmax, "Maximum subspace dimension")->capture_default_str();
    app.add_option("--kmin", a.kmin, "Dimension kept at a restart")->capture_default_str();
    app.add_option("--max-outer", a.max_outer, "Outer iteration limit (default n)");
    app.add_option("--btb", a.btb, "How to apply (B^T B)^{-1}")
        ->capture_default_str()
        ->check(CLI::IsMember({"cholesky", "cg"}));
    app.add_option("--trace", a.trace, "Trace CSV path");
    app.add_option("--out", a.out, "Result JSON path");
    app.add_flag("--parallel-methods", a.parallel_methods, "Run the methods concurrently");
    app.add_flag("--probe", a.probe, "Print dense diagnostics of the pair (small n)");

    try {
        app.parse(argc, argv);
        if (a.matrix_a.empty() && a.a_gen.empty()) throw CLI::ValidationError("need --matrix-a or --a random_sparse");
        if (a.matrix_b.empty() && a.b_gen.empty()) throw CLI::ValidationError("need --matrix-b or --b-gen");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    std::optional<MatrixPair> pair;
    try {
        pair.emplace(load_pair(a));
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitParse;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (a.probe) {
        try {
            const ProbeReport p = probe_pair(*pair);
            out << "m=" << pair->m() << " p=" << pair->p() << " n=" << pair->n()
                << " nnz=" << pair->a.nnz() + pair->b.nnz() << " cond([A;B])=" << p.stack_condition
                << " sigma_max=" << p.sigma_max() << " sigma_min=" << p.sigma_min()
                << " regular=" << (p.regular ? "yes" : "no") << '\n';
        } catch (const Error& e) {
            err << "probe skipped: " << e.what() << '\n';
        }
    }

    SolverOptions opts;
    opts.target = a.target;
    opts.num_components = a.num;
    opts.tol = a.tol;
    opts.fixtol = a.fixtol;
    opts.inner_eps = a.inner_eps;
    opts.inner_c = a.inner_c;
    opts.k_max = a.kmax;
    opts.k_min = a.kmin;
    opts.max_outer = a.max_outer;
    opts.btb_solve = a.btb == "cg" ? BtbSolveKind::cg : BtbSolveKind::banded_cholesky;
    opts.seed = a.seed;
    try {
        (void)opts.resolved(pair->n());
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::vector<Method> methods;
    if (a.method == "all") methods = {Method::standard, Method::cpf_harmonic, Method::if_harmonic};
    else methods = {*parse_method(a.method)};

    std::vector<MethodRun> runs;
    try {
        if (a.parallel_methods && methods.size() > 1) {
            std::vector<std::future<MethodRun>> futures;
            for (Method m : methods) {
                futures.push_back(std::async(std::launch::async, run_method, std::cref(*pair), opts, m));
            }
            for (auto& f : futures) runs.push_back(f.get());
        } else {
            for (Method m : methods) runs.push_back(run_method(*pair, opts, m));
        }
    } catch (const Error& e) {
        err << "error: solver failed: " << e.what() << '\n';
        return kExitNotConverged;
    }

    int code = kExitOk;
    std::vector<SummaryRow> rows;
    nlohmann::json results = nlohmann::json::array();
    const std::string problem = a.matrix_a.empty() ? "random_sparse" : a.matrix_a;
    for (const MethodRun& run : runs) {
        if (!run.result) {
            err << method_table_name(run.method) << ": " << run.failure << '\n';
            code = std::max(code, run.failure_code);
            results.push_back({{"method", std::string(method_label(run.method))}, {"error", run.failure}});
            continue;
        }
        const PartialGsvdResult& r = *run.result;
        rows.push_back({problem, &r});
        nlohmann::json j = result_to_json(r);
        j["target"] = a.target;
        j["seed"] = a.seed;
        results.push_back(j);
        if (!r.converged) code = std::max<int>(code, kExitNotConverged);
        if (!a.trace.empty()) {
            const std::string path = runs.size() > 1 ? suffixed(a.trace, method_label(r.method)) : a.trace;
            std::ofstream f(path);
            if (!f) {
                err << "error: cannot write " << path << '\n';
                return kExitUsage;
            }
            write_trace_csv(r.trace, f);
        }
    }
    if (!rows.empty()) {
        out << summary_table(rows);
        for (const SummaryRow& row : rows) {
            out << method_table_name(row.result->method) << " components:\n";
            for (const GsvdComponent& c : row.result->components) {
                char line[160];
                std::snprintf(line, sizeof line, "  sigma=%.15g  alpha=%.15g  beta=%.15g  residual=%.3e\n",
                              c.sigma(), c.alpha, c.beta, c.residual_norm);
                out << line;
            }
        }
    }
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) {
            err << "error: cannot write " << a.out << '\n';
            return kExitUsage;
        }
        f << (runs.size() == 1 ? results[0] : results).dump(2) << '\n';
    }
    return code;
}

}  // namespace jdgsvd
