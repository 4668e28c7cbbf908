#include "jdgsvd/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace jdgsvd {
namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// JSON has no infinity; the sigma of a component with beta = 0 is null.
nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json result_to_json(const PartialGsvdResult& r) {
    nlohmann::json comps = nlohmann::json::array();
    for (const GsvdComponent& c : r.components) {
        comps.push_back({{"alpha", c.alpha},
                         {"beta", c.beta},
                         {"sigma", finite_or_null(c.sigma())},
                         {"residual_norm", c.residual_norm}});
    }
    return {{"method", std::string(method_label(r.method))},
            {"components", comps},
            {"outer_iterations", r.outer_iterations},
            {"inner_iterations", r.inner_iterations},
            {"fallback_extractions", r.fallback_extractions},
            {"wall_seconds", r.wall_seconds},
            {"converged", r.converged}};
}

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out) {
    out << kTraceHeader << '\n';
    for (const TraceRecord& t : trace.records) {
        out << t.outer_iter << ',' << t.component_index << ',' << num(t.theta) << ',' << num(t.alpha)
            << ',' << num(t.beta) << ',' << num(t.rel_residual) << ',' << t.inner_iters << ','
            << rho_mode_name(t.rho_mode) << ',' << event_name(t.event) << '\n';
    }
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-16s %-9s %8s %10s %10s %s\n", "Problem", "Algorithm", "I_out",
                  "I_in", "T_cpu", "");
    os << line;
    std::string last;
    for (const SummaryRow& row : rows) {
        const PartialGsvdResult& r = *row.result;
        const std::string problem = row.problem == last ? "" : row.problem;
        last = row.problem;
        std::snprintf(line, sizeof line, "%-16s %-9s %8lld %10lld %10.2f %s\n", problem.c_str(),
                      std::string(method_table_name(r.method)).c_str(),
                      static_cast<long long>(r.outer_iterations),
                      static_cast<long long>(r.inner_iterations), r.wall_seconds,
                      r.converged ? "" : "(not converged)");
        os << line;
    }
    return os.str();
}

}  // namespace jdgsvd
