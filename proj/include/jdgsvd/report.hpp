#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "jdgsvd/core.hpp"

namespace jdgsvd {

inline constexpr const char* kTraceHeader =
    "outer_iter,component_index,theta,alpha,beta,rel_residual,inner_iters,rho_mode,event";

nlohmann::json result_to_json(const PartialGsvdResult& r);

/// One row per outer iteration under kTraceHeader.
void write_trace_csv(const ConvergenceTrace& trace, std::ostream& out);

/// Rows of (label, result) laid out as Algorithm | I_out | I_in | T_cpu.
struct SummaryRow {
    std::string problem;
    const PartialGsvdResult* result;
};
std::string summary_table(const std::vector<SummaryRow>& rows);

}  // namespace jdgsvd
