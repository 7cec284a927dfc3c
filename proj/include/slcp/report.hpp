#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "slcp/problem.hpp"
#include "slcp/solver.hpp"

namespace slcp {

enum class ReportFormat { Table, Csv, Json };

std::optional<ReportFormat> parse_format(std::string_view name);

/// Column names of the csv report: j, N, x1..xk, u1..ul, F1..Fm, time_s, aloc, theta.
std::string csv_header(const ConeDims& dims);

/// Renders one row per stage. Without timing the wall-time field is left
/// empty (csv), null (json) or "-" (table), so output is reproducible.
std::string render_report(const SolveReport& rep, const ConeDims& dims, ReportFormat fmt,
                          bool timing);

}  // namespace slcp
