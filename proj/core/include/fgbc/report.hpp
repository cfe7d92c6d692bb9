#pragma once

#include <iosfwd>
#include <string>

#include "fgbc/experiment.hpp"

namespace fgbc {

enum class ReportFormat { Table, Csv };

ReportFormat parse_report_format(const std::string& s);

/// Human-readable table or machine CSV of checks and convergence rows.
void emit_report(const Report& report, ReportFormat format, std::ostream& out);

/// Writes <scenario>_checks.csv, <scenario>_convergence.csv (one row per
/// epsilon) and <scenario>_zeros.csv into `dir`, creating it if needed.
/// Output is byte-identical for identical configurations.
void write_report_files(const Report& report, const std::string& dir);

/// 0 iff every check passed.
int exit_code(const Report& report);

}  // namespace fgbc
