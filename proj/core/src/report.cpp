#include "fgbc/report.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace fgbc {

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string r = "\"";
  for (char c : s) {
    if (c == '"') r += '"';
    r += c;
  }
  return r + "\"";
}

void checks_csv(const Report& r, std::ostream& out) {
  out << "check,value,target,tolerance,pass\n";
  for (const auto& c : r.checks)
    out << fmt::format("{},{:.12e},{:.12e},{:.3e},{}\n", csv_quote(c.name), c.value, c.target,
                       c.tolerance, c.pass ? "PASS" : "FAIL");
}

void convergence_csv(const Report& r, std::ostream& out) {
  out << "epsilon,integral,normalized,boundary_sum,stokes_residual";
  for (std::size_t k = 0; k < r.zeros.size(); ++k) out << ",boundary_" << k;
  out << '\n';
  for (const auto& row : r.convergence) {
    out << fmt::format("{:.6g},{:.12e},{:.12e},{:.12e},{:.6e}", row.epsilon, row.integral,
                       row.normalized, row.boundary_sum, row.stokes_residual);
    for (double b : row.boundary) out << fmt::format(",{:.12e}", b);
    out << '\n';
  }
}

void zeros_csv(const Report& r, std::ostream& out) {
  out << "chart,x1,x2,degree,residual,epsilon_schedule\n";
  for (const auto& z : r.zeros) {
    std::string sched;
    for (double e : z.epsilon_schedule) sched += fmt::format("{}{:.6g}", sched.empty() ? "" : ";", e);
    out << fmt::format("{},{:.12e},{:.12e},{},{:.3e},{}\n", z.chart, z.location(0), z.location(1),
                       z.degree, z.residual, sched);
  }
}

}  // namespace

ReportFormat parse_report_format(const std::string& s) {
  if (s == "table") return ReportFormat::Table;
  if (s == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::Validation, fmt::format("unknown format '{}'", s));
}

void emit_report(const Report& r, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Csv) {
    checks_csv(r, out);
    if (!r.convergence.empty()) {
      out << '\n';
      convergence_csv(r, out);
    }
    return;
  }
  out << r.title << '\n';
  for (const auto& [k, v] : r.metadata) out << fmt::format("  {:<24} {}\n", k, v);
  if (!r.zeros.empty()) {
    out << "\nzeros\n";
    for (const auto& z : r.zeros)
      out << fmt::format("  chart {}  ({:+.8f}, {:+.8f})  degree {:+d}  |X| = {:.1e}\n", z.chart,
                         z.location(0), z.location(1), z.degree, z.residual);
  }
  if (!r.convergence.empty()) {
    out << fmt::format("\n  {:>8}  {:>16}  {:>16}  {:>16}  {:>12}\n", "epsilon", "I(eps)",
                       "2 pi I(eps)", "sum boundary", "stokes");
    for (const auto& row : r.convergence)
      out << fmt::format("  {:>8.4g}  {:>16.10f}  {:>16.10f}  {:>16.10f}  {:>12.2e}\n", row.epsilon,
                         row.integral, row.normalized, row.boundary_sum, row.stokes_residual);
  }
  out << '\n';
  for (const auto& c : r.checks)
    out << fmt::format("  [{}] {}\n         value {:.10g}  target {:.10g}  tol {:.2e}\n",
                       c.pass ? "PASS" : "FAIL", c.name, c.value, c.target, c.tolerance);
  int failed = 0;
  for (const auto& c : r.checks) failed += c.pass ? 0 : 1;
  out << fmt::format("\n{}: {} of {} checks passed ({:.1f} s)\n", r.passed() ? "PASS" : "FAIL",
                     r.checks.size() - failed, r.checks.size(), r.runtime_seconds);
}

void write_report_files(const Report& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, fmt::format("cannot create '{}': {}", dir, ec.message()));
  auto open = [&](const std::string& suffix) {
    const auto path = std::filesystem::path(dir) / (r.scenario + suffix);
    std::ofstream f(path);
    if (!f) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
    return f;
  };
  {
    auto f = open("_checks.csv");
    checks_csv(r, f);
  }
  if (r.scenario == "gbc") {
    auto f = open("_convergence.csv");
    convergence_csv(r, f);
    auto z = open("_zeros.csv");
    zeros_csv(r, z);
  }
}

int exit_code(const Report& r) { return r.passed() ? 0 : 1; }

}  // namespace fgbc
