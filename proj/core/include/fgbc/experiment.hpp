#pragma once

// Scenario pipelines: Gauss-Bonnet-Chern verification, identity residual
// suites, Minkowski-norm property checks and degree bookkeeping.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fgbc/sphere_bundle.hpp"
#include "fgbc/topology.hpp"

namespace fgbc {

struct ExperimentConfig {
  std::string scenario = "gbc";  // gbc | identities | minkowski-props | degrees
  std::uint64_t seed = 7;
  double tolerance = -1.0;       // < 0: scenario default
  int samples = 200;             // identity points / random norm pairs

  std::string manifold = "sphere";  // sphere | torus
  std::string metric = "round_sphere";
  std::map<std::string, double> metric_params;

  ConnectionSpec connection;
  EhresmannSpec ehresmann;
  VectorFieldSpec field;

  int order_base = 48;
  int order_fiber = 64;
  int order_boundary = 64;
  std::vector<double> epsilon_schedule{0.2, 0.1, 0.05};
  bool richardson = true;
  double fd_step = 1e-4;
  double volume_step = 1e-3;
  int threads = 0;

  std::string out_dir;           // empty: no files
  std::string format = "table";  // table | csv
  bool dump_forms = false;
};

/// One pass/fail entry: |value - target| <= tolerance, or value <= tolerance
/// for residuals (target 0).
struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ConvergenceRow {
  double epsilon = 0.0;
  double integral = 0.0;     // excised integral of [X]^*((Omega^D + E) / V)
  double normalized = 0.0;   // 2 pi * integral
  double boundary_sum = 0.0; // sum over zeros of the counter-clockwise circle integrals
  double stokes_residual = 0.0;
  std::vector<double> boundary;  // per zero, in the order of Report::zeros
};

struct Report {
  std::string scenario;
  std::string title;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Check> checks;
  std::vector<ConvergenceRow> convergence;
  std::vector<ZeroRecord> zeros;
  double runtime_seconds = 0.0;  // shown in tables only; never written to CSV

  bool passed() const;
  Check& add(const std::string& name, double value, double target, double tolerance);
  Check& add_residual(const std::string& name, double residual, double tolerance);
  Check& add_flag(const std::string& name, bool ok);
};

Atlas make_atlas(const std::string& manifold);

Report run_gbc(const ExperimentConfig& config);
Report run_identity_suite(const ExperimentConfig& config);
Report run_minkowski_props(const ExperimentConfig& config);
Report run_degrees(const ExperimentConfig& config);
/// Dispatch on config.scenario.
Report run_scenario(const ExperimentConfig& config);

/// Pointwise Gauss-Bonnet-Chern integrand forms along a grid of the first
/// chart, one CSV row per point: x1,x2,theta followed by the coefficients.
void dump_forms(const ExperimentConfig& config, const std::string& path);

}  // namespace fgbc
