// finsler-gbc: runs one scenario and prints a report. Exit status 0 iff
// every check passes; 2 on configuration or pipeline errors.

#include <CLI11.hpp>

#include <iostream>

#include "fgbc/config.hpp"
#include "fgbc/experiment.hpp"
#include "fgbc/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Numerical Gauss-Bonnet-Chern verifier for Finsler surfaces"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, epsilon, richardson, format, out, dump, manifold, metric, connection,
      field;
  int order_fiber = 0, order_base = 0, order_boundary = 0, samples = 0, threads = -1;
  double amplitude = -1.0, tolerance = -1.0;
  std::uint64_t seed = 0;
  bool seed_set = false;

  app.add_option("--config", config_path, "INI experiment configuration")->check(CLI::ExistingFile);
  app.add_option("--manifold", manifold, "sphere | torus");
  app.add_option("--metric", metric, "zoo id, e.g. round_sphere, randers(0.1)");
  app.add_option("--connection", connection, "cartan | chern_modified | perturbed");
  app.add_option("--amplitude", amplitude, "perturbation amplitude");
  app.add_option("--field", field, "vector field, e.g. rotational, custom(sin(u); sin(v))");
  app.add_option("--order-fiber", order_fiber, "Gauss-Legendre nodes for fiber integrals");
  app.add_option("--order-base", order_base, "Gauss-Legendre nodes per base direction");
  app.add_option("--order-boundary", order_boundary, "nodes on excision circles");
  app.add_option("--epsilon-schedule", epsilon, "decreasing excision radii, e.g. 0.2,0.1,0.05");
  app.add_option("--richardson", richardson, "extrapolate in epsilon: on | off");
  app.add_option("--tolerance", tolerance, "override the scenario tolerance");
  app.add_option("--samples", samples, "identity points / random norm pairs");
  app.add_option("--threads", threads, "quadrature worker threads (0: all cores)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "directory for CSV output");
  app.add_option("--format", format, "table | csv");
  app.add_option("--dump-forms", dump, "write pointwise integrand forms to this CSV file");

  std::string scenario;
  for (const char* name : {"gbc", "identities", "minkowski-props", "degrees"}) {
    auto* sub = app.add_subcommand(name);
    sub->callback([&scenario, name] { scenario = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; usage errors share the error status.
    return app.exit(e) == 0 ? 0 : 2;
  }
  seed_set = seed_opt->count() > 0;

  try {
    fgbc::ExperimentConfig c = config_path.empty() ? fgbc::ExperimentConfig{} : fgbc::load_config(config_path);
    c.scenario = scenario;
    if (!manifold.empty()) c.manifold = manifold;
    if (!metric.empty()) c.metric = metric;
    if (!connection.empty()) c.connection.type = connection;
    if (amplitude >= 0.0) c.connection.amplitude = amplitude;
    if (!field.empty()) c.field = fgbc::parse_vector_field(field);
    if (order_fiber > 0) c.order_fiber = order_fiber;
    if (order_base > 0) c.order_base = order_base;
    if (order_boundary > 0) c.order_boundary = order_boundary;
    if (!epsilon.empty()) c.epsilon_schedule = fgbc::parse_number_list(epsilon);
    if (!richardson.empty()) c.richardson = fgbc::parse_switch(richardson);
    if (tolerance > 0.0) c.tolerance = tolerance;
    if (samples > 0) c.samples = samples;
    if (threads >= 0) c.threads = threads;
    if (seed_set) c.seed = seed;
    if (!out.empty()) c.out_dir = out;
    if (!format.empty()) c.format = format;
    fgbc::validate(c);

    const fgbc::Report report = fgbc::run_scenario(c);
    fgbc::emit_report(report, fgbc::parse_report_format(c.format), std::cout);
    if (!c.out_dir.empty()) fgbc::write_report_files(report, c.out_dir);
    if (!dump.empty()) fgbc::dump_forms(c, dump);
    else if (c.dump_forms && !c.out_dir.empty()) fgbc::dump_forms(c, c.out_dir + "/forms.csv");
    return fgbc::exit_code(report);
  } catch (const std::exception& e) {
    std::cerr << "finsler-gbc: " << e.what() << '\n';
    return 2;
  }
}
