#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <sstream>

#include "fgbc/config.hpp"
#include "fgbc/experiment.hpp"
#include "fgbc/report.hpp"

using namespace fgbc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fgbc_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig quick_torus() {
  ExperimentConfig c;
  c.manifold = "torus";
  c.metric = "randers(0.3)";
  c.field = parse_vector_field("custom(sin(u); sin(v))");
  c.order_base = 12;
  c.order_fiber = 16;
  c.order_boundary = 16;
  c.epsilon_schedule = {0.2, 0.1};
  c.threads = 1;
  return c;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FGBC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesEverySection) {
  const auto c = parse_config(R"(
[scenario]
id = identities
seed = 42
tolerance = 0.005
samples = 17

[manifold]
type = torus
metric = riemannian
g11 = 2
g12 = 0.3
g22 = 1

[connection]
type = perturbed
perturbation_amplitude = 0.25
perturbation_profile = exact
vertical_factor = 1

[ehresmann]
type = explicit
table = 0,0,0,0, 0,0,0,0

[vector_field]
type = custom(sin(u); sin(v))

[quadrature]
order_base = 32
order_fiber = 40
order_boundary = 80
epsilon_schedule = 0.3, 0.15, 0.075
richardson = off
fd_step = 1e-3
volume_step = 1e-3
threads = 1

[output]
format = csv
dump_forms = no
)");
  EXPECT_EQ(c.scenario, "identities");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.samples, 17);
  EXPECT_EQ(c.metric_params.at("g12"), 0.3);
  EXPECT_EQ(c.connection.type, "perturbed");
  EXPECT_EQ(c.connection.amplitude, 0.25);
  EXPECT_EQ(c.ehresmann.type, "explicit");
  EXPECT_EQ(c.field.type, "custom");
  EXPECT_EQ(c.field.expr_v, "sin(v)");
  EXPECT_EQ(c.epsilon_schedule, (std::vector<double>{0.3, 0.15, 0.075}));
  EXPECT_FALSE(c.richardson);
  EXPECT_EQ(c.order_boundary, 80);
  EXPECT_EQ(c.format, "csv");
}

TEST(Config, KeyedFieldParameters) {
  const auto a = parse_config("[vector_field]\ntype = stereographic_power\npower = -1\n");
  EXPECT_EQ(a.field.type, "stereographic_power");
  EXPECT_EQ(a.field.power, -1);
  const auto b = parse_config("[manifold]\ntype = torus\nmetric = flat_torus\n"
                              "[vector_field]\ntype = custom\nexpr_u = sin(u)\nexpr_v = cos(v)\n");
  EXPECT_EQ(b.field.expr_u, "sin(u)");
  EXPECT_EQ(b.field.expr_v, "cos(v)");
}

TEST(Config, ShippedConfigsLoad) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(FGBC_CONFIG_DIR)) {
    if (e.path().extension() != ".ini") continue;
    EXPECT_NO_THROW((void)load_config(e.path().string())) << e.path();
    ++n;
  }
  EXPECT_GT(n, 0);
}

TEST(Config, RejectsBadInput) {
  const char* bad[] = {
      "[scenario]\nidd = gbc\n",
      "[solver]\nid = gbc\n",
      "[scenario]\nid = everything\n",
      "[quadrature]\norder_base = many\n",
      "[quadrature]\norder_base = 2\n",
      "[quadrature]\nepsilon_schedule = 0.1, 0.2\n",
      "[quadrature]\nepsilon_schedule = 1.5\n",
      "[quadrature]\nrichardson = maybe\n",
      "[quadrature]\nfd_step = 0.5\n",
      "[connection]\ntype = levi_civita\n",
      "[ehresmann]\ntable = 1, 2\n",
      "[vector_field]\ntype = stereographic_power(3)\n",
      "[vector_field]\ntype = custom\n",
      "[output]\nformat = xml\n",
      "not an ini file [",
  };
  for (const char* text : bad) {
    try {
      (void)parse_config(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Validation) << text;
    }
  }
  EXPECT_THROW((void)load_config("/nonexistent/config.ini"), Error);
}

TEST(Config, Helpers) {
  EXPECT_EQ(parse_number_list(" 1, 2.5 ,-3e-1 "), (std::vector<double>{1.0, 2.5, -0.3}));
  EXPECT_TRUE(parse_switch("on"));
  EXPECT_FALSE(parse_switch(" false "));
  EXPECT_THROW((void)parse_number_list("1, x"), Error);
}

TEST(Report, ChecksAndExitCode) {
  Report r;
  r.scenario = "demo";
  EXPECT_TRUE(r.add("value", 1.004, 1.0, 0.01).pass);
  EXPECT_TRUE(r.add_residual("residual", 1e-9, 1e-8).pass);
  EXPECT_EQ(exit_code(r), 0);
  EXPECT_FALSE(r.add("far", 2.0, 1.0, 0.5).pass);
  EXPECT_EQ(exit_code(r), 1);
  std::ostringstream csv;
  emit_report(r, ReportFormat::Csv, csv);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "check,value,target,tolerance,pass");
  EXPECT_NE(csv.str().find("far,"), std::string::npos);
  EXPECT_THROW((void)parse_report_format("json"), Error);
}

TEST(Report, ConvergenceTableHasOneRowPerEpsilon) {
  const auto c = quick_torus();
  const Report r = run_gbc(c);
  ASSERT_EQ(r.convergence.size(), c.epsilon_schedule.size());
  ASSERT_EQ(r.zeros.size(), 4u);
  const auto dir = scratch("rows");
  write_report_files(r, dir.string());
  const std::string conv = slurp(dir / "gbc_convergence.csv");
  EXPECT_EQ(std::count(conv.begin(), conv.end(), '\n'), 1 + static_cast<long>(c.epsilon_schedule.size()));
  const std::string zeros = slurp(dir / "gbc_zeros.csv");
  EXPECT_EQ(std::count(zeros.begin(), zeros.end(), '\n'), 5);
  fs::remove_all(dir);
}

TEST(Report, OutputIsDeterministic) {
  auto c = quick_torus();
  const auto a = scratch("det_a"), b = scratch("det_b");
  write_report_files(run_gbc(c), a.string());
  c.threads = 2;
  write_report_files(run_gbc(c), b.string());
  for (const char* f : {"gbc_checks.csv", "gbc_convergence.csv", "gbc_zeros.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("gbc --bogus"), 2);
  EXPECT_EQ(run_cli("gbc --manifold torus --metric nonsense --field constant"), 2);
  EXPECT_EQ(run_cli("gbc --epsilon-schedule 0.1,0.2"), 2);
  EXPECT_EQ(run_cli("gbc --config /nonexistent.ini"), 2);
  EXPECT_EQ(run_cli("gbc --manifold torus --metric flat_torus --field constant --order-base 8 "
                    "--order-fiber 8"),
            0);
  EXPECT_EQ(run_cli("gbc --manifold torus --metric 'randers(0.3)' --field 'custom(sin(u); sin(v))' "
                    "--order-base 8 --order-fiber 8 --order-boundary 8 --epsilon-schedule 0.2 "
                    "--tolerance 1e-14"),
            1);
}

TEST(Cli, WritesFilesAndForms) {
  const auto dir = scratch("cli_out");
  const std::string forms = (dir / "forms.csv").string();
  ASSERT_EQ(run_cli("gbc --manifold torus --metric flat_torus --field constant --order-base 8 "
                    "--order-fiber 8 --format csv --out " + dir.string() + " --dump-forms " + forms),
            0);
  EXPECT_TRUE(fs::exists(dir / "gbc_checks.csv"));
  EXPECT_TRUE(fs::exists(dir / "gbc_convergence.csv"));
  EXPECT_GT(fs::file_size(forms), 0u);
  fs::remove_all(dir);
}
