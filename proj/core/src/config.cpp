#include "fgbc/config.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <set>
#include <optional>
#include <sstream>

namespace fgbc {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"scenario", {"id", "seed", "tolerance", "samples"}},
      {"manifold", {"type", "metric", "eps", "g11", "g12", "g22"}},
      {"connection", {"type", "perturbation_amplitude", "perturbation_profile", "vertical_factor"}},
      {"ehresmann", {"type", "table"}},
      {"vector_field", {"type", "power", "direction", "expr_u", "expr_v"}},
      {"quadrature",
       {"order_base", "order_fiber", "order_boundary", "epsilon_schedule", "richardson", "fd_step",
        "volume_step", "threads"}},
      {"output", {"dir", "format", "dump_forms"}},
  };
  return s;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Validation, fmt::format("{}: '{}' is not a number", key, text));
}

long long to_int(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != static_cast<double>(static_cast<long long>(v)))
    throw Error(ErrorKind::Validation, fmt::format("{}: '{}' is not an integer", key, text));
  return static_cast<long long>(v);
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> r;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) r.push_back(to_double("list", item));
  }
  return r;
}

bool parse_switch(const std::string& text) {
  const std::string t = trim(text);
  if (t == "on" || t == "true" || t == "1" || t == "yes") return true;
  if (t == "off" || t == "false" || t == "0" || t == "no") return false;
  throw Error(ErrorKind::Validation, fmt::format("expected on/off, got '{}'", text));
}

ExperimentConfig parse_config(const std::string& ini_text) {
  pt::ptree tree;
  std::istringstream in(ini_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::Validation, fmt::format("config line {}: {}", e.line(), e.message()));
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end())
      throw Error(ErrorKind::Validation, fmt::format("unknown config section [{}]", section));
    for (const auto& [key, _] : body)
      if (!it->second.count(key))
        throw Error(ErrorKind::Validation, fmt::format("unknown key '{}' in [{}]", key, section));
  }

  ExperimentConfig c;
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  };

  if (auto v = get("scenario.id")) c.scenario = *v;
  if (auto v = get("scenario.seed")) c.seed = static_cast<std::uint64_t>(to_int("seed", *v));
  if (auto v = get("scenario.tolerance")) c.tolerance = to_double("tolerance", *v);
  if (auto v = get("scenario.samples")) c.samples = static_cast<int>(to_int("samples", *v));

  if (auto v = get("manifold.type")) c.manifold = *v;
  if (auto v = get("manifold.metric")) c.metric = *v;
  for (const char* k : {"eps", "g11", "g12", "g22"})
    if (auto v = get(std::string("manifold.") + k)) c.metric_params[k] = to_double(k, *v);

  if (auto v = get("connection.type")) c.connection.type = *v;
  if (auto v = get("connection.perturbation_amplitude"))
    c.connection.amplitude = to_double("perturbation_amplitude", *v);
  if (auto v = get("connection.perturbation_profile")) c.connection.profile = *v;
  if (auto v = get("connection.vertical_factor"))
    c.connection.vertical_factor = to_double("vertical_factor", *v);

  if (auto v = get("ehresmann.type")) c.ehresmann.type = *v;
  if (auto v = get("ehresmann.table")) {
    const auto t = parse_number_list(*v);
    if (t.size() != 8)
      throw Error(ErrorKind::Validation,
                  fmt::format("ehresmann table needs 8 numbers, got {}", t.size()));
    std::copy(t.begin(), t.end(), c.ehresmann.table.begin());
  }

  if (auto v = get("vector_field.type")) c.field = parse_vector_field(*v);
  if (auto v = get("vector_field.power")) c.field.power = static_cast<int>(to_int("power", *v));
  if (auto v = get("vector_field.direction")) {
    const auto d = parse_number_list(*v);
    if (d.size() != 2) throw Error(ErrorKind::Validation, "direction needs two numbers");
    c.field.direction = Vec2(d[0], d[1]);
  }
  if (auto v = get("vector_field.expr_u")) c.field.expr_u = *v;
  if (auto v = get("vector_field.expr_v")) c.field.expr_v = *v;

  if (auto v = get("quadrature.order_base")) c.order_base = static_cast<int>(to_int("order_base", *v));
  if (auto v = get("quadrature.order_fiber")) c.order_fiber = static_cast<int>(to_int("order_fiber", *v));
  if (auto v = get("quadrature.order_boundary"))
    c.order_boundary = static_cast<int>(to_int("order_boundary", *v));
  if (auto v = get("quadrature.epsilon_schedule")) c.epsilon_schedule = parse_number_list(*v);
  if (auto v = get("quadrature.richardson")) c.richardson = parse_switch(*v);
  if (auto v = get("quadrature.fd_step")) c.fd_step = to_double("fd_step", *v);
  if (auto v = get("quadrature.volume_step")) c.volume_step = to_double("volume_step", *v);
  if (auto v = get("quadrature.threads")) c.threads = static_cast<int>(to_int("threads", *v));

  if (auto v = get("output.dir")) c.out_dir = *v;
  if (auto v = get("output.format")) c.format = *v;
  if (auto v = get("output.dump_forms")) c.dump_forms = parse_switch(*v);

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Validation, msg); };
  static const std::set<std::string> scenarios = {"gbc", "identities", "minkowski-props", "degrees"};
  if (!scenarios.count(c.scenario)) fail(fmt::format("unknown scenario '{}'", c.scenario));
  if (c.manifold != "sphere" && c.manifold != "torus")
    fail(fmt::format("unknown manifold '{}'", c.manifold));
  if (c.samples < 1) fail("samples must be positive");
  if (c.order_base < 4 || c.order_base > 256) fail("order_base must lie in [4, 256]");
  if (c.order_fiber < 4 || c.order_fiber > 256) fail("order_fiber must lie in [4, 256]");
  if (c.order_boundary < 4 || c.order_boundary > 1024) fail("order_boundary must lie in [4, 1024]");
  if (c.epsilon_schedule.empty()) fail("epsilon_schedule must not be empty");
  for (std::size_t i = 0; i < c.epsilon_schedule.size(); ++i) {
    const double e = c.epsilon_schedule[i];
    if (!(e > 0.0 && e < 1.0)) fail(fmt::format("epsilon {} must lie in (0, 1)", e));
    if (i > 0 && !(e < c.epsilon_schedule[i - 1])) fail("epsilon_schedule must be strictly decreasing");
  }
  if (!(c.fd_step > 0.0 && c.fd_step < 0.1)) fail("fd_step must lie in (0, 0.1)");
  if (!(c.volume_step > 0.0 && c.volume_step < 0.1)) fail("volume_step must lie in (0, 0.1)");
  if (c.threads < 0) fail("threads must be non-negative");
  if (c.format != "table" && c.format != "csv") fail(fmt::format("unknown format '{}'", c.format));
  static const std::set<std::string> connections = {"cartan", "chern_modified", "perturbed"};
  if (!connections.count(c.connection.type))
    fail(fmt::format("unknown connection type '{}'", c.connection.type));
  if (c.connection.profile != "sinusoidal" && c.connection.profile != "exact")
    fail(fmt::format("unknown perturbation profile '{}'", c.connection.profile));
  if (c.ehresmann.type != "spray" && c.ehresmann.type != "explicit")
    fail(fmt::format("unknown Ehresmann type '{}'", c.ehresmann.type));
  if (c.field.type == "stereographic_power" &&
      (c.field.power < -1 || c.field.power > 2))
    fail("stereographic_power exponent must be -1, 0, 1 or 2");
  if (c.field.type == "custom" && (c.field.expr_u.empty() || c.field.expr_v.empty()))
    fail("custom vector field needs expr_u and expr_v");
}

}  // namespace fgbc
