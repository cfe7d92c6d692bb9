#include "fgbc/manifolds.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

namespace fgbc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Atlas Atlas::sphere() { return Atlas(SurfaceKind::Sphere, "sphere"); }
Atlas Atlas::torus() { return Atlas(SurfaceKind::Torus, "torus"); }

bool Atlas::in_region(int chart, const Vec2& x) const {
  if (chart < 0 || chart >= chart_count()) return false;
  if (kind_ == SurfaceKind::Sphere) return x.squaredNorm() <= 1.0;
  return x(0) >= 0.0 && x(0) < kTwoPi && x(1) >= 0.0 && x(1) < kTwoPi;
}

Eigen::Vector3d Atlas::embed(int chart, const Vec2& x) const {
  const auto p = embed(chart, Vec2T<double>{x(0), x(1)});
  return {p[0], p[1], p[2]};
}

Eigen::Matrix<double, 3, 2> Atlas::embed_jacobian(int chart, const Vec2& x) const {
  using D = ad::Dual<double, 2>;
  const auto p = embed(chart, Vec2T<D>{ad::variable<double, 2>(x(0), 0),
                                       ad::variable<double, 2>(x(1), 1)});
  Eigen::Matrix<double, 3, 2> J;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 2; ++a) J(i, a) = p[i].d[a];
  return J;
}

Vec2 Atlas::transition(int from, const Vec2& x, int to) const {
  if (from < 0 || from >= chart_count() || to < 0 || to >= chart_count())
    throw Error(ErrorKind::Structural, "chart index out of range");
  if (kind_ == SurfaceKind::Torus || from == to) return x;
  const double r2 = x.squaredNorm();
  if (!(r2 > 0.0)) throw Error(ErrorKind::Domain, "point lies outside the chart overlap");
  // Inversion z -> 1/z in either direction.
  return Vec2(x(0) / r2, -x(1) / r2);
}

Mat2 Atlas::transition_jacobian(int from, const Vec2& x, int to) const {
  if (kind_ == SurfaceKind::Torus || from == to) return Mat2::Identity();
  const std::complex<double> z(x(0), x(1));
  if (std::abs(z) == 0.0) throw Error(ErrorKind::Domain, "point lies outside the chart overlap");
  const std::complex<double> d = -1.0 / (z * z);
  Mat2 J;
  J << d.real(), -d.imag(), d.imag(), d.real();
  return J;
}

ChartPoint Atlas::locate(const Eigen::Vector3d& p) const {
  if (kind_ == SurfaceKind::Sphere) {
    const Eigen::Vector3d q = p.normalized();
    if (q(2) <= 0.0) return {0, Vec2(q(0), q(1)) / (1.0 - q(2))};
    return {1, Vec2(q(0), -q(1)) / (1.0 + q(2))};
  }
  const double a = std::atan2(p(1), p(0));
  const double ring = std::hypot(p(0), p(1)) - 2.0;
  const double b = std::atan2(p(2), ring);
  return {0, wrap(Vec2(a, b))};
}

Vec2 Atlas::wrap(const Vec2& x) const {
  if (kind_ == SurfaceKind::Sphere) return x;
  Vec2 r;
  for (int i = 0; i < 2; ++i) {
    r(i) = std::fmod(x(i), kTwoPi);
    if (r(i) < 0.0) r(i) += kTwoPi;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Zoo

namespace {

struct ZooId {
  std::string name;
  std::vector<double> args;
};

ZooId parse_zoo_id(const std::string& id) {
  ZooId z;
  const auto open = id.find('(');
  z.name = id.substr(0, open);
  while (!z.name.empty() && std::isspace(static_cast<unsigned char>(z.name.back()))) z.name.pop_back();
  if (open == std::string::npos) return z;
  const auto close = id.find(')', open);
  if (close == std::string::npos)
    throw Error(ErrorKind::Validation, fmt::format("unbalanced parenthesis in metric id '{}'", id));
  std::stringstream ss(id.substr(open + 1, close - open - 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      z.args.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Validation, fmt::format("bad numeric argument '{}' in '{}'", item, id));
    }
  }
  return z;
}

double pick(const std::map<std::string, double>& params, const std::string& key,
            const std::vector<double>& args, std::size_t index, double fallback) {
  if (auto it = params.find(key); it != params.end()) return it->second;
  if (index < args.size()) return args[index];
  return fallback;
}

}  // namespace

FinslerMetric install_metric(const Atlas& atlas, const std::string& zoo_id,
                             const std::map<std::string, double>& params) {
  const ZooId z = parse_zoo_id(zoo_id);
  const bool sphere = atlas.kind() == SurfaceKind::Sphere;
  auto need = [&](SurfaceKind k) {
    if (atlas.kind() != k)
      throw Error(ErrorKind::Validation,
                  fmt::format("metric '{}' is not available on the {}", z.name, atlas.name()));
  };
  if (z.name == "round_sphere") {
    need(SurfaceKind::Sphere);
    return FinslerMetric("round_sphere", SurfaceKind::Sphere, FinslerMetric::RoundSphere{});
  }
  if (z.name == "euclidean" || z.name == "flat_torus") {
    need(SurfaceKind::Torus);
    return FinslerMetric(z.name, SurfaceKind::Torus,
                         FinslerMetric::ConstantRiemannian{Mat2::Identity()});
  }
  if (z.name == "riemannian") {
    need(SurfaceKind::Torus);
    Mat2 G;
    const double g11 = pick(params, "g11", z.args, 0, 1.0);
    const double g12 = pick(params, "g12", z.args, 1, 0.0);
    const double g22 = pick(params, "g22", z.args, 2, 1.0);
    G << g11, g12, g12, g22;
    return FinslerMetric(fmt::format("riemannian({},{},{})", g11, g12, g22), SurfaceKind::Torus,
                         FinslerMetric::ConstantRiemannian{G});
  }
  if (z.name == "randers") {
    const double eps = pick(params, "eps", z.args, 0, 0.1);
    if (sphere)
      return FinslerMetric(fmt::format("randers({})", eps), SurfaceKind::Sphere,
                           FinslerMetric::RandersSphere{eps});
    return FinslerMetric(fmt::format("randers({})", eps), SurfaceKind::Torus,
                         FinslerMetric::RandersTorus{eps});
  }
  if (z.name == "quartic") {
    need(SurfaceKind::Torus);
    const double eps = pick(params, "eps", z.args, 0, 0.05);
    return FinslerMetric(fmt::format("quartic({})", eps), SurfaceKind::Torus,
                         FinslerMetric::QuarticTorus{eps});
  }
  throw Error(ErrorKind::Validation, fmt::format("unknown metric id '{}'", zoo_id));
}

CertificationReport certify_metric(const Atlas& atlas, const FinslerMetric& metric, int samples,
                                   std::uint64_t seed, bool throw_on_failure) {
  if (metric.surface() != atlas.kind())
    throw Error(ErrorKind::Structural, "metric and atlas describe different surfaces");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CertificationReport rep;
  rep.samples = samples;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const int chart = static_cast<int>(unit(rng) * atlas.chart_count()) % atlas.chart_count();
    Vec2 x;
    if (atlas.kind() == SurfaceKind::Sphere) {
      const double r = std::sqrt(unit(rng)), a = kTwoPi * unit(rng);
      x = Vec2(r * std::cos(a), r * std::sin(a));
    } else {
      x = Vec2(kTwoPi * unit(rng), kTwoPi * unit(rng));
    }
    const double t = kTwoPi * unit(rng);
    const double lambda = 0.1 + 10.0 * unit(rng);
    const Vec2 u(std::cos(t), std::sin(t));
    const double f = metric(chart, x, u);
    if (!(f > 0.0)) {
      rep.min_eigenvalue = -1.0;
      break;
    }
    const Vec2 y = u / f;
    rep.max_homogeneity_error =
        std::max(rep.max_homogeneity_error, std::abs(metric(chart, x, lambda * u) - lambda * f) / (lambda * f));
    const MetricJet jet = metric_jet(metric, chart, x, y);
    Eigen::SelfAdjointEigenSolver<Mat2> es(jet.g, Eigen::EigenvaluesOnly);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
    rep.max_beta_norm = std::max(rep.max_beta_norm, metric.randers_beta_norm(chart, x));
    if (atlas.chart_count() > 1 && x.squaredNorm() > 0.04) {
      const int other = 1 - chart;
      const Vec2 xo = atlas.transition(chart, x, other);
      const Vec2 yo = atlas.transition_jacobian(chart, x, other) * u;
      rep.max_transition_error =
          std::max(rep.max_transition_error, std::abs(metric(other, xo, yo) - f) / f);
    }
  }
  rep.passed = rep.min_eigenvalue > 0.0 && rep.max_homogeneity_error < 1e-10 &&
               rep.max_transition_error < 1e-8 && rep.max_beta_norm < 1.0;
  if (!rep.passed && throw_on_failure)
    throw Error(ErrorKind::InvalidMetric,
                fmt::format("metric '{}' failed certification (min eig {:.3e}, homogeneity {:.3e}, "
                            "transition {:.3e}, |beta| {:.3f})",
                            metric.id(), rep.min_eigenvalue, rep.max_homogeneity_error,
                            rep.max_transition_error, rep.max_beta_norm));
  return rep;
}

}  // namespace fgbc
