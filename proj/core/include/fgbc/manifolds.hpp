#pragma once

// Built-in closed oriented surfaces and the metric zoo.
//
// Sphere: chart 0 is stereographic projection from the north pole,
// z = (X + iY) / (1 - Z); chart 1 is w = (X - iY) / (1 + Z) = 1 / z. The
// transition is holomorphic, so both charts induce the same orientation.
// Integration regions are the closed unit disks (southern / northern
// hemisphere), which meet along the equator.
//
// Torus: one periodic chart [0, 2pi)^2.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>

#include "fgbc/metric.hpp"

namespace fgbc {

struct ChartPoint {
  int chart = 0;
  Vec2 x = Vec2::Zero();
};

class Atlas {
 public:
  static Atlas sphere();
  static Atlas torus();

  SurfaceKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  int chart_count() const { return kind_ == SurfaceKind::Sphere ? 2 : 1; }
  int euler_characteristic() const { return kind_ == SurfaceKind::Sphere ? 2 : 0; }

  /// Integration region of a chart: closed unit disk (sphere) or the
  /// fundamental box [0, 2pi)^2 (torus).
  bool in_region(int chart, const Vec2& x) const;

  /// Embedding into R^3 (unit sphere; torus of radii 2 and 1).
  template <typename S>
  std::array<S, 3> embed(int chart, const Vec2T<S>& x) const;
  Eigen::Vector3d embed(int chart, const Vec2& x) const;
  Eigen::Matrix<double, 3, 2> embed_jacobian(int chart, const Vec2& x) const;

  /// Coordinates of the same point in chart `to`.
  Vec2 transition(int from, const Vec2& x, int to) const;
  /// d(chart `to` coordinates) / d(chart `from` coordinates).
  Mat2 transition_jacobian(int from, const Vec2& x, int to) const;
  /// Preferred chart (the one whose region contains the point).
  ChartPoint locate(const Eigen::Vector3d& p) const;

  /// Torus coordinates reduced to [0, 2pi); identity on the sphere.
  Vec2 wrap(const Vec2& x) const;

 private:
  Atlas(SurfaceKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  SurfaceKind kind_;
  std::string name_;
};

template <typename S>
std::array<S, 3> Atlas::embed(int chart, const Vec2T<S>& x) const {
  using std::cos;
  using std::sin;
  if (kind_ == SurfaceKind::Sphere) {
    const S r2 = x[0] * x[0] + x[1] * x[1];
    const S inv = 1.0 / (1.0 + r2);
    if (chart == 0) return {2.0 * x[0] * inv, 2.0 * x[1] * inv, (r2 - 1.0) * inv};
    return {2.0 * x[0] * inv, -2.0 * x[1] * inv, (1.0 - r2) * inv};
  }
  const S ring = 2.0 + cos(x[1]);
  return {ring * cos(x[0]), ring * sin(x[0]), sin(x[1])};
}

/// Parses a zoo identifier (`euclidean`, `flat_torus`, `riemannian(g11,g12,g22)`,
/// `round_sphere`, `randers(eps)`, `quartic(eps)`); entries of `params`
/// (`eps`, `g11`, `g12`, `g22`) override the parenthesised values.
FinslerMetric install_metric(const Atlas& atlas, const std::string& zoo_id,
                             const std::map<std::string, double>& params = {});

struct CertificationReport {
  int samples = 0;
  double min_eigenvalue = 0.0;          // smallest eigenvalue of g over samples with F(y) = 1
  double max_homogeneity_error = 0.0;   // relative |F(lambda y) - lambda F(y)|
  double max_transition_error = 0.0;    // |F_to(phi(x), J y) - F_from(x, y)|
  double max_beta_norm = 0.0;           // Randers guard
  bool passed = false;
};

/// Samples the Minkowski axioms on every chart region; throws an
/// invalid-metric error on failure when `throw_on_failure` is set.
CertificationReport certify_metric(const Atlas& atlas, const FinslerMetric& metric,
                                   int samples = 1000, std::uint64_t seed = 7,
                                   bool throw_on_failure = true);

}  // namespace fgbc
