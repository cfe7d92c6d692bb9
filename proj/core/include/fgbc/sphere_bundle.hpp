#pragma once

// The projective sphere bundle SM of a Finsler surface in the chart
// coordinates xi = (x1, x2, theta), where theta is the angle of the ray in
// the coordinate fibre and y(xi) is its F = 1 representative. Assembles the
// connection forms of D and of the modified connection nabla, their
// curvatures and the transgression forms entering the Gauss-Bonnet-Chern
// integrand (Omega^D + E) / V.

#include <array>
#include <string>

#include "fgbc/chern_forms.hpp"
#include "fgbc/connection.hpp"
#include "fgbc/manifolds.hpp"
#include "fgbc/quadrature.hpp"

namespace fgbc {

struct ConnectionSpec {
  /// cartan: D = Chern horizontal part + A delta y;
  /// chern_modified: D = modify(Chern), built through the modification operator;
  /// perturbed: D = Cartan + a skew 1-form of the given amplitude and profile.
  std::string type = "cartan";
  double amplitude = 0.2;
  std::string profile = "sinusoidal";  // sinusoidal | exact
  double vertical_factor = 1.0;        // factor of A delta y in the modification
};

struct EhresmannSpec {
  std::string type = "spray";      // spray | explicit
  std::array<double, 8> table{};   // N^j_A = table[(2 j + A) * 2 + k] y^k
};

struct BundleOptions {
  double fd_step = 1e-4;        // connection / transgression derivatives
  double volume_step = 1e-3;    // d log V
  int fiber_order = 64;         // Gauss-Legendre nodes per panel for V
};

/// Everything attached to a point of SM that does not need derivatives in xi.
struct BundleGeometry {
  Vec2 y = Vec2::Zero();
  Eigen::Matrix<double, 2, 3> dy = Eigen::Matrix<double, 2, 3>::Zero();
  MetricJet jet;
  EhresmannData N;
  Mat2 B = Mat2::Identity();
  std::array<Mat2, 3> dB{};
  std::array<Mat2, 3> dg{};        // d_a g_ij(x, y(xi))
  ConnectionForm theta_D{};        // natural frame
  ConnectionForm theta_nabla{};
  ConnectionForm varpi_D{};        // orthonormal frame
  ConnectionForm varpi_nabla{};
};

/// Forms at one point of SM (form dimension 3). Characteristic forms are
/// normalised: omega_D = (2 pi)^{-1} Pf(-Omega^D), and so on.
struct PointForms {
  PointwiseForm omega_D{3};
  PointwiseForm omega_nabla{3};
  PointwiseForm upsilon0{3};
  PointwiseForm d_upsilon0{3};
  PointwiseForm upsilon1{3};
  PointwiseForm upsilon2{3};
  PointwiseForm d_upsilon2{3};
  PointwiseForm dlog_v{3};
  PointwiseForm frak_e{3};
  double V = 0.0;
  /// (omega_D + E) / V
  PointwiseForm integrand{3};
  /// Upsilon_1 / V
  PointwiseForm boundary{3};
};

class SphereBundle {
 public:
  SphereBundle(const Atlas& atlas, FinslerMetric metric, ConnectionSpec connection = {},
               EhresmannSpec ehresmann = {}, BundleOptions options = {});

  const Atlas& atlas() const { return atlas_; }
  const FinslerMetric& metric() const { return metric_; }
  const ConnectionSpec& connection() const { return connection_; }
  const BundleOptions& options() const { return options_; }

  BundleGeometry geometry(int chart, const Vec3& xi) const;
  /// (varpi^D, varpi^nabla) in the orthonormal frame.
  std::pair<ConnectionForm, ConnectionForm> connection_forms(int chart, const Vec3& xi) const;

  /// The perturbation 1-form added to the Cartan connection (zero unless perturbed).
  ConnectionForm perturbation(int chart, const Vec3& xi, const Vec2& y) const;

  double volume(int chart, const Vec2& x) const;
  Vec2 dlog_volume(int chart, const Vec2& x) const;

  /// All forms at xi; derivatives of the connection forms from a shared
  /// central-difference stencil with Richardson extrapolation.
  PointForms forms(int chart, const Vec3& xi) const;
  /// Upsilon_1 / V only (no derivatives needed).
  PointwiseForm boundary_form(int chart, const Vec3& xi) const;

  /// Form fields for identity checks.
  PointwiseForm pi_form_at(int chart, const Vec3& xi) const;
  PointwiseForm upsilon0_at(int chart, const Vec3& xi) const;

 private:
  Atlas atlas_;
  FinslerMetric metric_;
  ConnectionSpec connection_;
  EhresmannSpec ehresmann_;
  BundleOptions options_;
};

}  // namespace fgbc
