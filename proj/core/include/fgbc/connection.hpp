#pragma once

// Nonlinear (Ehresmann) connections, linear connections on the pulled-back
// bundle, the modification operator and connection / curvature forms on the
// sphere-bundle chart (x1, x2, theta).
//
// Index conventions: for a connection with grad s_i = theta_i^j s_j,
//   gamma[A](i, j) = gamma^j_{iA}     coefficient of dx^A in theta_i^j,
//   rho[k](i, j)   = rho^j_{ik}       coefficient of delta y^k in theta_i^j,
// and a matrix-valued 1-form on the sphere-bundle chart is stored as
// form[a](i, j) = theta_i^j(d/dxi^a), a = 0, 1, 2 for (x1, x2, theta).

#include <Eigen/Dense>
#include <array>
#include <functional>

#include "fgbc/algebra.hpp"
#include "fgbc/metric.hpp"

namespace fgbc {

using Vec3 = Eigen::Vector3d;

/// N(j, A) = N^j_A.
struct EhresmannData {
  Mat2 N = Mat2::Zero();
};

enum class FrameKind { Natural, Orthonormal };

struct ConnectionData {
  std::array<Mat2, 2> gamma{Mat2::Zero(), Mat2::Zero()};
  std::array<Mat2, 2> rho{Mat2::Zero(), Mat2::Zero()};
  FrameKind frame = FrameKind::Natural;
};

using ConnectionForm = std::array<Mat2, 3>;
/// Coordinate 2-form components, pair index p: 0 = (x1, x2), 1 = (x1, theta), 2 = (x2, theta).
using CurvatureForm = std::array<Mat2, 3>;

inline constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

/// N^i_j = d G^i / d y^j with G^i = 1/4 g^{il} ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}).
EhresmannData spray_connection(const MetricJet& jet, const Vec2& y);
EhresmannData spray_connection(const FinslerMetric& metric, int chart, const Vec2& x,
                               const Vec2& y);
/// Linear table N^j_A = c[(j * 2 + A) * 2 + k] y^k.
EhresmannData explicit_connection(const std::array<double, 8>& c, const Vec2& y);

/// delta g_ij / delta x^A = d g_ij / d x^A - N^m_A d g_ij / d y^m.
std::array<Mat2, 2> delta_metric(const MetricJet& jet, const EhresmannData& N);

/// Horizontal part of the Chern connection: the unique horizontally
/// torsion-free, partially metric-compatible choice.
ConnectionData chern_horizontal(const MetricJet& jet, const EhresmannData& N);
ConnectionData chern_horizontal(const FinslerMetric& metric, const EhresmannData& N, int chart,
                                const Vec2& x, const Vec2& y);

/// Keeps the horizontal part and replaces the vertical part by
/// factor * A^j_{ik} delta y^k. The metric-compatible choice is factor = 1.
ConnectionData modify(const ConnectionData& D, const CartanTensor& A, double factor = 1.0);

/// max |delta g_ij / delta x^A - g_ik gamma^k_{jA} - g_kj gamma^k_{iA}|.
double partial_compatibility_residual(const ConnectionData& D, const MetricJet& jet,
                                      const EhresmannData& N);

/// theta on the sphere-bundle chart for the section xi -> (x, y(xi)) with F = 1:
/// theta_i^j(d_a) = gamma^j_{iA} dx^A(d_a) + rho^j_{ik} (d_a y^k + N^k_A dx^A(d_a)).
ConnectionForm pullback_to_sphere_bundle(const ConnectionData& D, const EhresmannData& N,
                                         const Eigen::Matrix<double, 2, 3>& dy);

/// varpi_a = (d_a B) B^{-1} + B theta_a B^{-1}.
ConnectionForm to_orthonormal_frame(const ConnectionForm& theta, const Mat2& B,
                                    const std::array<Mat2, 3>& dB);
/// Inverse of to_orthonormal_frame.
ConnectionForm to_natural_frame(const ConnectionForm& varpi, const Mat2& B,
                                const std::array<Mat2, 3>& dB);

/// max over a, i, j of |d_a g_ij - theta_i^k g_kj - theta_j^k g_ik|.
double metric_compatibility_residual(const ConnectionForm& theta, const Mat2& g,
                                     const std::array<Mat2, 3>& dg);
/// max |varpi_i^j + varpi_j^i|.
double skew_residual(const ConnectionForm& varpi);

/// varpi + Bp; Bp must be skew in the orthonormal frame.
ConnectionForm perturb_metric_compatible(const ConnectionForm& varpi, const ConnectionForm& Bp,
                                         double tol = 1e-12);

/// D_s = s nabla + (1 - s) D.
ConnectionForm connection_family(const ConnectionForm& D, const ConnectionForm& nabla, double s);
ConnectionData connection_family(const ConnectionData& D, const ConnectionData& nabla, double s);

using ConnectionFormField = std::function<ConnectionForm(int chart, const Vec3& xi)>;

/// Omega_ab = d_a varpi_b - d_b varpi_a - (varpi_a varpi_b - varpi_b varpi_a), with the
/// partial derivatives by central differences (h, h/2) and Richardson extrapolation.
CurvatureForm curvature(const ConnectionFormField& varpi, int chart, const Vec3& xi,
                        double h = 1e-4);
/// Same, given the connection at xi and its coordinate derivatives.
CurvatureForm curvature(const ConnectionForm& varpi, const std::array<ConnectionForm, 3>& dvarpi);

/// Richardson-extrapolated central difference of a field along coordinate a.
template <typename T, typename F>
T central_difference(F&& f, const Vec3& xi, int a, double h) {
  Vec3 p = xi, m = xi;
  p(a) += h;
  m(a) -= h;
  const T d1 = (f(p) - f(m)) * (0.5 / h);
  p = xi;
  m = xi;
  p(a) += 0.5 * h;
  m(a) -= 0.5 * h;
  const T d2 = (f(p) - f(m)) * (1.0 / h);
  return (d2 * 4.0 - d1) * (1.0 / 3.0);
}

/// Matrix of 1-forms (dim 3) as a skew matrix-valued form; validates skewness.
SkewMatrixValuedForm as_skew_one_form(const ConnectionForm& varpi, double tol = 1e-8);
SkewMatrixValuedForm as_skew_two_form(const CurvatureForm& omega, double tol = 1e-8);

/// Exterior covariant derivative residual D Omega = dOmega + Omega ^ varpi - varpi ^ Omega
/// for a 2x2 system (max coefficient), with dOmega from finite differences.
double bianchi_residual(const ConnectionFormField& varpi, int chart, const Vec3& xi,
                        double h = 1e-3);

}  // namespace fgbc
