#pragma once

// Minkowski norms and Finsler metrics, with derivative channels supplied by
// nested forward-mode AD: the fundamental tensor g_ij = 1/2 [F^2]_{y^i y^j},
// the Cartan tensor A_ijk = F/4 [F^2]_{y^i y^j y^k}, first x-derivatives, and
// the indicatrix geometry of two-dimensional fibres.

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fgbc/dual.hpp"
#include "fgbc/error.hpp"

namespace fgbc {

template <typename S>
using Vec2T = std::array<S, 2>;
template <typename S>
using Mat2T = std::array<std::array<S, 2>, 2>;

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr int kMaxRank = 4;

// ---------------------------------------------------------------------------
// Minkowski norms on R^n, n <= 4.

class MinkowskiNorm {
 public:
  struct Quadratic {
    Eigen::MatrixXd G;
  };
  struct Randers {
    Eigen::MatrixXd G;
    Eigen::VectorXd b;
  };
  struct Quartic {
    double eps;
  };
  struct Sum {
    std::shared_ptr<const MinkowskiNorm> first;
    std::shared_ptr<const MinkowskiNorm> second;
  };

  static MinkowskiNorm euclidean(int n);
  static MinkowskiNorm riemannian(Eigen::MatrixXd G);
  /// sqrt(y^T G y) + b.y; rejects ||b||_G >= 1.
  static MinkowskiNorm randers(Eigen::MatrixXd G, Eigen::VectorXd b);
  /// (sum y_i^4 + eps |y|^4)^(1/4). eps = 0 is the pure quartic norm, which
  /// is degenerate on the coordinate axes.
  static MinkowskiNorm quartic(int n, double eps);

  int dim() const { return n_; }
  bool is_riemannian() const;
  std::string describe() const;

  template <typename S>
  S operator()(std::span<const S> y) const;
  double operator()(const Eigen::VectorXd& y) const {
    return (*this)(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
  }

 private:
  using Kind = std::variant<Quadratic, Randers, Quartic, Sum>;
  MinkowskiNorm(int n, Kind kind) : n_(n), kind_(std::move(kind)) {}
  friend MinkowskiNorm sum_norms(const MinkowskiNorm& a, const MinkowskiNorm& b);

  int n_;
  Kind kind_;
};

/// F1 + F2; still a Minkowski norm.
MinkowskiNorm sum_norms(const MinkowskiNorm& a, const MinkowskiNorm& b);

namespace detail {
template <typename S>
S quadratic_form(const Eigen::MatrixXd& G, std::span<const S> y) {
  S q(0.0);
  for (int i = 0; i < G.rows(); ++i)
    for (int j = 0; j < G.cols(); ++j) q += G(i, j) * (y[i] * y[j]);
  return q;
}
}  // namespace detail

template <typename S>
S MinkowskiNorm::operator()(std::span<const S> y) const {
  using std::sqrt;
  if (static_cast<int>(y.size()) != n_) throw Error(ErrorKind::Structural, "dimension mismatch");
  return std::visit(
      [&](const auto& k) -> S {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Quadratic>) {
          return sqrt(detail::quadratic_form(k.G, y));
        } else if constexpr (std::is_same_v<K, Randers>) {
          S beta(0.0);
          for (int i = 0; i < n_; ++i) beta += k.b(i) * y[i];
          return sqrt(detail::quadratic_form(k.G, y)) + beta;
        } else if constexpr (std::is_same_v<K, Quartic>) {
          S q4(0.0), q2(0.0);
          for (int i = 0; i < n_; ++i) {
            const S s = y[i] * y[i];
            q4 += s * s;
            q2 += s;
          }
          return sqrt(sqrt(q4 + k.eps * (q2 * q2)));
        } else {
          return (*k.first)(y) + (*k.second)(y);
        }
      },
      kind_);
}

struct FundamentalTensor {
  Eigen::MatrixXd g;
  Eigen::MatrixXd g_inv;
};

/// Fully symmetric A_ijk with its raised version A^j_ik = g^jl A_lik.
class CartanTensor {
 public:
  explicit CartanTensor(int n) : n_(n), lowered_(n * n * n, 0.0), raised_(n * n * n, 0.0) {}
  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return lowered_[(i * n_ + j) * n_ + k]; }
  double operator()(int i, int j, int k) const { return lowered_[(i * n_ + j) * n_ + k]; }
  /// A^j_{ik}
  double raised(int j, int i, int k) const { return raised_[(j * n_ + i) * n_ + k]; }
  void raise(const Eigen::MatrixXd& g_inv);
  double max_abs() const;

 private:
  int n_;
  std::vector<double> lowered_;
  std::vector<double> raised_;
};

/// g_ij at y; throws a domain error at y = 0 and an invalid-metric error when
/// the Hessian is not positive definite.
FundamentalTensor fundamental_tensor(const MinkowskiNorm& F, const Eigen::VectorXd& y);
CartanTensor cartan_tensor(const MinkowskiNorm& F, const Eigen::VectorXd& y);

/// Rows e_i = B_i^k s_k form a g-orthonormal basis with e_n = l = y / F(y),
/// positively oriented (det B > 0).
struct OrthonormalFrame {
  Eigen::MatrixXd B;
  Eigen::MatrixXd B_inv;
};

OrthonormalFrame orthonormal_frame(const Eigen::MatrixXd& g, const Eigen::VectorXd& y,
                                   double F);
OrthonormalFrame orthonormal_frame(const MinkowskiNorm& F, const Eigen::VectorXd& y);

/// Rank-2 orthonormal frame, generic in the scalar type so the frame can be
/// differentiated: e_2 = y / F and e_1 the positively oriented unit
/// g-normal of y. Row i of the result is e_{i+1}.
template <typename S>
Mat2T<S> orthonormal_frame_2(const Mat2T<S>& g, const Vec2T<S>& y, const S& F) {
  using std::sqrt;
  const Vec2T<S> l = {y[0] / F, y[1] / F};
  const Vec2T<S> w = {g[0][0] * l[0] + g[0][1] * l[1], g[1][0] * l[0] + g[1][1] * l[1]};
  Vec2T<S> e1 = {w[1], -w[0]};
  const S n2 = g[0][0] * (e1[0] * e1[0]) + 2.0 * (g[0][1] * (e1[0] * e1[1])) +
               g[1][1] * (e1[1] * e1[1]);
  const S inv = 1.0 / sqrt(n2);
  // det[e1; l] = w . l = g(l, l) = 1 > 0, so the orientation is already positive.
  return {{{e1[0] * inv, e1[1] * inv}, {l[0], l[1]}}};
}

// ---------------------------------------------------------------------------
// Finsler metrics on the built-in surfaces (chart-local, rank 2).

enum class SurfaceKind { Sphere, Torus };

class FinslerMetric {
 public:
  /// sqrt(y^T G y) with constant G (flat torus when G = I).
  struct ConstantRiemannian {
    Mat2 G;
  };
  /// Round unit sphere in either stereographic chart: 2|y| / (1 + |x|^2).
  struct RoundSphere {};
  /// Round sphere plus eps times the metric dual of the rotational Killing field.
  struct RandersSphere {
    double eps;
  };
  /// |y| + eps (sin x2 y1 + cos x1 y2) / sqrt(2) on the flat torus.
  struct RandersTorus {
    double eps;
  };
  /// (y1^4 + y2^4 + eps |y|^4)^(1/4) on the flat torus.
  struct QuarticTorus {
    double eps;
  };
  using Kind = std::variant<ConstantRiemannian, RoundSphere, RandersSphere, RandersTorus,
                            QuarticTorus>;

  FinslerMetric(std::string id, SurfaceKind surface, Kind kind);

  const std::string& id() const { return id_; }
  SurfaceKind surface() const { return surface_; }
  const Kind& kind() const { return kind_; }
  bool is_riemannian() const;
  /// Pointwise ||beta||_alpha for Randers metrics, 0 otherwise.
  double randers_beta_norm(int chart, const Vec2& x) const;

  template <typename S>
  S operator()(int chart, const Vec2T<S>& x, const Vec2T<S>& y) const;
  double operator()(int chart, const Vec2& x, const Vec2& y) const {
    return (*this)(chart, Vec2T<double>{x(0), x(1)}, Vec2T<double>{y(0), y(1)});
  }

 private:
  std::string id_;
  SurfaceKind surface_;
  Kind kind_;
};

template <typename S>
S FinslerMetric::operator()(int chart, const Vec2T<S>& x, const Vec2T<S>& y) const {
  using std::cos;
  using std::sin;
  using std::sqrt;
  return std::visit(
      [&](const auto& k) -> S {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstantRiemannian>) {
          return sqrt(k.G(0, 0) * (y[0] * y[0]) + 2.0 * k.G(0, 1) * (y[0] * y[1]) +
                      k.G(1, 1) * (y[1] * y[1]));
        } else if constexpr (std::is_same_v<K, RoundSphere> || std::is_same_v<K, RandersSphere>) {
          const S lam = 2.0 / (1.0 + x[0] * x[0] + x[1] * x[1]);
          const S alpha = lam * sqrt(y[0] * y[0] + y[1] * y[1]);
          if constexpr (std::is_same_v<K, RoundSphere>) {
            return alpha;
          } else {
            // Rotation about the polar axis is z -> e^{it} z in the chart
            // projected from the north pole and w -> e^{-it} w in the other.
            const double s = chart == 0 ? 1.0 : -1.0;
            const S ky = s * (x[0] * y[1] - x[1] * y[0]);
            return alpha + k.eps * (lam * lam) * ky;
          }
        } else if constexpr (std::is_same_v<K, RandersTorus>) {
          const S alpha = sqrt(y[0] * y[0] + y[1] * y[1]);
          return alpha + (k.eps / std::sqrt(2.0)) * (sin(x[1]) * y[0] + cos(x[0]) * y[1]);
        } else {
          const S a = y[0] * y[0], b = y[1] * y[1];
          return sqrt(sqrt(a * a + b * b + k.eps * ((a + b) * (a + b))));
        }
      },
      kind_);
}

/// Derivatives of F and F^2 at a slit-bundle point (x, y): third order in y,
/// first order in x (mixed with up to second order in y).
struct MetricJet {
  double F = 0.0;
  Vec2 Fx = Vec2::Zero();
  Vec2 Fy = Vec2::Zero();
  Mat2 g = Mat2::Zero();              // 1/2 [F^2]_{y^i y^j}
  std::array<Mat2, 2> dg_dy{};        // [k](i, j) = d g_ij / d y^k
  std::array<Mat2, 2> dg_dx{};        // [A](i, j) = d g_ij / d x^A
  Vec2 Qx = Vec2::Zero();             // [F^2]_{x^A}
  Mat2 Qxy = Mat2::Zero();            // (A, l) -> [F^2]_{x^A y^l}
};

/// Evaluates one nested-dual pass (outer slots x1, x2, y1, y2; two inner
/// levels in y). Throws a domain error at y = 0.
MetricJet metric_jet(const FinslerMetric& metric, int chart, const Vec2& x, const Vec2& y);

FundamentalTensor fundamental_tensor(const FinslerMetric& metric, int chart, const Vec2& x,
                                     const Vec2& y);
CartanTensor cartan_tensor(const FinslerMetric& metric, int chart, const Vec2& x,
                           const Vec2& y);
OrthonormalFrame orthonormal_frame(const FinslerMetric& metric, int chart, const Vec2& x,
                                   const Vec2& y);

/// g_ij at fixed x from a second-order pass only (cheaper than metric_jet).
Mat2 fiber_metric(const FinslerMetric& metric, int chart, const Vec2& x, const Vec2& y);

/// u(theta) / F(x, u(theta)): the F = 1 representative of the ray at angle theta.
template <typename S>
Vec2T<S> indicatrix_point(const FinslerMetric& metric, int chart, const Vec2T<S>& x,
                          const S& theta) {
  using std::cos;
  using std::sin;
  const Vec2T<S> u = {cos(theta), sin(theta)};
  const S r = 1.0 / metric(chart, x, u);
  return {r * u[0], r * u[1]};
}

/// theta -> y(theta) on the indicatrix {F(x, .) = 1}.
std::function<Vec2(double)> indicatrix_param(const FinslerMetric& metric, int chart,
                                             const Vec2& x);

/// Density rho(theta) with dnu_x = rho dtheta, from the coordinate formula
/// sqrt(det g) sum (-1)^{i-1} (y^i/F) d(y^1/F) ^ ... (hat i) ... ^ d(y^n/F).
double fiber_volume_form(const FinslerMetric& metric, int chart, const Vec2& x, double theta);

/// V(x) = integral of dnu_x over the indicatrix by composite Gauss-Legendre.
double fiber_volume(const FinslerMetric& metric, int chart, const Vec2& x, int order = 64);

}  // namespace fgbc
