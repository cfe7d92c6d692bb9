#include "fgbc/metric.hpp"

#include <fmt/format.h>

#include <numbers>

#include "fgbc/gauss.hpp"

namespace fgbc {

using ad::Dual;

// ---------------------------------------------------------------------------
// MinkowskiNorm

MinkowskiNorm MinkowskiNorm::euclidean(int n) {
  return riemannian(Eigen::MatrixXd::Identity(n, n));
}

MinkowskiNorm MinkowskiNorm::riemannian(Eigen::MatrixXd G) {
  const int n = static_cast<int>(G.rows());
  if (n < 1 || n > kMaxRank || G.cols() != n)
    throw Error(ErrorKind::Structural, "Gram matrix must be square of size 1..4");
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-14)
    throw Error(ErrorKind::InvalidMetric, "Gram matrix is not symmetric");
  if (G.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorKind::InvalidMetric, "Gram matrix is not positive definite");
  return MinkowskiNorm(n, Quadratic{std::move(G)});
}

MinkowskiNorm MinkowskiNorm::randers(Eigen::MatrixXd G, Eigen::VectorXd b) {
  const MinkowskiNorm alpha = riemannian(G);
  if (b.size() != alpha.dim()) throw Error(ErrorKind::Structural, "one-form dimension mismatch");
  const double norm = std::sqrt(b.dot(G.ldlt().solve(b)));
  if (norm >= 1.0)
    throw Error(ErrorKind::InvalidMetric,
                fmt::format("Randers one-form has alpha-norm {:.6g} >= 1", norm));
  return MinkowskiNorm(alpha.dim(), Randers{std::move(G), std::move(b)});
}

MinkowskiNorm MinkowskiNorm::quartic(int n, double eps) {
  if (n < 1 || n > kMaxRank) throw Error(ErrorKind::Structural, "dimension must be 1..4");
  if (eps < 0.0) throw Error(ErrorKind::InvalidMetric, "quartic mix must be non-negative");
  return MinkowskiNorm(n, Quartic{eps});
}

MinkowskiNorm sum_norms(const MinkowskiNorm& a, const MinkowskiNorm& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::Structural, "norm dimension mismatch");
  return MinkowskiNorm(a.dim(), MinkowskiNorm::Sum{std::make_shared<MinkowskiNorm>(a),
                                                   std::make_shared<MinkowskiNorm>(b)});
}

bool MinkowskiNorm::is_riemannian() const {
  return std::holds_alternative<Quadratic>(kind_);
}

std::string MinkowskiNorm::describe() const {
  return std::visit(
      [&](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Quadratic>) return fmt::format("riemannian(n={})", n_);
        else if constexpr (std::is_same_v<K, Randers>)
          return fmt::format("randers(n={}, |b|={:.3g})", n_, k.b.norm());
        else if constexpr (std::is_same_v<K, Quartic>) return fmt::format("quartic({})", k.eps);
        else return k.first->describe() + " + " + k.second->describe();
      },
      kind_);
}

// ---------------------------------------------------------------------------
// Tensors of a Minkowski norm

namespace {

void require_nonzero(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  if (!(s > 0.0)) throw Error(ErrorKind::Domain, "direction y = 0 lies outside the slit bundle");
}

void require_positive_definite(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw Error(ErrorKind::InvalidMetric,
                fmt::format("fundamental tensor not positive definite (min eigenvalue {:.3e})",
                            es.eigenvalues().minCoeff()));
}

using H2 = Dual<Dual<double, kMaxRank>, kMaxRank>;
using H3 = Dual<H2, kMaxRank>;

}  // namespace

FundamentalTensor fundamental_tensor(const MinkowskiNorm& F, const Eigen::VectorXd& y) {
  const int n = F.dim();
  if (y.size() != n) throw Error(ErrorKind::Structural, "direction dimension mismatch");
  require_nonzero({y.data(), static_cast<std::size_t>(n)});
  std::array<H2, kMaxRank> yd{};
  for (int i = 0; i < n; ++i) {
    yd[i].v.v = y(i);
    yd[i].v.d[i] = 1.0;
    yd[i].d[i].v = 1.0;
  }
  const H2 f = F(std::span<const H2>(yd.data(), n));
  const H2 q = f * f;
  FundamentalTensor t;
  t.g.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) t.g(i, j) = 0.5 * q.d[i].d[j];
  t.g = 0.5 * (t.g + t.g.transpose()).eval();
  require_positive_definite(t.g);
  t.g_inv = t.g.inverse();
  return t;
}

void CartanTensor::raise(const Eigen::MatrixXd& g_inv) {
  for (int j = 0; j < n_; ++j)
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < n_; ++k) {
        double s = 0.0;
        for (int l = 0; l < n_; ++l) s += g_inv(j, l) * (*this)(l, i, k);
        raised_[(j * n_ + i) * n_ + k] = s;
      }
}

double CartanTensor::max_abs() const {
  double m = 0.0;
  for (double v : lowered_) m = std::max(m, std::abs(v));
  return m;
}

CartanTensor cartan_tensor(const MinkowskiNorm& F, const Eigen::VectorXd& y) {
  const int n = F.dim();
  const FundamentalTensor ft = fundamental_tensor(F, y);
  std::array<H3, kMaxRank> yd{};
  for (int i = 0; i < n; ++i) {
    yd[i].v.v.v = y(i);
    yd[i].v.v.d[i] = 1.0;
    yd[i].v.d[i].v = 1.0;
    yd[i].d[i].v.v = 1.0;
  }
  const H3 f = F(std::span<const H3>(yd.data(), n));
  const H3 q = f * f;
  const double Fv = ad::value(f);
  CartanTensor A(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) A(i, j, k) = 0.25 * Fv * q.d[i].d[j].d[k];
  A.raise(ft.g_inv);
  return A;
}

OrthonormalFrame orthonormal_frame(const Eigen::MatrixXd& g, const Eigen::VectorXd& y,
                                   double F) {
  const int n = static_cast<int>(g.rows());
  if (n < 2 || n > kMaxRank) throw Error(ErrorKind::Structural, "frame rank must be 2..4");
  OrthonormalFrame fr;
  fr.B.resize(n, n);
  const Eigen::VectorXd l = y / F;
  if (n == 2) {
    const Mat2T<double> gg = {{{g(0, 0), g(0, 1)}, {g(1, 0), g(1, 1)}}};
    const Mat2T<double> b = orthonormal_frame_2(gg, Vec2T<double>{y(0), y(1)}, F);
    fr.B << b[0][0], b[0][1], b[1][0], b[1][1];
  } else {
    // Complete l with the coordinate axes least aligned with it.
    const Eigen::VectorXd gl = g * l;
    std::vector<int> axes(n);
    for (int k = 0; k < n; ++k) axes[k] = k;
    std::stable_sort(axes.begin(), axes.end(), [&](int a, int b) {
      return std::abs(gl(a)) / std::sqrt(g(a, a)) < std::abs(gl(b)) / std::sqrt(g(b, b));
    });
    std::vector<Eigen::VectorXd> basis{l};
    for (int m = 0; m < n - 1; ++m) {
      Eigen::VectorXd v = Eigen::VectorXd::Unit(n, axes[m]);
      for (const auto& e : basis) v -= (e.dot(g * v)) * e;
      const double nn = std::sqrt(v.dot(g * v));
      if (!(nn > 1e-12)) throw Error(ErrorKind::InvalidMetric, "degenerate fundamental tensor");
      basis.push_back(v / nn);
    }
    for (int m = 0; m < n - 1; ++m) fr.B.row(m) = basis[m + 1].transpose();
    fr.B.row(n - 1) = l.transpose();
    if (fr.B.determinant() < 0.0) fr.B.row(0) *= -1.0;
  }
  fr.B_inv = fr.B.inverse();
  return fr;
}

OrthonormalFrame orthonormal_frame(const MinkowskiNorm& F, const Eigen::VectorXd& y) {
  const FundamentalTensor t = fundamental_tensor(F, y);
  return orthonormal_frame(t.g, y, F(y));
}

// ---------------------------------------------------------------------------
// FinslerMetric

FinslerMetric::FinslerMetric(std::string id, SurfaceKind surface, Kind kind)
    : id_(std::move(id)), surface_(surface), kind_(std::move(kind)) {
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, ConstantRiemannian>) {
          if (std::abs(k.G(0, 1) - k.G(1, 0)) > 1e-14 || k.G(0, 0) <= 0.0 || k.G.determinant() <= 0.0)
            throw Error(ErrorKind::InvalidMetric, "Gram matrix is not symmetric positive definite");
        } else if constexpr (std::is_same_v<K, RandersSphere>) {
          if (!(std::abs(k.eps) < 1.0))
            throw Error(ErrorKind::InvalidMetric, "Randers sphere requires |eps| < 1");
        } else if constexpr (std::is_same_v<K, RandersTorus>) {
          if (!(std::abs(k.eps) < 1.0))
            throw Error(ErrorKind::InvalidMetric, "Randers torus requires |eps| < 1");
        } else if constexpr (std::is_same_v<K, QuarticTorus>) {
          if (!(k.eps > 0.0))
            throw Error(ErrorKind::InvalidMetric, "quartic torus metric requires eps > 0");
        }
      },
      kind_);
}

bool FinslerMetric::is_riemannian() const {
  return std::holds_alternative<ConstantRiemannian>(kind_) ||
         std::holds_alternative<RoundSphere>(kind_);
}

double FinslerMetric::randers_beta_norm(int, const Vec2& x) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, RandersSphere>) {
          // |beta|_alpha = eps lam^2 |x| / lam = eps lam |x| = eps sin(polar angle).
          const double r2 = x.squaredNorm();
          return std::abs(k.eps) * 2.0 * std::sqrt(r2) / (1.0 + r2);
        } else if constexpr (std::is_same_v<K, RandersTorus>) {
          const double b1 = std::sin(x(1)), b2 = std::cos(x(0));
          return std::abs(k.eps) * std::sqrt((b1 * b1 + b2 * b2) / 2.0);
        } else {
          return 0.0;
        }
      },
      kind_);
}

namespace {

using J1 = Dual<double, 2>;
using J2 = Dual<J1, 2>;
using Jet = Dual<J2, 4>;

}  // namespace

MetricJet metric_jet(const FinslerMetric& metric, int chart, const Vec2& x, const Vec2& y) {
  if (!(y.squaredNorm() > 0.0))
    throw Error(ErrorKind::Domain, "direction y = 0 lies outside the slit bundle");
  Vec2T<Jet> xs{}, ys{};
  for (int a = 0; a < 2; ++a) {
    xs[a].v = J2(J1(x(a)));
    xs[a].d[a] = J2(1.0);
    ys[a].v.v.v = y(a);
    ys[a].v.v.d[a] = 1.0;
    ys[a].v.d[a] = J1(1.0);
    ys[a].d[2 + a] = J2(1.0);
  }
  const Jet f = metric(chart, xs, ys);
  const Jet q = f * f;

  MetricJet jet;
  jet.F = f.v.v.v;
  if (!(jet.F > 0.0)) throw Error(ErrorKind::InvalidMetric, "F is not positive off the zero section");
  for (int a = 0; a < 2; ++a) {
    jet.Fx(a) = f.d[a].v.v;
    jet.Fy(a) = f.v.v.d[a];
    jet.Qx(a) = q.d[a].v.v;
    for (int l = 0; l < 2; ++l) jet.Qxy(a, l) = q.d[a].v.d[l];
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      jet.g(i, j) = 0.5 * q.v.d[i].d[j];
      for (int k = 0; k < 2; ++k) {
        jet.dg_dy[k](i, j) = 0.5 * q.d[2 + k].d[i].d[j];
        jet.dg_dx[k](i, j) = 0.5 * q.d[k].d[i].d[j];
      }
    }
  jet.g = 0.5 * (jet.g + jet.g.transpose()).eval();
  return jet;
}

FundamentalTensor fundamental_tensor(const FinslerMetric& metric, int chart, const Vec2& x,
                                     const Vec2& y) {
  const MetricJet jet = metric_jet(metric, chart, x, y);
  FundamentalTensor t{jet.g, Eigen::MatrixXd()};
  require_positive_definite(t.g);
  t.g_inv = t.g.inverse();
  return t;
}

CartanTensor cartan_tensor(const FinslerMetric& metric, int chart, const Vec2& x,
                           const Vec2& y) {
  const MetricJet jet = metric_jet(metric, chart, x, y);
  require_positive_definite(jet.g);
  CartanTensor A(2);
  // A_ijk = F/4 [F^2]_{y^i y^j y^k} = F/2 d g_ij / d y^k.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) A(i, j, k) = 0.5 * jet.F * jet.dg_dy[k](i, j);
  A.raise(jet.g.inverse());
  return A;
}

OrthonormalFrame orthonormal_frame(const FinslerMetric& metric, int chart, const Vec2& x,
                                   const Vec2& y) {
  const MetricJet jet = metric_jet(metric, chart, x, y);
  require_positive_definite(jet.g);
  return orthonormal_frame(jet.g, y, jet.F);
}

std::function<Vec2(double)> indicatrix_param(const FinslerMetric& metric, int chart,
                                             const Vec2& x) {
  return [metric, chart, x](double theta) {
    const Vec2T<double> y =
        indicatrix_point(metric, chart, Vec2T<double>{x(0), x(1)}, theta);
    return Vec2(y[0], y[1]);
  };
}

Mat2 fiber_metric(const FinslerMetric& metric, int chart, const Vec2& x, const Vec2& y) {
  using D2 = Dual<Dual<double, 2>, 2>;
  const Vec2T<D2> xs = {D2(x(0)), D2(x(1))};
  Vec2T<D2> ys{};
  for (int a = 0; a < 2; ++a) {
    ys[a].v.v = y(a);
    ys[a].v.d[a] = 1.0;
    ys[a].d[a].v = 1.0;
  }
  const D2 f = metric(chart, xs, ys);
  const D2 q = f * f;
  Mat2 g;
  g << 0.5 * q.d[0].d[0], 0.5 * q.d[0].d[1], 0.5 * q.d[1].d[0], 0.5 * q.d[1].d[1];
  return 0.5 * (g + g.transpose());
}

double fiber_volume_form(const FinslerMetric& metric, int chart, const Vec2& x, double theta) {
  using D = Dual<double, 1>;
  const Vec2T<D> xs = {D(x(0)), D(x(1))};
  const Vec2T<D> y = indicatrix_point(metric, chart, xs, ad::variable<double, 1>(theta, 0));
  const D F = metric(chart, xs, y);
  const Vec2T<D> z = {y[0] / F, y[1] / F};
  const Mat2 g = fiber_metric(metric, chart, x, Vec2(y[0].v, y[1].v));
  // sqrt(det g) [ (y^1/F) d(y^2/F) - (y^2/F) d(y^1/F) ]
  const double s = z[0].v * z[1].d[0] - z[1].v * z[0].d[0];
  return std::sqrt(g.determinant()) * s;
}

double fiber_volume(const FinslerMetric& metric, int chart, const Vec2& x, int order) {
  return integrate([&](double t) { return fiber_volume_form(metric, chart, x, t); }, 0.0,
                   2.0 * std::numbers::pi, order, 4);
}

}  // namespace fgbc
