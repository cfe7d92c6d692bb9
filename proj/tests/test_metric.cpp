#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "fgbc/gauss.hpp"
#include "fgbc/manifolds.hpp"
#include "fgbc/metric.hpp"
#include "support.hpp"

using namespace fgbc;
using fgbc::testing::uniform;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(v.size());
  int i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

Eigen::VectorXd random_ray(int n) {
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = uniform();
  return y;
}

// Richardson-extrapolated central second difference of F^2 / 2.
Eigen::MatrixXd fd_hessian(const MinkowskiNorm& F, const Eigen::VectorXd& y, double h) {
  const int n = static_cast<int>(y.size());
  auto E = [&](const Eigen::VectorXd& p) { return 0.5 * F(p) * F(p); };
  auto hess = [&](double s) {
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd pp = y, pm = y, mp = y, mm = y;
        pp(i) += s, pp(j) += s;
        pm(i) += s, pm(j) -= s;
        mp(i) -= s, mp(j) += s;
        mm(i) -= s, mm(j) -= s;
        H(i, j) = (E(pp) - E(pm) - E(mp) + E(mm)) / (4 * s * s);
      }
    return H;
  };
  return (4.0 * hess(0.5 * h) - hess(h)) / 3.0;
}

// Third derivative of F^2 by central differences of the AD-free Hessian oracle.
double fd_cartan(const MinkowskiNorm& F, const Eigen::VectorXd& y, int i, int j, int k) {
  const double h = 1e-3;
  Eigen::VectorXd p = y, m = y;
  p(k) += h;
  m(k) -= h;
  const double d3 = (fd_hessian(F, p, 1e-3)(i, j) - fd_hessian(F, m, 1e-3)(i, j)) / (2 * h);
  // A = F/4 [F^2]_{ijk} = F/2 d_k (1/2 [F^2]_{ij}).
  return 0.5 * F(y) * d3;
}

}  // namespace

TEST(MinkowskiNorm, EuclideanAndRiemannianTensors) {
  const auto E = MinkowskiNorm::euclidean(3);
  EXPECT_LT((fundamental_tensor(E, vec({0.3, -1.0, 2.0})).g - Eigen::MatrixXd::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff(),
            1e-14);
  Eigen::MatrixXd G(2, 2);
  G << 2.0, 0.3, 0.3, 1.0;
  const auto R = MinkowskiNorm::riemannian(G);
  for (int s = 0; s < 20; ++s) {
    const auto y = random_ray(2);
    EXPECT_LT((fundamental_tensor(R, y).g - G).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT(cartan_tensor(R, y).max_abs(), 1e-12);
  }
}

TEST(MinkowskiNorm, RandersHessianMatchesFiniteDifferences) {
  Eigen::VectorXd b = vec({0.1, 0.0});
  const auto F = MinkowskiNorm::randers(Eigen::MatrixXd::Identity(2, 2), b);
  const auto y = vec({1.0, 0.0});
  EXPECT_LT((fundamental_tensor(F, y).g - fd_hessian(F, y, 1e-4)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(MinkowskiNorm, QuarticCartanMatchesFiniteDifferences) {
  const auto F = MinkowskiNorm::quartic(2, 0.0);
  // On the diagonal every third derivative of (y1^4 + y2^4)^{1/2} vanishes.
  const Eigen::VectorXd diag = vec({1.0, 1.0}) / std::pow(2.0, 0.25);
  EXPECT_LT(cartan_tensor(F, diag).max_abs(), 1e-12);
  const Eigen::VectorXd y = vec({1.0, 0.6});
  const CartanTensor A = cartan_tensor(F, y);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) EXPECT_NEAR(A(i, j, k), fd_cartan(F, y, i, j, k), 2e-5);
}

TEST(MinkowskiNorm, CartanSymmetryAndContraction) {
  Eigen::MatrixXd G(3, 3);
  G << 2, 0.1, 0, 0.1, 1, 0.2, 0, 0.2, 1.5;
  const std::vector<MinkowskiNorm> norms = {
      MinkowskiNorm::randers(G, vec({0.2, -0.1, 0.3})), MinkowskiNorm::quartic(3, 0.3),
      sum_norms(MinkowskiNorm::quartic(3, 0.1), MinkowskiNorm::riemannian(G))};
  for (const auto& F : norms)
    for (int s = 0; s < 20; ++s) {
      const auto y = random_ray(3);
      const auto A = cartan_tensor(F, y);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double c = 0.0;
          for (int k = 0; k < 3; ++k) {
            c += y(k) * A(k, i, j);
            EXPECT_NEAR(A(i, j, k), A(j, i, k), 1e-12);
            EXPECT_NEAR(A(i, j, k), A(k, j, i), 1e-12);
          }
          EXPECT_LT(std::abs(c), 1e-10);
        }
    }
}

TEST(MinkowskiNorm, HomogeneityLadder) {
  const auto F = MinkowskiNorm::randers(Eigen::MatrixXd::Identity(4, 4), vec({0.1, 0.2, -0.3, 0.05}));
  for (int s = 0; s < 100; ++s) {
    const auto y = random_ray(4);
    const double lam = uniform(0.1, 10.0);
    const Eigen::VectorXd ly = lam * y;
    EXPECT_NEAR(F(ly), lam * F(y), 1e-9 * lam * F(y));
    const auto g1 = fundamental_tensor(F, y).g, g2 = fundamental_tensor(F, ly).g;
    EXPECT_LT((g1 - g2).cwiseAbs().maxCoeff(), 1e-9 * g1.cwiseAbs().maxCoeff());
    EXPECT_LT(std::abs(cartan_tensor(F, y).max_abs() - cartan_tensor(F, ly).max_abs()), 1e-9);
  }
}

TEST(MinkowskiNorm, DomainAndValidityErrors) {
  const auto E = MinkowskiNorm::euclidean(2);
  try {
    (void)fundamental_tensor(E, vec({0.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
  EXPECT_THROW((void)MinkowskiNorm::randers(Eigen::MatrixXd::Identity(2, 2), vec({1.2, 0.0})), Error);
  // The pure quartic norm degenerates on the coordinate axes.
  try {
    (void)fundamental_tensor(MinkowskiNorm::quartic(2, 0.0), vec({1.0, 0.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidMetric);
  }
}

TEST(SumNorms, EuclideanPlusRandersIsPositiveDefinite) {
  const auto S = sum_norms(MinkowskiNorm::euclidean(2),
                           MinkowskiNorm::randers(Eigen::MatrixXd::Identity(2, 2), vec({0.3, 0.0})));
  for (int s = 0; s < 100; ++s) {
    const auto y = random_ray(2);
    const auto g = fundamental_tensor(S, y).g;
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff(), 0.0);
    EXPECT_NEAR(S(Eigen::VectorXd(3.0 * y)), 3.0 * S(y), 1e-12);
  }
  const auto twice = sum_norms(MinkowskiNorm::euclidean(2), MinkowskiNorm::euclidean(2));
  EXPECT_LT((fundamental_tensor(twice, vec({0.6, 0.8})).g - 4.0 * Eigen::MatrixXd::Identity(2, 2))
                .cwiseAbs()
                .maxCoeff(),
            1e-13);
}

TEST(SumNorms, DecompositionTermsAreNonnegative) {
  // g~(X, X) = (F~_y . X)^2 + F~ (F1_yy + F2_yy)(X, X); both Hessian terms
  // are positive semidefinite and vanish only along y.
  const auto F = MinkowskiNorm::quartic(2, 0.2);
  const auto S = sum_norms(F, F);
  for (int s = 0; s < 50; ++s) {
    const auto y = random_ray(2);
    const auto g = fundamental_tensor(F, y).g;
    const Eigen::VectorXd Fy = g * y / F(y);
    const Eigen::MatrixXd Fyy = (g - Fy * Fy.transpose()) / F(y);
    const Eigen::VectorXd X = random_ray(2);
    const double star1 = std::pow(2.0 * Fy.dot(X), 2);
    const double star2 = S(y) * 2.0 * X.dot(Fyy * X);
    EXPECT_GE(star1, 0.0);
    EXPECT_GE(star2, -1e-12);
    EXPECT_NEAR(X.dot(fundamental_tensor(S, y).g * X), star1 + star2, 1e-11);
    // F + F = 2F, whose fundamental tensor is 4 g.
    EXPECT_LT((fundamental_tensor(S, y).g - 4.0 * g).cwiseAbs().maxCoeff(), 1e-11);
  }
}

TEST(Frame, OrthonormalWithLastVectorL) {
  const auto E = MinkowskiNorm::euclidean(2);
  const auto fr = orthonormal_frame(E, vec({0.0, 1.0}));
  EXPECT_NEAR(fr.B(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(fr.B(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(fr.B(0, 0)), 1.0, 1e-15);
  EXPECT_GT(fr.B.determinant(), 0.0);

  Eigen::MatrixXd G(3, 3);
  G << 2, 0.1, 0, 0.1, 1, 0.2, 0, 0.2, 1.5;
  const auto F = MinkowskiNorm::randers(G, vec({0.2, -0.1, 0.3}));
  for (int s = 0; s < 30; ++s) {
    const auto y = random_ray(3);
    const auto g = fundamental_tensor(F, y).g;
    const auto f = orthonormal_frame(F, y);
    EXPECT_LT((f.B * g * f.B.transpose() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((f.B.row(2).transpose() - y / F(y)).norm(), 1e-14);
    EXPECT_NEAR(f.B_inv.determinant(), std::sqrt(g.determinant()), 1e-10);
    EXPECT_GT(f.B.determinant(), 0.0);
  }
}

// ---------------------------------------------------------------------------
// Surface metrics

TEST(Indicatrix, EuclideanAndAxisValues) {
  const Atlas T = Atlas::torus();
  const auto flat = install_metric(T, "flat_torus");
  const auto y = indicatrix_param(flat, 0, Vec2(1.0, 2.0));
  for (double th : {0.0, 0.7, 2.0, 5.5}) EXPECT_NEAR(y(th).norm(), 1.0, 1e-15);
  const auto diag = install_metric(T, "riemannian(4,0,1)");
  EXPECT_NEAR(indicatrix_param(diag, 0, Vec2(0.0, 0.0))(0.0).norm(), 0.5, 1e-15);
}

TEST(Indicatrix, RandersMatchesBisection) {
  const Atlas S = Atlas::sphere();
  const auto m = install_metric(S, "randers(0.1)");
  const Vec2 x(0.3, -0.4);
  const auto y = indicatrix_param(m, 0, x);
  for (int s = 0; s < 20; ++s) {
    const double th = uniform(0.0, kTwoPi);
    const Vec2 u(std::cos(th), std::sin(th));
    double lo = 0.0, hi = 10.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (m(0, x, Vec2(mid * u)) < 1.0 ? lo : hi) = mid;
    }
    EXPECT_NEAR(y(th).norm(), 0.5 * (lo + hi), 1e-10);
    EXPECT_NEAR(m(0, x, y(th)), 1.0, 1e-12);
  }
}

TEST(FiberVolume, RiemannianIsTwoPi) {
  const Atlas S = Atlas::sphere(), T = Atlas::torus();
  EXPECT_NEAR(fiber_volume(install_metric(T, "euclidean"), 0, Vec2(0.1, 0.2)), kTwoPi, 1e-12);
  EXPECT_NEAR(fiber_volume_form(install_metric(T, "euclidean"), 0, Vec2(0.1, 0.2), 0.4), 1.0, 1e-12);
  EXPECT_NEAR(fiber_volume(install_metric(T, "riemannian(2,0.5,1)"), 0, Vec2(0.1, 0.2)), kTwoPi, 1e-12);
  EXPECT_NEAR(fiber_volume(install_metric(S, "round_sphere"), 1, Vec2(0.5, -0.2)), kTwoPi, 1e-12);
}

TEST(FiberVolume, RandersMatchesInducedArcLength) {
  // Oracle: length of the indicatrix curve measured with g(x, y(theta)) itself.
  const Atlas S = Atlas::sphere();
  const auto m = install_metric(S, "randers(0.1)");
  const Vec2 x(0.6, 0.2);
  const auto y = indicatrix_param(m, 0, x);
  const double arc = integrate(
      [&](double th) {
        const double h = 1e-5;
        const Vec2 dy = (y(th + h) - y(th - h)) / (2 * h);
        const Mat2 g = fundamental_tensor(m, 0, x, y(th)).g;
        return std::sqrt(dy.dot(g * dy));
      },
      0.0, kTwoPi, 32, 8);
  EXPECT_NEAR(fiber_volume(m, 0, x), arc, 1e-8);
  EXPECT_GT(std::abs(fiber_volume(m, 0, x) - kTwoPi), 1e-4);
}

TEST(SurfaceMetric, JetAgreesWithMinkowskiKernels) {
  const Atlas T = Atlas::torus();
  const auto m = install_metric(T, "quartic(0.3)");
  const auto F = MinkowskiNorm::quartic(2, 0.3);
  const Vec2 y(0.3, -0.8);
  const auto jet = metric_jet(m, 0, Vec2(1.0, 2.0), y);
  EXPECT_NEAR(jet.F, F(Eigen::VectorXd(y)), 1e-15);
  EXPECT_LT((jet.g - fundamental_tensor(F, y).g).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(jet.dg_dx[0].cwiseAbs().maxCoeff(), 1e-15);
}
