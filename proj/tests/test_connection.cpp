#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fgbc/connection.hpp"
#include "fgbc/manifolds.hpp"
#include "fgbc/sphere_bundle.hpp"
#include "support.hpp"

using namespace fgbc;
using fgbc::testing::uniform;

namespace {

// Christoffel symbols of the conformal metric lam^2 delta, lam = 2 / (1 + |x|^2):
// Gamma^i_{jk} = delta_ij d_k s + delta_ik d_j s - delta_jk d_i s, s = log lam.
double christoffel(const Vec2& x, int i, int j, int k) {
  const Vec2 ds = -2.0 * x / (1.0 + x.squaredNorm());
  auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
  return d(i, j) * ds(k) + d(i, k) * ds(j) - d(j, k) * ds(i);
}

Vec3 random_xi() {
  return Vec3(uniform(-0.9, 0.9), uniform(-0.9, 0.9), uniform(0.0, 2.0 * std::numbers::pi));
}

}  // namespace

TEST(Spray, FlatTorusVanishes) {
  const auto m = install_metric(Atlas::torus(), "flat_torus");
  EXPECT_EQ(spray_connection(m, 0, Vec2(1.0, 2.0), Vec2(0.3, 0.4)).N.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Spray, RoundSphereMatchesChristoffelContraction) {
  const auto m = install_metric(Atlas::sphere(), "round_sphere");
  for (int s = 0; s < 20; ++s) {
    const Vec2 x(uniform(), uniform()), y(uniform(), uniform());
    const Mat2 N = spray_connection(m, s % 2, x, y).N;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double c = 0.0;
        for (int k = 0; k < 2; ++k) c += christoffel(x, i, j, k) * y(k);
        EXPECT_NEAR(N(i, j), c, 1e-8);
      }
  }
}

TEST(Spray, OneHomogeneous) {
  const auto m = install_metric(Atlas::sphere(), "randers(0.3)");
  const Vec2 x(0.2, 0.5), y(0.7, -0.1);
  EXPECT_LT((spray_connection(m, 0, x, 2.0 * y).N - 2.0 * spray_connection(m, 0, x, y).N)
                .cwiseAbs()
                .maxCoeff(),
            1e-10);
}

TEST(ChernHorizontal, RiemannianIsLeviCivita) {
  const auto m = install_metric(Atlas::sphere(), "round_sphere");
  const Vec2 x(0.4, -0.3);
  for (const Vec2& y : {Vec2(1.0, 0.0), Vec2(0.3, 0.9)}) {
    const auto N = spray_connection(m, 0, x, y);
    const auto D = chern_horizontal(m, N, 0, x, y);
    for (int A = 0; A < 2; ++A)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(D.gamma[A](i, j), christoffel(x, j, i, A), 1e-9);
  }
  const auto flat = install_metric(Atlas::torus(), "flat_torus");
  const auto D = chern_horizontal(flat, spray_connection(flat, 0, Vec2(1, 1), Vec2(1, 0)), 0,
                                  Vec2(1, 1), Vec2(1, 0));
  EXPECT_EQ(D.gamma[0].cwiseAbs().maxCoeff() + D.gamma[1].cwiseAbs().maxCoeff(), 0.0);
}

TEST(ChernHorizontal, RandersPartialCompatibility) {
  const auto m = install_metric(Atlas::sphere(), "randers(0.1)");
  for (int s = 0; s < 50; ++s) {
    const Vec2 x(uniform(), uniform()), y(uniform(), uniform());
    const auto jet = metric_jet(m, 1, x, y);
    const auto N = spray_connection(jet, y);
    EXPECT_LT(partial_compatibility_residual(chern_horizontal(jet, N), jet, N), 1e-8);
  }
}

TEST(Modify, RiemannianHasNoVerticalPart) {
  const auto m = install_metric(Atlas::sphere(), "round_sphere");
  const Vec2 x(0.1, 0.2), y(0.3, 0.4);
  auto A = cartan_tensor(m, 0, x, y);
  const auto jet = metric_jet(m, 0, x, y);
  A.raise(jet.g.inverse());
  const auto D = modify(chern_horizontal(jet, spray_connection(jet, y)), A);
  EXPECT_LT(D.rho[0].cwiseAbs().maxCoeff() + D.rho[1].cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Modify, IdempotentOnHorizontalPart) {
  const auto m = install_metric(Atlas::torus(), "randers(0.3)");
  const Vec2 x(0.1, 0.2), y(0.3, 0.4);
  auto A = cartan_tensor(m, 0, x, y);
  const auto jet = metric_jet(m, 0, x, y);
  A.raise(jet.g.inverse());
  const auto D = chern_horizontal(jet, spray_connection(jet, y));
  const auto once = modify(D, A), twice = modify(once, A);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(once.gamma[k], D.gamma[k]);
    EXPECT_EQ(twice.gamma[k], once.gamma[k]);
    EXPECT_EQ(twice.rho[k], once.rho[k]);
  }
}

TEST(Modify, BothDirectionsOfCompatibility) {
  // The modification of a partially compatible connection is compatible; the
  // Chern horizontal part alone (rho = 0) is not for a non-Riemannian metric.
  const Atlas S = Atlas::sphere();
  const auto metric = install_metric(S, "randers(0.1)");
  ConnectionSpec bare;
  bare.vertical_factor = 0.0;
  const SphereBundle modified(S, metric), unmodified(S, metric, bare);
  double good = 0.0, bad = 0.0;
  for (int s = 0; s < 50; ++s) {
    const Vec3 xi = random_xi();
    const auto G = modified.geometry(s % 2, xi);
    good = std::max(good, metric_compatibility_residual(G.theta_nabla, G.jet.g, G.dg));
    const auto U = unmodified.geometry(s % 2, xi);
    bad = std::max(bad, metric_compatibility_residual(U.theta_nabla, U.jet.g, U.dg));
  }
  EXPECT_LT(good, 1e-8);
  EXPECT_GT(bad, 1e-3);
}

TEST(Frames, FlatIdentityFrameHasZeroForms) {
  ConnectionForm theta{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  const auto varpi = to_orthonormal_frame(theta, Mat2::Identity(), {Mat2::Zero(), Mat2::Zero(), Mat2::Zero()});
  for (const auto& w : varpi) EXPECT_EQ(w.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Frames, RoundTripAndSkewness) {
  const Atlas S = Atlas::sphere();
  const SphereBundle b(S, install_metric(S, "randers(0.2)"));
  for (int s = 0; s < 20; ++s) {
    const auto G = b.geometry(0, random_xi());
    EXPECT_LT(skew_residual(G.varpi_nabla), 1e-12);
    EXPECT_LT(skew_residual(G.varpi_D), 1e-12);
    const auto back = to_natural_frame(G.varpi_nabla, G.B, G.dB);
    for (int a = 0; a < 3; ++a) EXPECT_LT((back[a] - G.theta_nabla[a]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Frames, FiberRestrictionReproducesDl) {
  // On the fibre varpi_2^k(d/dtheta) B_k^i = d/dtheta (y^i / F).
  const Atlas S = Atlas::sphere();
  const SphereBundle b(S, install_metric(S, "randers(0.1)"));
  for (int s = 0; s < 20; ++s) {
    const auto G = b.geometry(1, random_xi());
    const Eigen::RowVector2d lhs = G.varpi_nabla[2].row(1) * G.B;
    EXPECT_LT((lhs.transpose() - G.dy.col(2)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Curvature, FlatTorusVanishes) {
  const Atlas T = Atlas::torus();
  const SphereBundle b(T, install_metric(T, "flat_torus"));
  const ConnectionFormField field = [&](int c, const Vec3& p) { return b.connection_forms(c, p).second; };
  const auto O = curvature(field, 0, Vec3(1.0, 2.0, 0.3));
  for (const auto& m : O) EXPECT_LT(m.cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Curvature, AntisymmetricAndBianchi) {
  const Atlas S = Atlas::sphere();
  ConnectionSpec pert;
  pert.type = "perturbed";
  const SphereBundle b(S, install_metric(S, "randers(0.1)"), pert);
  for (int s = 0; s < 5; ++s) {
    const Vec3 xi = random_xi();
    for (double t : {0.0, 0.5, 1.0}) {
      const ConnectionFormField f = [&](int c, const Vec3& p) {
        const auto w = b.connection_forms(c, p);
        return connection_family(w.first, w.second, t);
      };
      for (const auto& m : curvature(f, 0, xi)) EXPECT_LT(std::abs(m(0, 1) + m(1, 0)), 1e-8);
      EXPECT_LT(bianchi_residual(f, 0, xi), 1e-6);
    }
  }
}

TEST(Perturbation, ZeroAndSkewAndNonSkew) {
  const ConnectionForm w{Mat2::Zero(), Mat2::Random(), Mat2::Zero()};
  const ConnectionForm zero{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  const auto same = perturb_metric_compatible(w, zero);
  for (int a = 0; a < 3; ++a) EXPECT_EQ(same[a], w[a]);

  ConnectionForm bad = zero;
  bad[0](0, 1) = 0.2;
  try {
    (void)perturb_metric_compatible(w, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Validation);
  }

  const Atlas S = Atlas::sphere();
  ConnectionSpec pert;
  pert.type = "perturbed";
  pert.amplitude = 0.2;
  const SphereBundle b(S, install_metric(S, "randers(0.1)"), pert);
  for (int s = 0; s < 20; ++s) {
    const auto G = b.geometry(s % 2, random_xi());
    EXPECT_LT(skew_residual(G.varpi_D), 1e-10);
    EXPECT_LT(metric_compatibility_residual(G.theta_D, G.jet.g, G.dg), 1e-10);
  }
}

TEST(Family, EndpointsAndConstantDerivative) {
  ConnectionForm D, N;
  for (int a = 0; a < 3; ++a) {
    D[a] = Mat2::Random();
    N[a] = Mat2::Random();
  }
  const auto d0 = connection_family(D, N, 0.0), d1 = connection_family(D, N, 1.0);
  for (int a = 0; a < 3; ++a) {
    EXPECT_EQ(d0[a], D[a]);
    EXPECT_LT((d1[a] - N[a]).cwiseAbs().maxCoeff(), 1e-15);
  }
  for (double s : {0.1, 0.5, 0.9}) {
    const auto lo = connection_family(D, N, s - 0.05), hi = connection_family(D, N, s + 0.05);
    for (int a = 0; a < 3; ++a)
      EXPECT_LT(((hi[a] - lo[a]) / 0.1 - (N[a] - D[a])).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Ehresmann, ExplicitTableIsLinear) {
  std::array<double, 8> t{1, 2, 3, 4, 5, 6, 7, 8};
  const Vec2 y(0.5, -1.0);
  const Mat2 N = explicit_connection(t, y).N;
  for (int j = 0; j < 2; ++j)
    for (int A = 0; A < 2; ++A)
      EXPECT_DOUBLE_EQ(N(j, A), t[(j * 2 + A) * 2] * y(0) + t[(j * 2 + A) * 2 + 1] * y(1));
}
