#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fgbc/gauss.hpp"
#include "fgbc/quadrature.hpp"
#include "support.hpp"

using namespace fgbc;
using fgbc::testing::uniform;

namespace {

constexpr double kPi = std::numbers::pi;

PointwiseForm form3() { return PointwiseForm(3); }

PointwiseForm random_mixed() {
  PointwiseForm f(3);
  for (int k = 0; k <= 3; ++k) f += fgbc::testing::random_form(3, k);
  return f;
}

double round_area_density(int, const Vec2& x) {
  const double s = 1.0 + x.squaredNorm();
  return 4.0 / (s * s);
}

}  // namespace

TEST(Gauss, ExactOnPolynomials) {
  for (int n : {2, 5, 16, 48}) {
    const auto& rule = gauss_legendre(n);
    ASSERT_EQ(rule.nodes.size(), static_cast<std::size_t>(n));
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    EXPECT_NEAR(wsum, 2.0, 1e-14);
    const int k = 2 * n - 1;
    EXPECT_NEAR(integrate([&](double x) { return std::pow(x, k - 1); }, 0.0, 1.0, n), 1.0 / k, 1e-14);
  }
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, kPi, 12, 8), 2.0, 1e-14);
}

TEST(Gauss, PairwiseSum) {
  std::vector<double> v(1000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
  EXPECT_EQ(pairwise_sum(nullptr, 0), 0.0);
}

TEST(ExteriorDerivative, CoordinateForms) {
  // d(x1 dx2) = dx1 ^ dx2, d(theta dx1) = -dx1 ^ dtheta.
  const FormField a = [](int, const Vec3& xi) {
    auto f = form3();
    f[2] = xi(0);
    f[1] = xi(2);
    return f;
  };
  const auto da = exterior_derivative(a, 0, Vec3(0.3, -0.2, 1.0));
  EXPECT_NEAR(da[3], 1.0, 1e-10);
  EXPECT_NEAR(da[5], -1.0, 1e-10);
  EXPECT_NEAR(da[6], 0.0, 1e-10);
}

TEST(ExteriorDerivative, SquareVanishes) {
  const FormField g = [](int, const Vec3& xi) {
    auto f = form3();
    f[0] = std::sin(xi(0)) * std::cos(xi(2)) + xi(1) * xi(1) * xi(0);
    return f;
  };
  const FormField dg = exterior_derivative(g, 1e-3);
  const FormField ddg = exterior_derivative(dg, 1e-3);
  for (int k = 0; k < 10; ++k) {
    const Vec3 xi(uniform(-1, 1), uniform(-1, 1), uniform(0, 2 * kPi));
    EXPECT_LT(ddg(0, xi).max_abs(), 1e-7);
  }
}

TEST(ExteriorDerivative, MatchesAnalyticOnRandomFunctions) {
  for (int trial = 0; trial < 50; ++trial) {
    const double a = uniform(-2, 2), b = uniform(-2, 2), c = uniform(-2, 2), d = uniform(-3, 3),
                 p = uniform(0, 1);
    const FormField f = [=](int, const Vec3& xi) {
      auto r = form3();
      r[0] = a * std::sin(b * xi(0) + c * xi(1) + d * xi(2) + p);
      return r;
    };
    const Vec3 xi(uniform(-1, 1), uniform(-1, 1), uniform(0, 2 * kPi));
    const double cs = a * std::cos(b * xi(0) + c * xi(1) + d * xi(2) + p);
    const auto df = exterior_derivative(f, 0, xi);
    const double exact[3] = {b * cs, c * cs, d * cs};
    const Mask masks[3] = {1, 2, 4};
    const double scale = std::abs(a) * std::max({std::abs(b), std::abs(c), std::abs(d), 1.0});
    for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(df[masks[i]] - exact[i]) / scale, 1e-6);
  }
}

TEST(ExteriorDerivative, FromPartials) {
  // f = x1 dx2 with partials d_1 f = dx2, d_2 f = 0, d_theta f = 0.
  std::vector<PointwiseForm> partials(3, form3());
  partials[0][2] = 1.0;
  const auto d = exterior_derivative(partials);
  EXPECT_EQ(d[3], 1.0);
  EXPECT_EQ(d.degree_part(2).max_abs(), 1.0);
}

TEST(Pullback, SectionOracle) {
  const Vec2 dth(0.7, -1.3);
  auto dtheta = form3();
  dtheta[4] = 1.0;
  const auto p = pullback_by_section(dtheta, dth);
  ASSERT_EQ(p.dim(), 2);
  EXPECT_EQ(p[1], 0.7);
  EXPECT_EQ(p[2], -1.3);
  EXPECT_EQ(pullback_by_section(dtheta, Vec2::Zero()).max_abs(), 0.0);

  auto area = form3();
  area[3] = 2.5;
  EXPECT_EQ(pullback_by_section(area, dth)[3], 2.5);

  auto f5 = form3(), f6 = form3();
  f5[5] = 1.0;
  f6[6] = 1.0;
  EXPECT_NEAR(pullback_by_section(f5, dth)[3], dth(1), 1e-15);
  EXPECT_NEAR(pullback_by_section(f6, dth)[3], -dth(0), 1e-15);
}

TEST(Pullback, RespectsWedge) {
  for (int k = 0; k < 50; ++k) {
    const auto a = random_mixed(), b = random_mixed();
    const Vec2 dth(uniform(-2, 2), uniform(-2, 2));
    const auto lhs = pullback_by_section(wedge(a, b), dth);
    const auto rhs = wedge(pullback_by_section(a, dth), pullback_by_section(b, dth));
    EXPECT_LT((lhs - rhs).max_abs(), 1e-12);
  }
}

TEST(Pullback, CommutesWithExteriorDerivative) {
  // Chain rule: d(s* f) = s* (d f) for f = sin(x1 + theta) x2 and theta(x) = x1 x2.
  const auto fn = [](double x1, double x2, double th) { return std::sin(x1 + th) * x2; };
  const Vec2 x(0.4, -0.6);
  const double th = x(0) * x(1);
  const Vec2 dth(x(1), x(0));
  const FormField f = [&](int, const Vec3& xi) {
    auto r = form3();
    r[0] = fn(xi(0), xi(1), xi(2));
    return r;
  };
  const auto df = pullback_by_section(exterior_derivative(f, 0, Vec3(x(0), x(1), th)), dth);
  const double h = 1e-5;
  const auto s = [&](double a, double b) { return fn(a, b, a * b); };
  EXPECT_NEAR(df[1], (s(x(0) + h, x(1)) - s(x(0) - h, x(1))) / (2 * h), 1e-8);
  EXPECT_NEAR(df[2], (s(x(0), x(1) + h) - s(x(0), x(1) - h)) / (2 * h), 1e-8);
}

TEST(BaseIntegral, SphereArea) {
  const Atlas S = Atlas::sphere();
  EXPECT_NEAR(base_integral_excised(round_area_density, {&S, {}}), 4 * kPi, 1e-10);
  for (double r : {0.3, 0.1, 0.01}) {
    const ExcisedDomain dom{&S, {ExcisedDisk{0, Vec2::Zero(), r}, ExcisedDisk{1, Vec2::Zero(), r}}};
    const double cap = 4 * kPi * r * r / (1 + r * r);
    EXPECT_NEAR(base_integral_excised(round_area_density, dom), 4 * kPi - 2 * cap, 1e-10) << r;
  }
}

TEST(BaseIntegral, OffCentreDisk) {
  const Atlas T = Atlas::torus();
  const BaseDensity one = [](int, const Vec2&) { return 1.0; };
  const ExcisedDomain dom{&T, {ExcisedDisk{0, Vec2(1.0, 2.5), 0.2}}};
  // The bump partition converges spectrally but is the weakest part of the rule.
  EXPECT_NEAR(base_integral_excised(one, dom), 4 * kPi * kPi - kPi * 0.04, 5e-6);
  EXPECT_NEAR(base_integral_excised(one, dom, {96, 0}), 4 * kPi * kPi - kPi * 0.04, 1e-8);

  const Atlas S = Atlas::sphere();
  const BaseDensity flat = [](int, const Vec2&) { return 1.0; };
  const ExcisedDomain sd{&S, {ExcisedDisk{0, Vec2(0.5, 0.3), 0.1}}};
  EXPECT_NEAR(base_integral_excised(flat, sd), 2 * kPi - kPi * 0.01, 5e-6);
  EXPECT_NEAR(base_integral_excised(flat, sd, {96, 0}), 2 * kPi - kPi * 0.01, 1e-8);
}

TEST(BaseIntegral, StokesOnTheSphere) {
  // omega = Z dX restricted to the sphere, d omega = dZ ^ dX.
  const Atlas S = Atlas::sphere();
  const BaseOneForm omega = [&](int c, const Vec2& x) -> Vec2 {
    const auto J = S.embed_jacobian(c, x);
    return S.embed(c, x)(2) * J.row(0).transpose();
  };
  const BaseDensity domega = [&](int c, const Vec2& x) {
    const auto J = S.embed_jacobian(c, x);
    return J(2, 0) * J(0, 1) - J(2, 1) * J(0, 0);
  };
  const std::vector<ExcisedDisk> disks = {{0, Vec2::Zero(), 0.2}, {1, Vec2(0.5, -0.3), 0.1}};
  const double lhs = base_integral_excised(domega, {&S, disks});
  double rhs = 0.0;
  for (const auto& d : disks) rhs -= boundary_circle_integral(omega, d.chart, d.center, d.radius);
  EXPECT_NEAR(lhs, rhs, 5e-6);
  EXPECT_NEAR(base_integral_excised(domega, {&S, disks}, {96, 0}), rhs, 1e-8);
  EXPECT_NEAR(base_integral_excised(domega, {&S, {}}), 0.0, 1e-10);
}

TEST(BaseIntegral, StokesOnTheTorus) {
  const Atlas T = Atlas::torus();
  // omega = sin(x1) cos(x2) dx2 is periodic; d omega = cos(x1) cos(x2) dx1 ^ dx2.
  const BaseOneForm omega = [](int, const Vec2& x) -> Vec2 {
    return Vec2(0.0, std::sin(x(0)) * std::cos(x(1)));
  };
  const BaseDensity domega = [](int, const Vec2& x) { return std::cos(x(0)) * std::cos(x(1)); };
  const ExcisedDisk d{0, Vec2(2.0, 4.0), 0.2};
  EXPECT_NEAR(base_integral_excised(domega, {&T, {d}}),
              -boundary_circle_integral(omega, 0, d.center, d.radius), 5e-6);
  EXPECT_NEAR(base_integral_excised(domega, {&T, {d}}, {96, 0}),
              -boundary_circle_integral(omega, 0, d.center, d.radius), 1e-8);
}

TEST(BoundaryIntegral, AngularFormAndExactForms) {
  const BaseOneForm angular = [](int, const Vec2& x) -> Vec2 {
    return Vec2(-x(1), x(0)) / (2 * kPi * x.squaredNorm());
  };
  EXPECT_NEAR(boundary_circle_integral(angular, 0, Vec2::Zero(), 0.5), 1.0, 1e-13);
  EXPECT_NEAR(boundary_circle_integral(angular, 0, Vec2(0.1, 0.05), 0.3, 256), 1.0, 1e-10);
  EXPECT_NEAR(boundary_circle_integral(angular, 0, Vec2(2.0, 0.0), 0.5), 0.0, 1e-13);
  const BaseOneForm exact = [](int, const Vec2& x) -> Vec2 {
    return Vec2(std::cos(x(0)) * x(1), std::sin(x(0)));
  };
  EXPECT_NEAR(boundary_circle_integral(exact, 0, Vec2(0.2, 0.3), 0.7), 0.0, 1e-13);
  const BaseOneForm area = [](int, const Vec2& x) -> Vec2 { return 0.5 * Vec2(-x(1), x(0)); };
  EXPECT_NEAR(boundary_circle_integral(area, 0, Vec2(1.0, 1.0), 0.4), kPi * 0.16, 1e-13);
}

TEST(FiberIntegral, TrigonometricPolynomials) {
  EXPECT_NEAR(fiber_integral([](double t) { return std::cos(t) * std::cos(t); }), kPi, 1e-13);
  EXPECT_NEAR(fiber_integral([](double t) { return std::sin(3 * t) + 1.0; }), 2 * kPi, 1e-13);
}

TEST(Extrapolation, ExactOnPolynomials) {
  const std::vector<double> h = {0.2, 0.1, 0.05};
  std::vector<double> v;
  for (double x : h) v.push_back(1.5 - 2 * x + 3 * x * x);
  const auto e = extrapolate_to_zero(h, v);
  EXPECT_NEAR(e.value, 1.5, 1e-13);
  const auto one = extrapolate_to_zero({0.1}, {4.0});
  EXPECT_EQ(one.value, 4.0);
  EXPECT_THROW((void)extrapolate_to_zero({0.1, 0.2}, {1.0}), Error);
}

TEST(ParallelMap, OrderingAndExceptions) {
  for (int threads : {1, 2, 5}) {
    const auto r = parallel_map(37, [](std::size_t i) { return static_cast<double>(i * i); }, threads);
    ASSERT_EQ(r.size(), 37u);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_EQ(r[i], static_cast<double>(i * i));
    EXPECT_THROW((void)parallel_map(
                     10,
                     [](std::size_t i) -> double {
                       if (i == 7) throw std::runtime_error("boom");
                       return 0.0;
                     },
                     threads),
                 std::runtime_error);
  }
}

TEST(BaseIntegral, ThreadCountDoesNotChangeBits) {
  const Atlas S = Atlas::sphere();
  const ExcisedDomain dom{&S, {ExcisedDisk{0, Vec2(0.4, 0.3), 0.1}, ExcisedDisk{1, Vec2::Zero(), 0.05}}};
  const BaseDensity f = [](int c, const Vec2& x) { return std::sin(3 * x(0) + c) * std::exp(x(1)); };
  const double a = base_integral_excised(f, dom, {32, 1});
  const double b = base_integral_excised(f, dom, {32, 3});
  EXPECT_EQ(a, b);
}
