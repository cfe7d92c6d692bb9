#include "fgbc/sphere_bundle.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>

namespace fgbc {

namespace {

using D3 = ad::Dual<double, 3>;
using ad::variable;

SkewMatrixValuedForm zero_curvature(int n) { return SkewMatrixValuedForm(n, 3); }

PointwiseForm upsilon0_of(const ConnectionForm& delta) {
  return chern_weil_upsilon0(as_skew_one_form(delta), [](double) { return zero_curvature(2); });
}

ConnectionForm difference(const ConnectionForm& a, const ConnectionForm& b) {
  ConnectionForm r;
  for (int i = 0; i < 3; ++i) r[i] = a[i] - b[i];
  return r;
}

// Global functions (f1, f2) on SM for the perturbation f1 df2, built from the
// embedded point P and the embedded unit vector L = dP(y), so that the
// perturbation is chart independent.
template <typename S>
std::array<S, 2> perturbation_profile(const Atlas& atlas, const FinslerMetric& metric, int chart,
                                      const Vec2T<S>& x, const S& theta, bool exact) {
  using O = ad::Dual<S, 2>;
  using std::cos;
  using std::sin;
  const Vec2T<O> xo = {O(x[0]), O(x[1])};
  Vec2T<O> xs = xo;
  xs[0].d[0] = S(1.0);
  xs[1].d[1] = S(1.0);
  const auto P = atlas.embed<O>(chart, xs);
  const Vec2T<S> y = indicatrix_point(metric, chart, x, theta);
  std::array<S, 3> p, L;
  for (int i = 0; i < 3; ++i) {
    p[i] = P[i].v;
    L[i] = P[i].d[0] * y[0] + P[i].d[1] * y[1];
  }
  const S f2 = sin(p[0] + 2.0 * p[1] - p[2]) + L[0] * L[2] - 0.5 * L[1];
  if (exact) return {S(1.0), f2};
  const S f1 = cos(2.0 * p[0] - p[2]) + 0.5 * L[1] + p[1] * L[0];
  return {f1, f2};
}

}  // namespace

SphereBundle::SphereBundle(const Atlas& atlas, FinslerMetric metric, ConnectionSpec connection,
                           EhresmannSpec ehresmann, BundleOptions options)
    : atlas_(atlas),
      metric_(std::move(metric)),
      connection_(std::move(connection)),
      ehresmann_(std::move(ehresmann)),
      options_(options) {
  const auto& t = connection_.type;
  if (t != "cartan" && t != "chern_modified" && t != "perturbed")
    throw Error(ErrorKind::Validation, fmt::format("unknown connection type '{}'", t));
  if (t == "perturbed" && connection_.profile != "sinusoidal" && connection_.profile != "exact")
    throw Error(ErrorKind::Validation,
                fmt::format("unknown perturbation profile '{}'", connection_.profile));
  if (ehresmann_.type != "spray" && ehresmann_.type != "explicit")
    throw Error(ErrorKind::Validation, fmt::format("unknown Ehresmann type '{}'", ehresmann_.type));
  if (metric_.surface() != atlas_.kind())
    throw Error(ErrorKind::Structural, "metric and atlas describe different surfaces");
}

ConnectionForm SphereBundle::perturbation(int chart, const Vec3& xi, const Vec2&) const {
  ConnectionForm r{Mat2::Zero(), Mat2::Zero(), Mat2::Zero()};
  if (connection_.type != "perturbed" || connection_.amplitude == 0.0) return r;
  const Vec2T<D3> x = {variable<double, 3>(xi(0), 0), variable<double, 3>(xi(1), 1)};
  const auto f = perturbation_profile(atlas_, metric_, chart, x, variable<double, 3>(xi(2), 2),
                                      connection_.profile == "exact");
  for (int a = 0; a < 3; ++a) {
    const double c = connection_.amplitude * f[0].v * f[1].d[a];
    r[a](0, 1) = c;
    r[a](1, 0) = -c;
  }
  return r;
}

BundleGeometry SphereBundle::geometry(int chart, const Vec3& xi) const {
  BundleGeometry G;
  const Vec2 x(xi(0), xi(1));
  const Vec2T<D3> xs = {variable<double, 3>(xi(0), 0), variable<double, 3>(xi(1), 1)};
  const Vec2T<D3> y3 = indicatrix_point(metric_, chart, xs, variable<double, 3>(xi(2), 2));
  for (int k = 0; k < 2; ++k) {
    G.y(k) = y3[k].v;
    for (int a = 0; a < 3; ++a) G.dy(k, a) = y3[k].d[a];
  }
  G.jet = metric_jet(metric_, chart, x, G.y);
  G.N = ehresmann_.type == "spray" ? spray_connection(G.jet, G.y)
                                   : explicit_connection(ehresmann_.table, G.y);

  const Mat2 gi = G.jet.g.inverse();
  CartanTensor A(2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) A(i, j, k) = 0.5 * G.jet.F * G.jet.dg_dy[k](i, j);
  A.raise(gi);

  // Frame along xi: g(x, y(xi)) carried as a first-order dual.
  Mat2T<D3> gd;
  for (int a = 0; a < 3; ++a) {
    G.dg[a] = a < 2 ? G.jet.dg_dx[a] : Mat2::Zero();
    for (int k = 0; k < 2; ++k) G.dg[a] += G.dy(k, a) * G.jet.dg_dy[k];
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      gd[i][j] = D3(G.jet.g(i, j));
      for (int a = 0; a < 3; ++a) gd[i][j].d[a] = G.dg[a](i, j);
    }
  const Mat2T<D3> Bd = orthonormal_frame_2<D3>(gd, y3, D3(1.0));
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      G.B(i, k) = Bd[i][k].v;
      for (int a = 0; a < 3; ++a) G.dB[a](i, k) = Bd[i][k].d[a];
    }

  const ConnectionData chern = chern_horizontal(G.jet, G.N);
  ConnectionData D;
  if (connection_.type == "chern_modified") {
    D = modify(chern, A, 1.0);
  } else {
    D = chern;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) D.rho[k](i, j) = A.raised(j, i, k);
  }
  G.theta_D = pullback_to_sphere_bundle(D, G.N, G.dy);
  G.varpi_D = to_orthonormal_frame(G.theta_D, G.B, G.dB);

  ConnectionData nabla_src = D;
  if (connection_.type == "perturbed") {
    G.varpi_D = perturb_metric_compatible(G.varpi_D, perturbation(chart, xi, G.y), 1e-12);
    G.theta_D = to_natural_frame(G.varpi_D, G.B, G.dB);
    // Horizontal part of the perturbed D: theta^D on the horizontal lift
    // h_A = d/dx^A + c_A d/dtheta, on which delta y has no angular part.
    const double cross_theta = G.y(0) * G.dy(1, 2) - G.y(1) * G.dy(0, 2);
    for (int A_ = 0; A_ < 2; ++A_) {
      const Vec2 v = G.dy.col(A_) + G.N.N.col(A_);
      const double c = -(G.y(0) * v(1) - G.y(1) * v(0)) / cross_theta;
      nabla_src.gamma[A_] = G.theta_D[A_] + c * G.theta_D[2];
    }
  }
  const ConnectionData nabla = modify(nabla_src, A, connection_.vertical_factor);
  G.theta_nabla = pullback_to_sphere_bundle(nabla, G.N, G.dy);
  G.varpi_nabla = to_orthonormal_frame(G.theta_nabla, G.B, G.dB);
  return G;
}

std::pair<ConnectionForm, ConnectionForm> SphereBundle::connection_forms(int chart,
                                                                         const Vec3& xi) const {
  const BundleGeometry G = geometry(chart, xi);
  return {G.varpi_D, G.varpi_nabla};
}

double SphereBundle::volume(int chart, const Vec2& x) const {
  return fiber_volume(metric_, chart, x, options_.fiber_order);
}

Vec2 SphereBundle::dlog_volume(int chart, const Vec2& x) const {
  const double h = options_.volume_step;
  Vec2 r;
  for (int a = 0; a < 2; ++a) {
    auto lv = [&](double s) {
      Vec2 p = x;
      p(a) += s;
      return std::log(volume(chart, p));
    };
    const double d1 = (lv(h) - lv(-h)) / (2.0 * h);
    const double d2 = (lv(0.5 * h) - lv(-0.5 * h)) / h;
    r(a) = (4.0 * d2 - d1) / 3.0;
  }
  return r;
}

PointForms SphereBundle::forms(int chart, const Vec3& xi) const {
  const double h = options_.fd_step;
  const auto center = connection_forms(chart, xi);
  std::array<ConnectionForm, 3> dD, dN;
  for (int a = 0; a < 3; ++a) {
    auto at = [&](double s) {
      Vec3 p = xi;
      p(a) += s;
      return connection_forms(chart, p);
    };
    const auto p1 = at(h), m1 = at(-h), p2 = at(0.5 * h), m2 = at(-0.5 * h);
    for (int b = 0; b < 3; ++b) {
      dD[a][b] = (4.0 * (p2.first[b] - m2.first[b]) / h - (p1.first[b] - m1.first[b]) / (2.0 * h)) / 3.0;
      dN[a][b] = (4.0 * (p2.second[b] - m2.second[b]) / h - (p1.second[b] - m1.second[b]) / (2.0 * h)) / 3.0;
    }
  }
  const CurvatureForm OD = curvature(center.first, dD);
  const CurvatureForm ON = curvature(center.second, dN);

  PointForms f;
  f.omega_D = omega_pfaffian(as_skew_two_form(OD));
  f.omega_nabla = omega_pfaffian(as_skew_two_form(ON));

  const ConnectionForm delta = difference(center.second, center.first);
  f.upsilon0 = upsilon0_of(delta);
  // Upsilon_0 is linear in delta for rank 2, so d_a Upsilon_0 = Upsilon_0(d_a delta).
  std::vector<PointwiseForm> partials;
  for (int a = 0; a < 3; ++a) partials.push_back(upsilon0_of(difference(dN[a], dD[a])));
  f.d_upsilon0 = exterior_derivative(partials);

  const SkewMatrixValuedForm varpi = as_skew_one_form(center.second);
  f.upsilon1 = upsilon1(varpi);
  f.upsilon2 = upsilon2(as_skew_two_form(ON), varpi);
  // Upsilon_2 collects the k >= 1 terms of Pi, which do not exist in rank 2.
  f.d_upsilon2 = PointwiseForm(3);

  const Vec2 x(xi(0), xi(1));
  f.V = volume(chart, x);
  const Vec2 dlv = dlog_volume(chart, x);
  f.dlog_v[1] = dlv(0);
  f.dlog_v[2] = dlv(1);
  f.frak_e = frak_e(f.d_upsilon0, f.dlog_v, f.upsilon1, f.d_upsilon2);
  f.integrand = (f.omega_D + f.frak_e) / f.V;
  f.boundary = f.upsilon1 / f.V;
  return f;
}

PointwiseForm SphereBundle::boundary_form(int chart, const Vec3& xi) const {
  const auto w = connection_forms(chart, xi);
  return upsilon1(as_skew_one_form(w.second)) / volume(chart, Vec2(xi(0), xi(1)));
}

PointwiseForm SphereBundle::pi_form_at(int chart, const Vec3& xi) const {
  const auto w = connection_forms(chart, xi);
  const SkewMatrixValuedForm varpi = as_skew_one_form(w.second);
  // Rank 2: Pi = c Phi_0 involves no curvature factor.
  return pi_form(zero_curvature(2), varpi);
}

PointwiseForm SphereBundle::upsilon0_at(int chart, const Vec3& xi) const {
  const auto w = connection_forms(chart, xi);
  return upsilon0_of(difference(w.second, w.first));
}

}  // namespace fgbc
