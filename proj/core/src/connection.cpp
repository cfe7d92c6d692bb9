#include "fgbc/connection.hpp"

#include <fmt/format.h>

namespace fgbc {

EhresmannData spray_connection(const MetricJet& jet, const Vec2& y) {
  const Mat2 gi = jet.g.inverse();
  if (!gi.allFinite()) throw Error(ErrorKind::Numerical, "singular fundamental tensor in spray");
  // S_l = [F^2]_{x^k y^l} y^k - [F^2]_{x^l}
  const Vec2 S = jet.Qxy.transpose() * y - jet.Qx;
  EhresmannData e;
  for (int j = 0; j < 2; ++j) {
    const Mat2 dgi = -gi * jet.dg_dy[j] * gi;
    Vec2 T;
    for (int l = 0; l < 2; ++l) {
      double s = 0.0;
      for (int k = 0; k < 2; ++k) s += 2.0 * jet.dg_dx[k](l, j) * y(k);
      T(l) = s + jet.Qxy(j, l) - jet.Qxy(l, j);
    }
    e.N.col(j) = 0.25 * (dgi * S + gi * T);
  }
  return e;
}

EhresmannData spray_connection(const FinslerMetric& metric, int chart, const Vec2& x,
                               const Vec2& y) {
  return spray_connection(metric_jet(metric, chart, x, y), y);
}

EhresmannData explicit_connection(const std::array<double, 8>& c, const Vec2& y) {
  EhresmannData e;
  for (int j = 0; j < 2; ++j)
    for (int A = 0; A < 2; ++A) e.N(j, A) = c[(j * 2 + A) * 2] * y(0) + c[(j * 2 + A) * 2 + 1] * y(1);
  return e;
}

std::array<Mat2, 2> delta_metric(const MetricJet& jet, const EhresmannData& N) {
  std::array<Mat2, 2> d;
  for (int A = 0; A < 2; ++A) d[A] = jet.dg_dx[A] - N.N(0, A) * jet.dg_dy[0] - N.N(1, A) * jet.dg_dy[1];
  return d;
}

ConnectionData chern_horizontal(const MetricJet& jet, const EhresmannData& N) {
  const Mat2 gi = jet.g.inverse();
  const auto dg = delta_metric(jet, N);
  ConnectionData D;
  // gamma^i_{jk} = 1/2 g^{il} (dg_lj/dx^k + dg_lk/dx^j - dg_jk/dx^l), stored at gamma[k](j, i).
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += gi(i, l) * (dg[k](l, j) + dg[j](l, k) - dg[l](j, k));
        D.gamma[k](j, i) = 0.5 * s;
      }
  return D;
}

ConnectionData chern_horizontal(const FinslerMetric& metric, const EhresmannData& N, int chart,
                                const Vec2& x, const Vec2& y) {
  return chern_horizontal(metric_jet(metric, chart, x, y), N);
}

ConnectionData modify(const ConnectionData& D, const CartanTensor& A, double factor) {
  if (D.frame != FrameKind::Natural)
    throw Error(ErrorKind::Validation, "modification expects the natural frame");
  ConnectionData r = D;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r.rho[k](i, j) = factor * A.raised(j, i, k);
  return r;
}

double partial_compatibility_residual(const ConnectionData& D, const MetricJet& jet,
                                      const EhresmannData& N) {
  const auto dg = delta_metric(jet, N);
  double r = 0.0;
  for (int A = 0; A < 2; ++A) {
    // (G)_{jk} = gamma^k_{jA}; g_ik gamma^k_{jA} = (g G^T)_{ij}
    const Mat2 Gm = D.gamma[A];
    const Mat2 rhs = jet.g * Gm.transpose() + Gm * jet.g;
    r = std::max(r, (dg[A] - rhs).cwiseAbs().maxCoeff());
  }
  return r;
}

ConnectionForm pullback_to_sphere_bundle(const ConnectionData& D, const EhresmannData& N,
                                         const Eigen::Matrix<double, 2, 3>& dy) {
  ConnectionForm t;
  for (int a = 0; a < 3; ++a) {
    t[a] = Mat2::Zero();
    for (int A = 0; A < 2; ++A)
      if (a == A) t[a] += D.gamma[A];
    for (int k = 0; k < 2; ++k) {
      double delta_y = dy(k, a);
      if (a < 2) delta_y += N.N(k, a);
      t[a] += delta_y * D.rho[k];
    }
  }
  return t;
}

ConnectionForm to_orthonormal_frame(const ConnectionForm& theta, const Mat2& B,
                                    const std::array<Mat2, 3>& dB) {
  const Mat2 Bi = B.inverse();
  ConnectionForm w;
  for (int a = 0; a < 3; ++a) w[a] = dB[a] * Bi + B * theta[a] * Bi;
  return w;
}

ConnectionForm to_natural_frame(const ConnectionForm& varpi, const Mat2& B,
                                const std::array<Mat2, 3>& dB) {
  const Mat2 Bi = B.inverse();
  ConnectionForm t;
  for (int a = 0; a < 3; ++a) t[a] = Bi * (varpi[a] - dB[a] * Bi) * B;
  return t;
}

double metric_compatibility_residual(const ConnectionForm& theta, const Mat2& g,
                                     const std::array<Mat2, 3>& dg) {
  double r = 0.0;
  for (int a = 0; a < 3; ++a) {
    // theta_i^k g_kj = (theta g)_ij
    const Mat2 tg = theta[a] * g;
    r = std::max(r, (dg[a] - tg - tg.transpose()).cwiseAbs().maxCoeff());
  }
  return r;
}

double skew_residual(const ConnectionForm& varpi) {
  double r = 0.0;
  for (const Mat2& m : varpi) r = std::max(r, (m + m.transpose()).cwiseAbs().maxCoeff());
  return r;
}

ConnectionForm perturb_metric_compatible(const ConnectionForm& varpi, const ConnectionForm& Bp,
                                         double tol) {
  if (skew_residual(Bp) > tol)
    throw Error(ErrorKind::Validation, "perturbation is not skew in the orthonormal frame");
  ConnectionForm r;
  for (int a = 0; a < 3; ++a) r[a] = varpi[a] + Bp[a];
  return r;
}

ConnectionForm connection_family(const ConnectionForm& D, const ConnectionForm& nabla, double s) {
  ConnectionForm r;
  for (int a = 0; a < 3; ++a) r[a] = s * nabla[a] + (1.0 - s) * D[a];
  return r;
}

ConnectionData connection_family(const ConnectionData& D, const ConnectionData& nabla, double s) {
  if (D.frame != nabla.frame) throw Error(ErrorKind::Structural, "connections in different frames");
  ConnectionData r = D;
  for (int a = 0; a < 2; ++a) {
    r.gamma[a] = s * nabla.gamma[a] + (1.0 - s) * D.gamma[a];
    r.rho[a] = s * nabla.rho[a] + (1.0 - s) * D.rho[a];
  }
  return r;
}

namespace {

ConnectionForm derivative(const ConnectionFormField& f, int chart, const Vec3& xi, int a,
                          double h) {
  if (!(h > 1e-12)) throw Error(ErrorKind::Numerical, "finite-difference step underflow");
  auto at = [&](double s) {
    Vec3 p = xi;
    p(a) += s;
    return f(chart, p);
  };
  const ConnectionForm p1 = at(h), m1 = at(-h), p2 = at(0.5 * h), m2 = at(-0.5 * h);
  ConnectionForm d;
  for (int b = 0; b < 3; ++b) {
    const Mat2 d1 = (p1[b] - m1[b]) / (2.0 * h);
    const Mat2 d2 = (p2[b] - m2[b]) / h;
    d[b] = (4.0 * d2 - d1) / 3.0;
  }
  return d;
}

}  // namespace

CurvatureForm curvature(const ConnectionForm& w, const std::array<ConnectionForm, 3>& dw) {
  CurvatureForm O;
  for (int p = 0; p < 3; ++p) {
    const int a = kPairs[p][0], b = kPairs[p][1];
    O[p] = dw[a][b] - dw[b][a] - (w[a] * w[b] - w[b] * w[a]);
  }
  return O;
}

CurvatureForm curvature(const ConnectionFormField& varpi, int chart, const Vec3& xi, double h) {
  std::array<ConnectionForm, 3> dw;
  for (int a = 0; a < 3; ++a) dw[a] = derivative(varpi, chart, xi, a, h);
  return curvature(varpi(chart, xi), dw);
}

SkewMatrixValuedForm as_skew_one_form(const ConnectionForm& varpi, double tol) {
  if (skew_residual(varpi) > tol)
    throw Error(ErrorKind::Validation,
                fmt::format("connection form is not skew (residual {:.3e})", skew_residual(varpi)));
  SkewMatrixValuedForm s(2, 3);
  PointwiseForm f(3);
  for (int a = 0; a < 3; ++a) f[Mask{1} << a] = 0.5 * (varpi[a](0, 1) - varpi[a](1, 0));
  s.set(0, 1, f);
  return s;
}

SkewMatrixValuedForm as_skew_two_form(const CurvatureForm& omega, double tol) {
  double r = 0.0;
  for (const Mat2& m : omega) r = std::max(r, (m + m.transpose()).cwiseAbs().maxCoeff());
  if (r > tol)
    throw Error(ErrorKind::Validation, fmt::format("curvature is not skew (residual {:.3e})", r));
  SkewMatrixValuedForm s(2, 3);
  PointwiseForm f(3);
  for (int p = 0; p < 3; ++p) {
    const Mask m = (Mask{1} << kPairs[p][0]) | (Mask{1} << kPairs[p][1]);
    f[m] = 0.5 * (omega[p](0, 1) - omega[p](1, 0));
  }
  s.set(0, 1, f);
  return s;
}

double bianchi_residual(const ConnectionFormField& varpi, int chart, const Vec3& xi, double h) {
  auto omega = [&](const Vec3& p) { return curvature(varpi, chart, p); };
  std::array<CurvatureForm, 3> dO;
  for (int a = 0; a < 3; ++a) {
    auto at = [&](double s) {
      Vec3 p = xi;
      p(a) += s;
      return omega(p);
    };
    const CurvatureForm p1 = at(h), m1 = at(-h), p2 = at(0.5 * h), m2 = at(-0.5 * h);
    for (int q = 0; q < 3; ++q)
      dO[a][q] = (4.0 * (p2[q] - m2[q]) / h - (p1[q] - m1[q]) / (2.0 * h)) / 3.0;
  }
  const CurvatureForm O = omega(xi);
  const ConnectionForm w = varpi(chart, xi);
  // (0,1,2)-component: d(alpha)_{012} = d0 a12 - d1 a02 + d2 a01.
  const Mat2 dOm = dO[0][2] - dO[1][1] + dO[2][0];
  auto wedge21 = [](const CurvatureForm& a, const ConnectionForm& b) {
    return Mat2(a[0] * b[2] - a[1] * b[1] + a[2] * b[0]);
  };
  auto wedge12 = [](const ConnectionForm& b, const CurvatureForm& a) {
    return Mat2(b[0] * a[2] - b[1] * a[1] + b[2] * a[0]);
  };
  return (dOm + wedge21(O, w) - wedge12(w, O)).cwiseAbs().maxCoeff();
}

}  // namespace fgbc
