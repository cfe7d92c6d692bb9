#include "fgbc/experiment.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "fgbc/chern_forms.hpp"
#include "fgbc/quadrature.hpp"

namespace fgbc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_num(double v) { return fmt::format("{:.6g}", v); }

SphereBundle make_bundle(const Atlas& atlas, const ExperimentConfig& c, ConnectionSpec connection) {
  BundleOptions o;
  o.fd_step = c.fd_step;
  o.volume_step = c.volume_step;
  o.fiber_order = c.order_fiber;
  return SphereBundle(atlas, install_metric(atlas, c.metric, c.metric_params), std::move(connection),
                      c.ehresmann, o);
}

void describe(Report& r, const ExperimentConfig& c) {
  r.metadata = {{"manifold", c.manifold},
                {"metric", c.metric},
                {"connection", c.connection.type},
                {"ehresmann", c.ehresmann.type},
                {"order_base", std::to_string(c.order_base)},
                {"order_fiber", std::to_string(c.order_fiber)},
                {"order_boundary", std::to_string(c.order_boundary)},
                {"fd_step", fmt_num(c.fd_step)},
                {"volume_step", fmt_num(c.volume_step)},
                {"richardson", c.richardson ? "on" : "off"},
                {"seed", std::to_string(c.seed)}};
  if (c.connection.type == "perturbed") {
    r.metadata.emplace_back("perturbation_amplitude", fmt_num(c.connection.amplitude));
    r.metadata.emplace_back("perturbation_profile", c.connection.profile);
  }
  for (const auto& [k, v] : c.metric_params) r.metadata.emplace_back("metric." + k, fmt_num(v));
}

// Random point of the sphere bundle over a chart region.
struct BundleSampler {
  const Atlas& atlas;
  std::mt19937_64 rng;
  std::pair<int, Vec3> operator()() {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    if (atlas.kind() == SurfaceKind::Sphere) {
      const int chart = U(rng) < 0.5 ? 0 : 1;
      const double r = std::sqrt(U(rng)), phi = kTwoPi * U(rng);
      return {chart, Vec3(r * std::cos(phi), r * std::sin(phi), kTwoPi * U(rng))};
    }
    return {0, Vec3(kTwoPi * U(rng), kTwoPi * U(rng), kTwoPi * U(rng))};
  }
};

double max_abs_diff(const PointwiseForm& a, const PointwiseForm& b) { return (a - b).max_abs(); }

}  // namespace

// ---------------------------------------------------------------------------
// Report bookkeeping

bool Report::passed() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

Check& Report::add(const std::string& name, double value, double target, double tolerance) {
  Check c{name, value, target, tolerance, std::abs(value - target) <= tolerance};
  checks.push_back(c);
  return checks.back();
}

Check& Report::add_residual(const std::string& name, double residual, double tolerance) {
  Check c{name, residual, 0.0, tolerance, residual <= tolerance};
  checks.push_back(c);
  return checks.back();
}

Check& Report::add_flag(const std::string& name, bool ok) {
  Check c{name, ok ? 1.0 : 0.0, 1.0, 0.0, ok};
  checks.push_back(c);
  return checks.back();
}

Atlas make_atlas(const std::string& manifold) {
  if (manifold == "sphere") return Atlas::sphere();
  if (manifold == "torus") return Atlas::torus();
  throw Error(ErrorKind::Validation, fmt::format("unknown manifold '{}'", manifold));
}

// ---------------------------------------------------------------------------
// Gauss-Bonnet-Chern

Report run_gbc(const ExperimentConfig& config) {
  const Stopwatch clock;
  Report r;
  r.scenario = "gbc";
  describe(r, config);
  r.metadata.emplace_back("vector_field", config.field.type);

  const Atlas atlas = make_atlas(config.manifold);
  const FinslerMetric metric = install_metric(atlas, config.metric, config.metric_params);
  const CertificationReport cert = certify_metric(atlas, metric, 1000, config.seed, true);
  r.add_flag("metric satisfies the Minkowski axioms on samples", cert.passed);

  const SectionField X = make_vector_field(atlas, config.field);
  r.title = fmt::format("Gauss-Bonnet-Chern: {} on the {}, {} connection, field {}", metric.id(),
                        atlas.name(), config.connection.type, X.name);
  r.zeros = find_zeros(atlas, X);
  for (const auto& z : r.zeros)
    if (!z.resolved)
      throw Error(ErrorKind::Topology,
                  fmt::format("unresolved zero near ({}, {}) in chart {}", z.location(0),
                              z.location(1), z.chart));
  const int chi = atlas.euler_characteristic();
  const int ph = poincare_hopf_sum(r.zeros);
  if (ph != chi)
    throw Error(ErrorKind::Topology,
                fmt::format("degree sum {} does not match the Euler characteristic {}", ph, chi));
  r.add("Poincare-Hopf degree sum", ph, chi, 0.0);
  for (auto& z : r.zeros) z.epsilon_schedule = config.epsilon_schedule;

  const SphereBundle bundle = make_bundle(atlas, config, config.connection);
  const BaseDensity density = [&](int chart, const Vec2& x) {
    const InducedSection s = induced_section(X, chart, x);
    const PointForms f = bundle.forms(chart, Vec3(x(0), x(1), s.theta));
    return pullback_by_section(f.integrand, s.dtheta)[3];
  };
  const BaseOneForm boundary = [&](int chart, const Vec2& x) {
    const InducedSection s = induced_section(X, chart, x);
    const PointwiseForm b =
        pullback_by_section(bundle.boundary_form(chart, Vec3(x(0), x(1), s.theta)), s.dtheta);
    return Vec2(b[1], b[2]);
  };

  QuadratureOptions q;
  q.order = config.order_base;
  q.threads = config.threads;
  auto excised = [&](double eps, const QuadratureOptions& opt) {
    ExcisedDomain dom{&atlas, {}};
    for (const auto& z : r.zeros) dom.disks.push_back({z.chart, z.location, eps});
    return base_integral_excised(density, dom, opt);
  };

  std::vector<double> eps_list, normalized;
  std::vector<std::vector<double>> per_zero(r.zeros.size());
  double no_zero_integral = 0.0;
  for (std::size_t i = 0; i < config.epsilon_schedule.size(); ++i) {
    const double eps = config.epsilon_schedule[i];
    ConvergenceRow row;
    row.epsilon = eps;
    if (r.zeros.empty()) {
      if (i == 0) no_zero_integral = excised(eps, q);
      row.integral = no_zero_integral;
    } else {
      row.integral = excised(eps, q);
    }
    row.normalized = kTwoPi * row.integral;
    for (std::size_t k = 0; k < r.zeros.size(); ++k) {
      const double b = boundary_circle_integral(boundary, r.zeros[k].chart, r.zeros[k].location, eps,
                                                config.order_boundary);
      row.boundary.push_back(b);
      row.boundary_sum += b;
      per_zero[k].push_back(b);
    }
    // Stokes on M minus the disks: the excised integral equals minus the
    // counter-clockwise boundary integrals at every finite radius.
    row.stokes_residual = row.integral + row.boundary_sum;
    eps_list.push_back(eps);
    normalized.push_back(row.normalized);
    r.convergence.push_back(row);
  }

  const bool extrapolate = config.richardson && eps_list.size() > 1 && !r.zeros.empty();
  auto limit = [&](const std::vector<double>& v) {
    return extrapolate ? extrapolate_to_zero(eps_list, v).value : v.back();
  };
  const double tol = config.tolerance > 0.0
                         ? config.tolerance
                         : (metric.is_riemannian() ? (chi == 0 ? 1e-6 : 1e-2) : 2e-2);
  const double value = limit(normalized);
  r.add("normalized integral vol(S^1) * I", value, chi, tol);
  r.add("integral I vs chi / vol(S^1)", value / kTwoPi, chi / kTwoPi, tol / kTwoPi);
  if (extrapolate)
    r.metadata.emplace_back("extrapolation_error_estimate",
                            fmt_num(extrapolate_to_zero(eps_list, normalized).error_estimate));

  for (std::size_t k = 0; k < r.zeros.size(); ++k) {
    const auto& z = r.zeros[k];
    r.add(fmt::format("boundary integral at zero {} (chart {}, degree {:+d})", k, z.chart, z.degree),
          limit(per_zero[k]), -z.degree / kTwoPi, 1e-3);
  }
  double stokes = 0.0;
  for (const auto& row : r.convergence) stokes = std::max(stokes, std::abs(row.stokes_residual));
  if (!r.zeros.empty()) r.add_residual("finite-radius Stokes residual (max over radii)", stokes, 1e-4);

  // Quadrature audit: halving the base order must not move the result by
  // more than a tenth of the tolerance.
  {
    QuadratureOptions half = q;
    half.order = std::max(8, config.order_base / 2);
    const double eps = config.epsilon_schedule.back();
    const double coarse = kTwoPi * excised(eps, half);
    r.add(fmt::format("quadrature audit: order {} vs {}", half.order, q.order), coarse,
          r.convergence.back().normalized, 0.1 * tol);
  }

  // Fiber volume: constant 2 pi for Riemannian metrics, visibly varying otherwise.
  {
    double vmin = 1e300, vmax = 0.0;
    for (int c = 0; c < atlas.chart_count(); ++c)
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          const Vec2 x = atlas.kind() == SurfaceKind::Sphere
                             ? Vec2(-0.9 + 1.8 * i / 7.0, -0.9 + 1.8 * j / 7.0) * 0.7
                             : Vec2(kTwoPi * i / 8.0, kTwoPi * j / 8.0);
          const double V = bundle.volume(c, x);
          vmin = std::min(vmin, V);
          vmax = std::max(vmax, V);
        }
    if (metric.is_riemannian()) {
      r.add("fiber volume V(x) = vol(S^1) (max deviation)", std::max(vmax - kTwoPi, kTwoPi - vmin) + kTwoPi,
            kTwoPi, 1e-10);
    } else {
      Check& c = r.add("fiber volume max/min ratio differs from 1", vmax / vmin, 1.0, 1e-4);
      c.pass = !c.pass;
    }
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Identity residuals

namespace {

struct IdentityMaxima {
  double d_pi = 0.0, eq34 = 0.0, prop51 = 0.0, fiber_volume = 0.0, fiber_pullback = 0.0;
  double compat = 0.0, partial = 0.0, chern_unmodified = 0.0, factor_two = 0.0, family = 0.0;
  double riemannian_e = 0.0, skew = 0.0;
};

void accumulate_identities(const SphereBundle& b, const SphereBundle& chern_only,
                           const SphereBundle& doubled, int chart, const Vec3& xi,
                           IdentityMaxima& m) {
  const PointForms f = b.forms(chart, xi);
  const BundleGeometry G = b.geometry(chart, xi);
  m.skew = std::max({m.skew, skew_residual(G.varpi_D), skew_residual(G.varpi_nabla)});

  const PointwiseForm dpi = exterior_derivative(
      [&](int c, const Vec3& p) { return b.pi_form_at(c, p); }, chart, xi, b.options().fd_step);
  m.d_pi = std::max(m.d_pi, max_abs_diff(dpi, f.omega_nabla));

  const PointwiseForm dbound = exterior_derivative(
      [&](int c, const Vec3& p) { return b.boundary_form(c, p); }, chart, xi, b.options().fd_step);
  m.eq34 = std::max(m.eq34, max_abs_diff(f.integrand, dbound));
  // Upsilon_0 differentiated as a field, independently of the curvature stencil.
  const PointwiseForm du0 = exterior_derivative(
      [&](int c, const Vec3& p) { return b.upsilon0_at(c, p); }, chart, xi, b.options().fd_step);
  m.prop51 = std::max(m.prop51, max_abs_diff(du0, f.omega_D - f.omega_nabla));

  // Fiber restrictions: Phi_0 = varpi_1^2 on d/dtheta against dnu, and
  // varpi_2^k(d/dtheta) B_k^i against d(y^i / F).
  const Vec2 x(xi(0), xi(1));
  m.fiber_volume = std::max(m.fiber_volume, std::abs(G.varpi_nabla[2](0, 1) -
                                                     fiber_volume_form(b.metric(), chart, x, xi(2))));
  const Eigen::RowVector2d pulled = G.varpi_nabla[2].row(1) * G.B;
  m.fiber_pullback = std::max(m.fiber_pullback, (pulled.transpose() - G.dy.col(2)).cwiseAbs().maxCoeff());

  m.compat = std::max(m.compat, metric_compatibility_residual(G.theta_nabla, G.jet.g, G.dg));
  m.partial = std::max(m.partial, partial_compatibility_residual(
                                      chern_horizontal(G.jet, G.N), G.jet, G.N));
  const BundleGeometry C = chern_only.geometry(chart, xi);
  m.chern_unmodified = std::max(m.chern_unmodified, metric_compatibility_residual(C.theta_nabla, C.jet.g, C.dg));
  const BundleGeometry T = doubled.geometry(chart, xi);
  m.factor_two = std::max(m.factor_two, metric_compatibility_residual(T.theta_nabla, T.jet.g, T.dg));

  for (double s : {0.25, 0.5, 0.75})
    m.family = std::max(m.family, skew_residual(connection_family(G.varpi_D, G.varpi_nabla, s)));
  m.riemannian_e = std::max(m.riemannian_e, (f.frak_e + f.d_upsilon2).max_abs());
}

ComplexForm mq_field(double t, const ConnectionForm& varpi, const CurvatureForm& omega) {
  const BigradedElement gl = nabla_ell(as_skew_one_form(varpi));
  const BigradedElement Om = as_skew_two_form(omega).to_bivector();
  return mathai_quillen_Ut(t, gl, Om).U;
}

// Random bigraded elements for the algebraic checks.
BigradedElement random_element(int n, int form_dim, int form_degree, int fiber_degree,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  BigradedElement e(n, form_dim);
  for (Mask f = 0; f < (Mask{1} << form_dim); ++f) {
    if (degree(f) != form_degree) continue;
    for (Mask v = 0; v < (Mask{1} << n); ++v)
      if (degree(v) == fiber_degree) e.add(f, v, U(rng));
  }
  return e;
}

}  // namespace

Report run_identity_suite(const ExperimentConfig& config) {
  const Stopwatch clock;
  Report r;
  r.scenario = "identities";
  describe(r, config);
  const Atlas atlas = make_atlas(config.manifold);
  const SphereBundle bundle = make_bundle(atlas, config, config.connection);
  const bool riemannian = bundle.metric().is_riemannian();
  certify_metric(atlas, bundle.metric(), 1000, config.seed, true);
  r.title = fmt::format("identity residuals: {} on the {}", bundle.metric().id(), atlas.name());

  // Variants: the perturbed connection exercises Upsilon_0; the unmodified
  // Chern connection and the doubled vertical term must fail compatibility.
  ConnectionSpec pert = config.connection;
  pert.type = "perturbed";
  if (pert.amplitude == 0.0) pert.amplitude = 0.2;
  const SphereBundle perturbed = make_bundle(atlas, config, pert);
  ConnectionSpec chern = config.connection;
  chern.type = "cartan";
  chern.vertical_factor = 0.0;
  const SphereBundle chern_only = make_bundle(atlas, config, chern);
  ConnectionSpec twice = chern;
  twice.vertical_factor = 2.0;
  const SphereBundle doubled = make_bundle(atlas, config, twice);

  IdentityMaxima main, alt;
  BundleSampler sample{atlas, std::mt19937_64(config.seed)};
  for (int i = 0; i < config.samples; ++i) {
    const auto [chart, xi] = sample();
    accumulate_identities(bundle, chern_only, doubled, chart, xi, main);
    accumulate_identities(perturbed, chern_only, doubled, chart, xi, alt);
  }
  const int n = config.samples;
  r.add_residual(fmt::format("d Pi - Omega^nabla ({} points)", n), main.d_pi, 1e-5);
  r.add_residual("(Omega^D + E)/V - d(Upsilon_1/V)", main.eq34, 1e-5);
  r.add_residual("(Omega^D + E)/V - d(Upsilon_1/V), perturbed D", alt.eq34, 1e-5);
  r.add_residual("d Upsilon_0 - (Omega^D - Omega^nabla)", main.prop51, 1e-5);
  r.add_residual("d Upsilon_0 - (Omega^D - Omega^nabla), perturbed D", alt.prop51, 1e-5);
  r.add_residual("fiber volume form: Phi_0 - dnu on fibers", main.fiber_volume, 1e-8);
  r.add_residual("fiber pullback of varpi_2^k B_k^i - d(y^i/F)", main.fiber_pullback, 1e-8);
  r.add_residual("metric compatibility of the modified connection", main.compat, 1e-8);
  r.add_residual("metric compatibility of modify(perturbed D)", alt.compat, 1e-8);
  r.add_residual("partial metric compatibility of the Chern horizontal part", main.partial, 1e-8);
  r.add_residual("orthonormal-frame skewness of varpi^D and varpi^nabla", std::max(main.skew, alt.skew), 1e-10);
  r.add_residual("D_s metric compatible for s = 0.25, 0.5, 0.75", alt.family, 1e-9);
  if (riemannian) {
    r.add_residual("unmodified Chern connection is metric compatible (A = 0)", main.chern_unmodified, 1e-8);
    r.add_residual("E + d Upsilon_2 vanishes for Riemannian metrics", main.riemannian_e, 1e-10);
  } else {
    Check& c = r.add("unmodified Chern connection fails compatibility (residual > 1e-3)",
                     main.chern_unmodified, 0.0, 1e-3);
    c.pass = !c.pass;
    Check& d = r.add("vertical term 2A fails compatibility (residual > 1e-3)", main.factor_two, 0.0, 1e-3);
    d.pass = !d.pass;
  }

  // Structure equations on a smaller sample (nested finite differences).
  const int small = std::max(1, std::min(20, config.samples));
  double bianchi = 0.0, closed = 0.0, ode = 0.0, ode_imag = 0.0, u0 = 0.0, decay = 0.0;
  for (int i = 0; i < small; ++i) {
    const auto [chart, xi] = sample();
    const ConnectionFormField half = [&](int c, const Vec3& p) {
      const auto w = perturbed.connection_forms(c, p);
      return connection_family(w.first, w.second, 0.5);
    };
    bianchi = std::max(bianchi, bianchi_residual(half, chart, xi, 1e-3));

    const ConnectionFormField nabla = [&](int c, const Vec3& p) {
      return bundle.connection_forms(c, p).second;
    };
    auto U = [&](double t) {
      return [&, t](int c, const Vec3& p) {
        return real_part(mq_field(t, nabla(c, p), curvature(nabla, c, p)), 1e-10);
      };
    };
    const double t = 1.0, h = 1e-3;
    const PointwiseForm dU = exterior_derivative(FormField(U(t)), chart, xi, 1e-3);
    closed = std::max(closed, dU.max_abs());

    const PointwiseForm dUdt = (U(t + h)(chart, xi) - U(t - h)(chart, xi)) / (2.0 * h);
    auto trans = [&](bool imag) {
      return [&, imag](int c, const Vec3& p) {
        const ConnectionForm w = nabla(c, p);
        const ComplexForm T = mq_transgression(
            t, nabla_ell(as_skew_one_form(w)), as_skew_two_form(curvature(nabla, c, p)).to_bivector());
        PointwiseForm out(3);
        for (Mask m = 0; m < 8; ++m) out[m] = imag ? T[m].imag() : T[m].real();
        return out;
      };
    };
    // dU/dt = -i d B(l e^{-Theta_t}):  real part dU/dt - d Im T, imaginary part d Re T.
    const PointwiseForm dIm = exterior_derivative(FormField(trans(true)), chart, xi, 1e-3);
    const PointwiseForm dRe = exterior_derivative(FormField(trans(false)), chart, xi, 1e-3);
    ode = std::max(ode, (dUdt - dIm).max_abs());
    ode_imag = std::max(ode_imag, dRe.max_abs());

    const CurvatureForm O = curvature(nabla, chart, xi);
    const ComplexForm pf = pfaffian(as_skew_two_form(O));
    u0 = std::max(u0, (mq_field(0.0, nabla(chart, xi), O) - pf).max_abs());
    decay = std::max(decay, mq_field(30.0, nabla(chart, xi), O).max_abs());
  }
  r.add_residual(fmt::format("Bianchi identity D_s Omega_s at s = 0.5 ({} points)", small), bianchi, 1e-6);
  r.add_residual("closedness d U_t at t = 1", closed, 1e-4);
  r.add_residual("transgression d/dt U_t + i d B(l e^{-Theta_t}) at t = 1", std::max(ode, ode_imag), 1e-4);
  r.add_residual("U_0 - Pf(-Omega)", u0, 1e-12);
  r.add_residual("|U_30| (Gaussian decay)", decay, 1e-100);

  // Algebra: the A^{n-1,n-1} component of exp(-(i t grad l + Omega)) against
  // its closed form, the odd-rank Pfaffian, and the gamma-coefficient integral.
  std::mt19937_64 rng(config.seed + 1);
  for (int rank = 2; rank <= 4; ++rank) {
    double res = 0.0;
    const int form_dim = 2 * rank - 1;
    for (int trial = 0; trial < 5; ++trial) {
      const BigradedElement gl = random_element(rank, form_dim, 1, 1, rng);
      const BigradedElement Om = random_element(rank, form_dim, 2, 2, rng);
      const double t = 0.5 + trial * 0.3;
      const BigradedElement brute =
          component(exp_truncated(-(gl * Complex(0.0, t) + Om)), rank - 1, rank - 1);
      res = std::max(res, (brute - xi_closed_form(t, gl, Om)).max_abs());
    }
    r.add_residual(fmt::format("exp component vs closed form, n = {}", rank), res, 1e-10);
  }
  {
    SkewMatrixValuedForm S(3, 4);
    std::uniform_real_distribution<double> Ud(-1.0, 1.0);
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        PointwiseForm f(4);
        for (Mask m = 0; m < 16; ++m)
          if (degree(m) == 2) f[m] = Ud(rng);
        S.set(i, j, f);
      }
    r.add_residual("Pf(-Omega) for n = 3", pfaffian(S).max_abs(), 0.0);
  }
  {
    double res = 0.0, coeff = 0.0;
    const int pairs[5][2] = {{2, 0}, {3, 0}, {3, 1}, {4, 0}, {4, 1}};
    for (const auto& p : pairs) {
      const int nn = p[0], k = p[1];
      const double m = nn - 1 - 2 * k;
      const double integral = integrate(
          [m](double t) { return std::pow(t, m) * std::exp(-t * t); }, 0.0, 12.0, 64, 16);
      res = std::max(res, std::abs(integral - 0.5 * std::tgamma(0.5 * (nn - 2 * k))));
      coeff = std::max(coeff, std::abs(pi_coefficient(nn, k) - pi_coefficient_closed(nn, k)));
    }
    r.add_residual("int_0^inf t^{n-1-2k} e^{-t^2} dt - Gamma((n-2k)/2)/2", res, 1e-12);
    r.add_residual("Pi coefficients: gamma form vs closed form", coeff, 1e-15);
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Minkowski norm properties and Cartan identities

namespace {

Eigen::MatrixXd random_spd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = U(rng);
  return A * A.transpose() + 0.3 * Eigen::MatrixXd::Identity(n, n);
}

MinkowskiNorm random_norm(int n, std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  if (kind == 0) return MinkowskiNorm::riemannian(random_spd(n, rng));
  if (kind == 1) {
    const Eigen::MatrixXd G = random_spd(n, rng);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = U(rng) - 0.5;
    const double len = std::sqrt(b.dot(G.inverse() * b));
    b *= 0.9 * U(rng) / len;
    return MinkowskiNorm::randers(G, b);
  }
  return MinkowskiNorm::quartic(n, 0.05 + U(rng));
}

Eigen::VectorXd random_ray(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = N(rng);
  return y;
}

// Hessian of F from g = F_y F_y^T + F F_yy.
Eigen::MatrixXd hessian_of_norm(const Eigen::MatrixXd& g, const Eigen::VectorXd& y, double F) {
  const Eigen::VectorXd Fy = g * y / F;
  return (g - Fy * Fy.transpose()) / F;
}

}  // namespace

Report run_minkowski_props(const ExperimentConfig& config) {
  const Stopwatch clock;
  Report r;
  r.scenario = "minkowski-props";
  r.title = "Minkowski norm sums and Cartan tensor identities";
  r.metadata = {{"pairs", std::to_string(config.samples)}, {"rays", "100"},
                {"seed", std::to_string(config.seed)}};
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> kind(0, 2), dim(2, 4);
  std::uniform_real_distribution<double> lam(0.1, 10.0);

  int failures = 0, decomposition_failures = 0;
  double min_eig = 1e300, homog = 0.0, decomposition = 0.0, contraction = 0.0, riem_A = 0.0;
  for (int p = 0; p < config.samples; ++p) {
    const int n = dim(rng);
    const int k1 = kind(rng), k2 = kind(rng);
    const MinkowskiNorm F1 = random_norm(n, rng, k1), F2 = random_norm(n, rng, k2);
    const MinkowskiNorm S = sum_norms(F1, F2);
    bool ok = true;
    for (int ray = 0; ray < 100; ++ray) {
      const Eigen::VectorXd y = random_ray(n, rng);
      const double l = lam(rng);
      const double Fy = S(y);
      const double h = std::abs(S(Eigen::VectorXd(l * y)) - l * Fy) / (l * Fy);
      homog = std::max(homog, h);
      if (h >= 1e-10) ok = false;
      try {
        const FundamentalTensor gt = fundamental_tensor(S, y);
        const double e = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gt.g).eigenvalues().minCoeff();
        min_eig = std::min(min_eig, e);
        if (!(e > 0.0)) ok = false;
        // g~(X, X) = [F~_y . X]^2 + F~ (F1_yy + F2_yy)(X, X) with both
        // Hessians positive semidefinite.
        const FundamentalTensor g1 = fundamental_tensor(F1, y), g2 = fundamental_tensor(F2, y);
        const Eigen::MatrixXd H1 = hessian_of_norm(g1.g, y, F1(y)), H2 = hessian_of_norm(g2.g, y, F2(y));
        const Eigen::VectorXd dF = g1.g * y / F1(y) + g2.g * y / F2(y);
        const Eigen::MatrixXd rebuilt = dF * dF.transpose() + Fy * (H1 + H2);
        const double rel = (rebuilt - gt.g).cwiseAbs().maxCoeff() / gt.g.cwiseAbs().maxCoeff();
        decomposition = std::max(decomposition, rel);
        const double h1 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H1).eigenvalues().minCoeff();
        const double h2 = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H2).eigenvalues().minCoeff();
        if (rel > 1e-9 || h1 < -1e-9 || h2 < -1e-9) ++decomposition_failures;

        for (const MinkowskiNorm* N : {&F1, &F2, &S}) {
          const CartanTensor A = cartan_tensor(*N, y);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
              double c = 0.0;
              for (int kk = 0; kk < n; ++kk) c += y(kk) * A(kk, i, j);
              contraction = std::max(contraction, std::abs(c) / y.norm());
            }
          if (N->is_riemannian()) riem_A = std::max(riem_A, A.max_abs());
        }
      } catch (const Error&) {
        ok = false;
      }
    }
    if (!ok) ++failures;
  }
  r.add(fmt::format("sum norms failing homogeneity or convexity ({} pairs x 100 rays)", config.samples),
        failures, 0.0, 0.0);
  r.add_residual("max relative homogeneity error of F1 + F2", homog, 1e-10);
  Check& e = r.add("min eigenvalue of the sum-norm fundamental tensor > 0", min_eig, 0.0, 0.0);
  e.pass = min_eig > 0.0;
  r.add("sum-norm decomposition failures (square term + semidefinite Hessians)",
        decomposition_failures, 0.0, 0.0);
  r.add_residual("sum-norm decomposition residual (relative)", decomposition, 1e-9);

  // Finsler metric zoo on both surfaces.
  const std::vector<std::pair<std::string, std::string>> zoo = {
      {"sphere", "round_sphere"}, {"sphere", "randers(0.1)"}, {"sphere", "randers(0.5)"},
      {"torus", "flat_torus"},    {"torus", "riemannian(2,0.3,1)"}, {"torus", "randers(0.3)"},
      {"torus", "quartic(0.05)"}};
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (const auto& [surface, id] : zoo) {
    const Atlas atlas = make_atlas(surface);
    const FinslerMetric m = install_metric(atlas, id);
    for (int s = 0; s < 100; ++s) {
      const int chart = surface == "sphere" ? (s % 2) : 0;
      const Vec2 x = surface == "sphere" ? Vec2(U(rng) - 0.5, U(rng) - 0.5) * 1.4
                                         : Vec2(kTwoPi * U(rng), kTwoPi * U(rng));
      const double phi = kTwoPi * U(rng);
      const Vec2 y = (0.2 + 3.0 * U(rng)) * Vec2(std::cos(phi), std::sin(phi));
      const CartanTensor A = cartan_tensor(m, chart, x, y);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double c = y(0) * A(0, i, j) + y(1) * A(1, i, j);
          contraction = std::max(contraction, std::abs(c) / y.norm());
        }
      if (m.is_riemannian()) riem_A = std::max(riem_A, A.max_abs());
    }
  }
  r.add_residual("y^k A_kij over norms and the metric zoo", contraction, 1e-10);
  r.add_residual("|A| for Riemannian inputs", riem_A, 1e-12);
  r.runtime_seconds = clock.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Degrees

Report run_degrees(const ExperimentConfig& config) {
  const Stopwatch clock;
  Report r;
  r.scenario = "degrees";
  r.title = "local degrees and Poincare-Hopf sums";
  r.metadata = {{"seed", std::to_string(config.seed)}};

  struct Planar {
    const char* name;
    int degree;
    SectionField::Fn fn;
  };
  const std::vector<Planar> planar = {
      {"(u, v)", 1, [](int, const Vec2T<Dual2>& x) { return x; }},
      {"(u, -v)", -1, [](int, const Vec2T<Dual2>& x) { return Vec2T<Dual2>{x[0], -x[1]}; }},
      {"(u^2 - v^2, 2uv)", 2,
       [](int, const Vec2T<Dual2>& x) {
         return Vec2T<Dual2>{x[0] * x[0] - x[1] * x[1], 2.0 * (x[0] * x[1])};
       }},
  };
  for (const auto& p : planar) {
    const SectionField X{p.name, p.fn, {}};
    const int d = local_degree(X, 0, Vec2::Zero(), 0.5);
    const double oracle = winding_number(X, 0, Vec2::Zero(), 0.5, 4096);
    r.add(fmt::format("local degree of {}", p.name), d, p.degree, 0.0);
    r.add(fmt::format("winding oracle (4096 samples) of {}", p.name), oracle, p.degree, 1e-9);
  }

  std::vector<std::pair<std::string, std::string>> scenarios = {
      {"sphere", "rotational"},
      {"sphere", "height_gradient"},
      {"sphere", "stereographic_power(0)"},
      {"sphere", "stereographic_power(1)"},
      {"sphere", "stereographic_power(2)"},
      {"sphere", "stereographic_power(-1)"},
      {"sphere", "custom(u^2 - v^2 - 0.25; 2*u*v)"},
      {"torus", "constant"},
      {"torus", "custom(sin(u); sin(v))"},
      {"torus", "custom(sin(u) + 0.5*cos(v); sin(v))"},
  };
  for (const auto& [surface, field] : scenarios) {
    const Atlas atlas = make_atlas(surface);
    const SectionField X = make_vector_field(atlas, parse_vector_field(field));
    const auto zeros = find_zeros(atlas, X);
    std::string degrees;
    bool resolved = true;
    for (const auto& z : zeros) {
      degrees += fmt::format("{}{:+d}", degrees.empty() ? "" : " ", z.degree);
      resolved = resolved && z.resolved;
    }
    if (!resolved) {
      r.add_flag(fmt::format("{} on the {}: all zeros resolved", X.name, surface), false);
      continue;
    }
    r.add(fmt::format("{} on the {}: sum of [{}]", X.name, surface, degrees), poincare_hopf_sum(zeros),
          atlas.euler_characteristic(), 0.0);
  }
  r.runtime_seconds = clock.seconds();
  return r;
}

Report run_scenario(const ExperimentConfig& config) {
  if (config.scenario == "gbc") return run_gbc(config);
  if (config.scenario == "identities") return run_identity_suite(config);
  if (config.scenario == "minkowski-props") return run_minkowski_props(config);
  if (config.scenario == "degrees") return run_degrees(config);
  throw Error(ErrorKind::Validation, fmt::format("unknown scenario '{}'", config.scenario));
}

void dump_forms(const ExperimentConfig& config, const std::string& path) {
  const Atlas atlas = make_atlas(config.manifold);
  const SphereBundle bundle = make_bundle(atlas, config, config.connection);
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path));
  out << "chart,x1,x2,theta,V,omega_D_12,omega_D_13,omega_D_23,frak_e_12,frak_e_13,frak_e_23,"
         "upsilon1_1,upsilon1_2,upsilon1_3,integrand_12,integrand_13,integrand_23\n";
  const int n = 9;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < 8; ++k) {
        const Vec2 x = atlas.kind() == SurfaceKind::Sphere
                           ? Vec2(-0.8 + 1.6 * i / (n - 1.0), -0.8 + 1.6 * j / (n - 1.0))
                           : Vec2(kTwoPi * i / n, kTwoPi * j / n);
        const Vec3 xi(x(0), x(1), kTwoPi * k / 8.0);
        const PointForms f = bundle.forms(0, xi);
        out << fmt::format("0,{:.10e},{:.10e},{:.10e},{:.12e}", xi(0), xi(1), xi(2), f.V);
        for (const PointwiseForm* p : {&f.omega_D, &f.frak_e})
          out << fmt::format(",{:.12e},{:.12e},{:.12e}", (*p)[3], (*p)[5], (*p)[6]);
        out << fmt::format(",{:.12e},{:.12e},{:.12e}", f.upsilon1[1], f.upsilon1[2], f.upsilon1[4]);
        out << fmt::format(",{:.12e},{:.12e},{:.12e}\n", f.integrand[3], f.integrand[5], f.integrand[6]);
      }
  (void)kPi;
}

}  // namespace fgbc
