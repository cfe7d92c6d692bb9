#include "fgbc/quadrature.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace fgbc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f,
                                 int threads) {
  std::vector<double> out(n, 0.0);
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n / 16 + 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------------------
// Exterior calculus

PointwiseForm exterior_derivative(const std::vector<PointwiseForm>& partials) {
  const int dim = static_cast<int>(partials.size());
  PointwiseForm r(dim);
  for (int a = 0; a < dim; ++a) {
    const Mask bit = Mask{1} << a;
    const PointwiseForm& p = partials[a];
    for (Mask m = 0; m < p.size(); ++m) {
      if ((m & bit) || p[m] == 0.0) continue;
      r[m | bit] += merge_sign(bit, m) * p[m];
    }
  }
  return r;
}

PointwiseForm exterior_derivative(const FormField& f, int chart, const Vec3& xi, double h) {
  if (!(h > 1e-12)) throw Error(ErrorKind::Numerical, "finite-difference step underflow");
  std::vector<PointwiseForm> partials;
  for (int a = 0; a < 3; ++a) {
    auto at = [&](double s) {
      Vec3 p = xi;
      p(a) += s;
      return f(chart, p);
    };
    const PointwiseForm d1 = (at(h) - at(-h)) * (0.5 / h);
    const PointwiseForm d2 = (at(0.5 * h) - at(-0.5 * h)) * (1.0 / h);
    partials.push_back((d2 * 4.0 - d1) * (1.0 / 3.0));
  }
  return exterior_derivative(partials);
}

FormField exterior_derivative(FormField f, double h) {
  return [f = std::move(f), h](int chart, const Vec3& xi) {
    return exterior_derivative(f, chart, xi, h);
  };
}

PointwiseForm pullback_by_section(const PointwiseForm& f, const Vec2& dtheta) {
  if (f.dim() != 3) throw Error(ErrorKind::Structural, "expected a sphere-bundle form");
  PointwiseForm r(2);
  constexpr Mask kTheta = 4;
  for (Mask m = 0; m < f.size(); ++m) {
    if (f[m] == 0.0) continue;
    if (!(m & kTheta)) {
      r[m] += f[m];
      continue;
    }
    const Mask base = m & ~kTheta;
    for (int b = 0; b < 2; ++b) {
      const Mask bit = Mask{1} << b;
      if (base & bit) continue;
      r[base | bit] += merge_sign(base, bit) * f[m] * dtheta(b);
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Integration

namespace {

double bump(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  const double t = 2.0 * (1.0 - s);
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

struct Bump {
  ExcisedDisk disk;
  double support = 0.0;
};

// Displacement from the bump centre in the bump's own chart.
Vec2 displacement(const Atlas& atlas, const Bump& b, int chart, const Vec2& x) {
  if (atlas.kind() == SurfaceKind::Torus) {
    Vec2 d = x - b.disk.center;
    for (int i = 0; i < 2; ++i) d(i) -= kTwoPi * std::round(d(i) / kTwoPi);
    return d;
  }
  if (chart == b.disk.chart) return x - b.disk.center;
  if (x.squaredNorm() < 1e-300) return Vec2::Constant(1e300);
  return atlas.transition(chart, x, b.disk.chart) - b.disk.center;
}

double bump_sum(const Atlas& atlas, const std::vector<Bump>& bumps, int chart, const Vec2& x) {
  double s = 0.0;
  for (const Bump& b : bumps) s += bump(displacement(atlas, b, chart, x).norm() / b.support);
  return s;
}

// int_{r0}^{r1} int_0^{2 pi} g(c + r (cos, sin)) r dr dphi by tensor Gauss-Legendre.
double polar_integral(const std::function<double(const Vec2&)>& g, const Vec2& c, double r0,
                      double r1, int order, int threads) {
  const GaussRule& rule = gauss_legendre(order);
  const std::size_t n = rule.nodes.size();
  const std::vector<double> vals = parallel_map(
      n * n,
      [&](std::size_t idx) {
        const std::size_t i = idx / n, j = idx % n;
        const double r = r0 + 0.5 * (r1 - r0) * (rule.nodes[i] + 1.0);
        const double phi = std::numbers::pi * (rule.nodes[j] + 1.0);
        const Vec2 x = c + r * Vec2(std::cos(phi), std::sin(phi));
        return rule.weights[i] * rule.weights[j] * r * g(x);
      },
      threads);
  return pairwise_sum(vals) * 0.5 * (r1 - r0) * std::numbers::pi;
}

// One-dimensional composite rule on [a, b]. Panels are cut at the ends of the
// feature intervals (the footprints of the bump transitions); panels that meet
// a feature are split in two with order / 2 nodes each, the others get a share
// proportional to their length.
constexpr int kFeatureSplit = 2;

struct Rule1D {
  std::vector<double> x, w;
};

Rule1D composite_rule(double a, double b, std::vector<std::pair<double, double>> features,
                      int order) {
  std::vector<double> cuts = {a, b};
  for (auto& [lo, hi] : features) {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    if (lo < hi) {
      cuts.push_back(lo);
      cuts.push_back(hi);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double u, double v) { return v - u < 1e-12 * (b - a); }),
             cuts.end());
  cuts.back() = b;
  Rule1D r;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k], hi = cuts[k + 1];
    bool feature = false;
    for (const auto& [flo, fhi] : features) feature = feature || (flo < hi && fhi > lo);
    const int n = feature ? std::max(12, order / 2)
                          : std::max(8, static_cast<int>(std::ceil(order * (hi - lo) / (b - a))));
    const int pieces = feature ? kFeatureSplit : 1;
    const GaussRule& g = gauss_legendre(n);
    const double half = 0.5 * (hi - lo) / pieces;
    for (int q = 0; q < pieces; ++q) {
      const double start = lo + 2.0 * half * q;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        r.x.push_back(start + half * (g.nodes[i] + 1.0));
        r.w.push_back(half * g.weights[i]);
      }
    }
  }
  return r;
}

// Intersections of [lo, hi] shifted by multiples of 2 pi with [0, 2 pi).
void add_periodic(std::vector<std::pair<double, double>>& out, double lo, double hi) {
  for (int k = -1; k <= 1; ++k) out.emplace_back(lo + k * kTwoPi, hi + k * kTwoPi);
}

double tensor_integral(const Rule1D& u, const Rule1D& v,
                       const std::function<double(double, double)>& g, int threads) {
  const std::size_t nu = u.x.size(), nv = v.x.size();
  const std::vector<double> vals = parallel_map(
      nu * nv,
      [&](std::size_t idx) {
        const std::size_t i = idx / nv, j = idx % nv;
        return u.w[i] * v.w[j] * g(u.x[i], v.x[j]);
      },
      threads);
  return pairwise_sum(vals);
}

}  // namespace

double base_integral_excised(const BaseDensity& f, const ExcisedDomain& dom,
                             const QuadratureOptions& opt) {
  if (!dom.atlas) throw Error(ErrorKind::Structural, "excised domain without atlas");
  const Atlas& atlas = *dom.atlas;
  const bool sphere = atlas.kind() == SurfaceKind::Sphere;

  std::vector<double> origin_radius(atlas.chart_count(), 0.0);
  std::vector<Bump> bumps;
  for (const ExcisedDisk& d : dom.disks) {
    if (d.chart < 0 || d.chart >= atlas.chart_count())
      throw Error(ErrorKind::Structural, "excised disk refers to an unknown chart");
    if (!(d.radius > 0.0)) throw Error(ErrorKind::Validation, "excision radius must be positive");
    if (sphere && d.center.norm() < 1e-14) {
      if (d.radius >= 1.0) throw Error(ErrorKind::Validation, "excision radius exceeds the chart region");
      origin_radius[d.chart] = std::max(origin_radius[d.chart], d.radius);
    } else {
      bumps.push_back({d, 0.5});
    }
  }
  // Bump supports: disjoint from each other and from the origin disks.
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    Bump& b = bumps[i];
    for (std::size_t j = 0; j < bumps.size(); ++j) {
      if (i == j) continue;
      const double sep = displacement(atlas, bumps[j], b.disk.chart, b.disk.center).norm();
      b.support = std::min(b.support, 0.45 * sep);
    }
    if (sphere) b.support = std::min(b.support, 0.5 * (b.disk.center.norm() - origin_radius[b.disk.chart]));
    if (!(b.disk.radius < 0.5 * b.support))
      throw Error(ErrorKind::Topology,
                  fmt::format("zeros too close to excise a disk of radius {}", b.disk.radius));
  }

  double total = 0.0;
  for (int c = 0; c < atlas.chart_count(); ++c) {
    auto g = [&](const Vec2& x) {
      const double w = bumps.empty() ? 1.0 : 1.0 - bump_sum(atlas, bumps, c, x);
      return w == 0.0 ? 0.0 : w * f(c, x);
    };
    // Footprint of every bump support in this chart, as coordinate intervals
    // (r, phi) on the sphere or (x1, x2) on the torus.
    std::vector<std::pair<double, double>> fu, fv;
    for (const Bump& b : bumps) {
      constexpr int kSamples = 64;
      double ulo = 1e300, uhi = -1e300, vlo = 1e300, vhi = -1e300, ref = 0.0;
      for (int k = 0; k < kSamples; ++k) {
        const double t = kTwoPi * k / kSamples;
        Vec2 p = b.disk.center + b.support * Vec2(std::cos(t), std::sin(t));
        if (b.disk.chart != c) p = atlas.transition(b.disk.chart, p, c);
        double u = p(0), v = p(1);
        if (sphere) {
          u = p.norm();
          v = std::atan2(p(1), p(0));
          if (k == 0) ref = v;
          v = ref + std::remainder(v - ref, kTwoPi);
        }
        ulo = std::min(ulo, u), uhi = std::max(uhi, u);
        vlo = std::min(vlo, v), vhi = std::max(vhi, v);
      }
      if (sphere) {
        fu.emplace_back(ulo, uhi);
      } else {
        add_periodic(fu, ulo, uhi);
      }
      add_periodic(fv, vlo, vhi);
    }
    if (sphere) {
      const Rule1D rr = composite_rule(origin_radius[c], 1.0, fu, opt.order);
      const Rule1D rp = composite_rule(0.0, kTwoPi, fv, opt.order);
      total += tensor_integral(rr, rp, [&](double r, double phi) {
        return r * g(Vec2(r * std::cos(phi), r * std::sin(phi)));
      }, opt.threads);
    } else {
      const Rule1D r1 = composite_rule(0.0, kTwoPi, fu, opt.order);
      const Rule1D r2 = composite_rule(0.0, kTwoPi, fv, opt.order);
      total += tensor_integral(r1, r2, [&](double a, double b) { return g(Vec2(a, b)); }, opt.threads);
    }
  }
  for (const Bump& b : bumps) {
    auto g = [&](const Vec2& x) {
      const double w = bump((x - b.disk.center).norm() / b.support);
      return w == 0.0 ? 0.0 : w * f(b.disk.chart, sphere ? x : atlas.wrap(x));
    };
    total += polar_integral(g, b.disk.center, b.disk.radius, b.support, opt.order, opt.threads);
  }
  return total;
}

double boundary_circle_integral(const BaseOneForm& f, int chart, const Vec2& center, double radius,
                                int order) {
  return integrate(
      [&](double phi) {
        const Vec2 u(std::cos(phi), std::sin(phi));
        const Vec2 w = f(chart, center + radius * u);
        return radius * (-w(0) * u(1) + w(1) * u(0));
      },
      0.0, kTwoPi, order);
}

double fiber_integral(const std::function<double(double)>& dtheta_coefficient, int order) {
  return integrate(dtheta_coefficient, 0.0, kTwoPi, order);
}

Extrapolation extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& v) {
  if (h.size() != v.size() || h.empty())
    throw Error(ErrorKind::Validation, "extrapolation needs matching non-empty samples");
  auto neville = [&](std::size_t first) {
    std::vector<double> p(v.begin() + first, v.end());
    const std::size_t n = p.size();
    for (std::size_t m = 1; m < n; ++m)
      for (std::size_t i = 0; i + m < n; ++i) {
        const double hi = h[first + i], hj = h[first + i + m];
        p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
      }
    return p[0];
  };
  Extrapolation e;
  e.value = neville(0);
  e.error_estimate = h.size() > 1 ? std::abs(e.value - neville(1)) : 0.0;
  return e;
}

}  // namespace fgbc
