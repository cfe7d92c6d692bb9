#include "fgbc/topology.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fgbc/expression.hpp"

namespace fgbc {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2T<Dual2> seed(const Vec2& x) {
  return {ad::variable<double, 2>(x(0), 0), ad::variable<double, 2>(x(1), 1)};
}

// Complex arithmetic on dual pairs.
struct CD {
  Dual2 re, im;
};
CD operator*(const CD& a, const CD& b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
CD operator-(const CD& a) { return {-a.re, -a.im}; }
CD inverse(const CD& a) {
  const Dual2 n = a.re * a.re + a.im * a.im;
  return {a.re / n, -a.im / n};
}
CD cpow(const CD& z, int k) {
  CD r{Dual2(1.0), Dual2(0.0)};
  for (int i = 0; i < std::abs(k); ++i) r = r * z;
  return k < 0 ? inverse(r) : r;
}

}  // namespace

Vec2 SectionField::operator()(int chart, const Vec2& x) const {
  const auto X = fn(chart, {Dual2(x(0)), Dual2(x(1))});
  return Vec2(X[0].v, X[1].v);
}

Mat2 SectionField::jacobian(int chart, const Vec2& x, Vec2* value) const {
  const auto X = fn(chart, seed(x));
  Mat2 J;
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < 2; ++a) J(i, a) = X[i].d[a];
  if (value) *value = Vec2(X[0].v, X[1].v);
  return J;
}

// ---------------------------------------------------------------------------
// Degrees

double winding_number(const SectionField& X, int chart, const Vec2& center, double radius,
                      int samples) {
  samples = std::max(samples, 256);
  for (; samples <= (1 << 20); samples *= 2) {
    double total = 0.0, prev = 0.0, first = 0.0;
    bool fine = true;
    for (int s = 0; s <= samples; ++s) {
      const double phi = 2.0 * kPi * s / samples;
      const Vec2 v = X(chart, center + radius * Vec2(std::cos(phi), std::sin(phi)));
      if (!(v.norm() > 1e-14))
        throw Error(ErrorKind::Topology,
                    fmt::format("vector field vanishes on the circle of radius {}", radius));
      const double a = std::atan2(v(1), v(0));
      if (s == 0) {
        first = prev = a;
        continue;
      }
      double inc = a - prev;
      inc -= 2.0 * kPi * std::round(inc / (2.0 * kPi));
      if (std::abs(inc) >= 0.5 * kPi) {
        fine = false;
        break;
      }
      total += inc;
      prev = a;
    }
    (void)first;
    if (fine) return total / (2.0 * kPi);
  }
  throw Error(ErrorKind::Topology, "winding number did not resolve under sample refinement");
}

int local_degree(const SectionField& X, int chart, const Vec2& center, double radius, int samples) {
  const double w = winding_number(X, chart, center, radius, samples);
  const double snapped = std::round(w);
  if (std::abs(w - snapped) > 1e-6)
    throw Error(ErrorKind::Topology, fmt::format("non-integer winding {}", w));
  return static_cast<int>(snapped);
}

int poincare_hopf_sum(const std::vector<ZeroRecord>& zeros) {
  int s = 0;
  for (const auto& z : zeros) {
    if (!z.resolved) throw Error(ErrorKind::Topology, "unresolved zero in degree sum");
    s += z.degree;
  }
  return s;
}

InducedSection induced_section(const SectionField& X, int chart, const Vec2& x) {
  Vec2 v;
  const Mat2 J = X.jacobian(chart, x, &v);
  const double n2 = v.squaredNorm();
  if (!(n2 > 1e-300)) throw Error(ErrorKind::Domain, "induced section undefined at a zero");
  InducedSection s;
  s.theta = std::atan2(v(1), v(0));
  s.dtheta = (v(0) * J.row(1) - v(1) * J.row(0)).transpose() / n2;
  return s;
}

// ---------------------------------------------------------------------------
// Zero finding

namespace {

struct Candidate {
  int chart;
  Vec2 x;
};

bool newton(const SectionField& X, const Atlas& atlas, Candidate& c, const ZeroSearchOptions& opt,
            double& residual) {
  Vec2 v;
  Mat2 J = X.jacobian(c.chart, c.x, &v);
  residual = v.norm();
  // Iterate past the tolerance while |X| keeps dropping so that degenerate
  // zeros (slow, linear convergence) still land close to the true location.
  for (int it = 0; it < opt.max_iterations && residual > 0.0; ++it) {
    Vec2 step;
    const double det = J.determinant();
    if (std::abs(det) > 1e-300) {
      step = -J.inverse() * v;
    } else {
      step = -J.transpose() * v;  // degenerate zero: fall back to gradient descent on |X|^2 / 2
      if (!(step.norm() > 0.0)) return false;
    }
    double t = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k, t *= 0.5) {
      const Vec2 trial = c.x + t * step;
      const Vec2 tv = X(c.chart, trial);
      if (tv.norm() < residual) {
        c.x = trial;
        improved = true;
        break;
      }
    }
    if (!improved || (residual < opt.tolerance && t * step.norm() < 1e-13)) break;
    // Keep the iterate in the chart where the field is best conditioned.
    if (atlas.kind() == SurfaceKind::Sphere && c.x.squaredNorm() > 4.0) {
      c.x = atlas.transition(c.chart, c.x, 1 - c.chart);
      c.chart = 1 - c.chart;
    }
    J = X.jacobian(c.chart, c.x, &v);
    residual = v.norm();
  }
  return residual < opt.tolerance;
}

}  // namespace

std::vector<ZeroRecord> find_zeros(const Atlas& atlas, const SectionField& X,
                                   const ZeroSearchOptions& opt) {
  const bool sphere = atlas.kind() == SurfaceKind::Sphere;
  const int n = std::max(8, opt.grid_density);
  std::vector<Candidate> starts;
  for (const ChartPoint& s : X.seeds) starts.push_back({s.chart, s.x});

  for (int c = 0; c < atlas.chart_count(); ++c) {
    // Cell-centred grid over [-1.1, 1.1]^2 (sphere) or the periodic box (torus).
    const double lo = sphere ? -1.1 : 0.0, hi = sphere ? 1.1 : 2.0 * kPi;
    const double h = (hi - lo) / n;
    std::vector<double> mag(n * n);
    auto node = [&](int i, int j) { return Vec2(lo + (i + 0.5) * h, lo + (j + 0.5) * h); };
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        mag[i * n + j] = X(c, node(i, j)).norm();
        scale = std::max(scale, mag[i * n + j]);
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double m = mag[i * n + j];
        if (m > 0.25 * scale) continue;
        bool is_min = true;
        for (int di = -1; di <= 1 && is_min; ++di)
          for (int dj = -1; dj <= 1; ++dj) {
            if (!di && !dj) continue;
            int a = i + di, b = j + dj;
            if (sphere) {
              if (a < 0 || b < 0 || a >= n || b >= n) continue;
            } else {
              a = (a + n) % n;
              b = (b + n) % n;
            }
            if (mag[a * n + b] < m) {
              is_min = false;
              break;
            }
          }
        if (is_min) starts.push_back({c, node(i, j)});
      }
  }

  std::vector<ZeroRecord> out;
  std::vector<Eigen::Vector3d> found;
  for (Candidate c : starts) {
    double residual = 0.0;
    const bool ok = newton(X, atlas, c, opt, residual);
    // Canonical chart: the one whose integration region contains the zero.
    const ChartPoint p = atlas.locate(atlas.embed(c.chart, c.x));
    const Eigen::Vector3d e = atlas.embed(p.chart, p.x);
    if (!ok && residual > 1e-6) continue;
    bool duplicate = false;
    for (const auto& q : found)
      if ((q - e).norm() < 1e-4) duplicate = true;
    if (duplicate) continue;
    found.push_back(e);
    ZeroRecord z;
    z.chart = p.chart;
    z.location = p.x;
    z.resolved = ok;
    z.residual = residual;
    out.push_back(z);
  }
  std::sort(out.begin(), out.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    if (a.chart != b.chart) return a.chart < b.chart;
    if (a.location(0) != b.location(0)) return a.location(0) < b.location(0);
    return a.location(1) < b.location(1);
  });

  // Degrees at a radius well inside the separation between zeros, checked
  // for stability under halving.
  for (auto& z : out) {
    if (!z.resolved) continue;
    double r = opt.degree_radius;
    for (const auto& o : out) {
      if (&o == &z) continue;
      Vec2 d;
      if (sphere) {
        if (o.chart == z.chart) d = o.location - z.location;
        else if (o.location.norm() > 0.0) d = atlas.transition(o.chart, o.location, z.chart) - z.location;
        else continue;
      } else {
        d = o.location - z.location;
        for (int i = 0; i < 2; ++i) d(i) -= 2.0 * kPi * std::round(d(i) / (2.0 * kPi));
      }
      r = std::min(r, 0.3 * d.norm());
    }
    const int d1 = local_degree(X, z.chart, z.location, r);
    const int d2 = local_degree(X, z.chart, z.location, 0.5 * r);
    if (d1 != d2) {
      z.resolved = false;
      continue;
    }
    z.degree = d1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Built-in fields

VectorFieldSpec parse_vector_field(const std::string& id) {
  VectorFieldSpec s;
  const auto open = id.find('(');
  std::string name = id.substr(0, open);
  name.erase(name.find_last_not_of(" \t") + 1);
  s.type = name;
  std::string inner;
  if (open != std::string::npos) {
    const auto close = id.rfind(')');
    if (close == std::string::npos || close < open)
      throw Error(ErrorKind::Validation, fmt::format("unbalanced parenthesis in '{}'", id));
    inner = id.substr(open + 1, close - open - 1);
  }
  const bool has_args = open != std::string::npos;
  if (name == "stereographic_power" && has_args) {
    if (inner.empty()) throw Error(ErrorKind::Validation, "stereographic_power needs an exponent");
    try {
      s.power = std::stoi(inner);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Validation, fmt::format("bad exponent in '{}'", id));
    }
  } else if (name == "constant" && !inner.empty()) {
    std::stringstream ss(inner);
    std::string a, b;
    std::getline(ss, a, ',');
    std::getline(ss, b);
    try {
      s.direction = Vec2(std::stod(a), std::stod(b));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Validation, fmt::format("bad direction in '{}'", id));
    }
  } else if (name == "custom" && has_args) {
    const auto semi = inner.find(';');
    if (semi == std::string::npos)
      throw Error(ErrorKind::Validation, "custom field needs two expressions separated by ';'");
    auto strip = [](std::string t) {
      t.erase(0, t.find_first_not_of(" \t"));
      t.erase(t.find_last_not_of(" \t") + 1);
      return t;
    };
    s.expr_u = strip(inner.substr(0, semi));
    s.expr_v = strip(inner.substr(semi + 1));
  } else if (name != "rotational" && name != "height_gradient" && name != "constant" &&
             name != "stereographic_power" && name != "custom") {
    throw Error(ErrorKind::Validation, fmt::format("unknown vector field '{}'", id));
  }
  return s;
}

SectionField make_vector_field(const Atlas& atlas, const VectorFieldSpec& spec) {
  SectionField f;
  const bool sphere = atlas.kind() == SurfaceKind::Sphere;
  const Vec2 origin = Vec2::Zero();

  if (spec.type == "custom") {
    const Expression eu = Expression::parse(spec.expr_u);
    const Expression ev = Expression::parse(spec.expr_v);
    f.name = fmt::format("custom({}; {})", spec.expr_u, spec.expr_v);
    if (!sphere) {
      f.fn = [eu, ev](int, const Vec2T<Dual2>& x) { return Vec2T<Dual2>{eu(x[0], x[1]), ev(x[0], x[1])}; };
      return f;
    }
    f.fn = [eu, ev](int chart, const Vec2T<Dual2>& x) {
      if (chart == 0) return Vec2T<Dual2>{eu(x[0], x[1]), ev(x[0], x[1])};
      const CD w{x[0], x[1]};
      if (ad::value(w.re) == 0.0 && ad::value(w.im) == 0.0)
        throw Error(ErrorKind::Domain, "custom sphere field is not defined at the north pole");
      const CD z = inverse(w);
      const CD Xz{eu(z.re, z.im), ev(z.re, z.im)};
      const CD Xw = -(w * w) * Xz;
      return Vec2T<Dual2>{Xw.re, Xw.im};
    };
    return f;
  }

  if (!sphere) {
    if (spec.type != "constant")
      throw Error(ErrorKind::Validation,
                  fmt::format("vector field '{}' is not available on the torus", spec.type));
    if (!(spec.direction.norm() > 0.0))
      throw Error(ErrorKind::Validation, "constant field must be non-zero");
    const Vec2 d = spec.direction;
    f.name = fmt::format("constant({},{})", d(0), d(1));
    f.fn = [d](int, const Vec2T<Dual2>&) { return Vec2T<Dual2>{Dual2(d(0)), Dual2(d(1))}; };
    return f;
  }

  if (spec.type == "rotational" || spec.type == "height_gradient") {
    const bool rot = spec.type == "rotational";
    f.name = spec.type;
    f.fn = [rot](int chart, const Vec2T<Dual2>& x) {
      const double s = chart == 0 ? 1.0 : -1.0;
      if (rot) return Vec2T<Dual2>{-s * x[1], s * x[0]};
      return Vec2T<Dual2>{s * x[0], s * x[1]};
    };
    f.seeds = {{0, origin}, {1, origin}};
    return f;
  }
  if (spec.type == "stereographic_power") {
    const int k = spec.power;
    if (k < -1 || k > 2)
      throw Error(ErrorKind::Validation,
                  "stereographic_power supports exponents -1, 0, 1 and 2 (smooth on the sphere)");
    f.name = fmt::format("stereographic_power({})", k);
    if (k >= 0) {
      f.fn = [k](int chart, const Vec2T<Dual2>& x) {
        const CD z{x[0], x[1]};
        const CD r = chart == 0 ? cpow(z, k) : -cpow(z, 2 - k);
        return Vec2T<Dual2>{r.re, r.im};
      };
      if (k > 0) f.seeds.push_back({0, origin});
      if (k < 2) f.seeds.push_back({1, origin});
      return f;
    }
    f.fn = [](int chart, const Vec2T<Dual2>& x) {
      const Dual2 r2 = x[0] * x[0] + x[1] * x[1];
      const Dual2 den = (1.0 + r2) * (1.0 + r2);
      if (chart == 0) return Vec2T<Dual2>{x[0] / den, -x[1] / den};
      const CD w{x[0], x[1]};
      const CD w3 = w * w * w;
      const Dual2 s = r2 / den;
      return Vec2T<Dual2>{-w3.re * s, -w3.im * s};
    };
    f.seeds = {{0, origin}, {1, origin}};
    return f;
  }
  if (spec.type == "constant")
    throw Error(ErrorKind::Validation, "the sphere admits no nowhere-vanishing constant field");
  throw Error(ErrorKind::Validation, fmt::format("unknown vector field '{}'", spec.type));
}

}  // namespace fgbc
