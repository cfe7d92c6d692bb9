#pragma once

// Vector fields with isolated zeros on the built-in surfaces: zero finding,
// local degrees by angle accumulation, Poincare-Hopf bookkeeping and the
// induced section x -> (x, theta(x)) of the sphere bundle.

#include <functional>
#include <string>
#include <vector>

#include "fgbc/dual.hpp"
#include "fgbc/manifolds.hpp"

namespace fgbc {

using Dual2 = ad::Dual<double, 2>;

/// Chart-local vector field, evaluated on first-order duals so that the
/// Jacobian comes for free.
struct SectionField {
  using Fn = std::function<Vec2T<Dual2>(int chart, const Vec2T<Dual2>& x)>;

  std::string name;
  Fn fn;
  std::vector<ChartPoint> seeds;  // known zeros, used as extra Newton starts

  Vec2 operator()(int chart, const Vec2& x) const;
  /// J(i, a) = d X^i / d x^a.
  Mat2 jacobian(int chart, const Vec2& x, Vec2* value = nullptr) const;
};

struct ZeroRecord {
  int chart = 0;
  Vec2 location = Vec2::Zero();
  int degree = 0;
  std::vector<double> epsilon_schedule;
  bool resolved = false;
  double residual = 0.0;  // |X| at the refined location
};

struct ZeroSearchOptions {
  int grid_density = 64;      // nodes per direction per chart
  double tolerance = 1e-12;   // Newton target for |X|
  int max_iterations = 200;
  double degree_radius = 0.05;
};

/// Grid scan for local minima of |X|, Newton refinement, deduplication and a
/// local degree for every resolved zero. Candidates whose Newton iteration
/// does not converge are returned with resolved = false.
std::vector<ZeroRecord> find_zeros(const Atlas& atlas, const SectionField& X,
                                   const ZeroSearchOptions& opt = {});

/// Total angle swept by X / |X| along the counter-clockwise circle, in turns.
/// Samples are doubled until every increment is below pi / 2.
double winding_number(const SectionField& X, int chart, const Vec2& center, double radius,
                      int samples = 256);

/// Integer winding number; throws a topology error if X vanishes on the
/// circle or the winding is not an integer after snapping.
int local_degree(const SectionField& X, int chart, const Vec2& center, double radius,
                 int samples = 256);

int poincare_hopf_sum(const std::vector<ZeroRecord>& zeros);

/// theta(x) = angle of X(x) in the chart fibre and its differential.
struct InducedSection {
  double theta = 0.0;
  Vec2 dtheta = Vec2::Zero();
};
InducedSection induced_section(const SectionField& X, int chart, const Vec2& x);

/// Built-in fields. On the sphere each field is given by a complex function
/// of the chart-0 coordinate z; chart 1 carries its pushforward under
/// w = 1 / z, X_w = -w^2 X_z.
///
///   rotational            X_z = i z           zeros: both poles, degree +1 each
///   height_gradient       X_z = z             same zeros and degrees
///   stereographic_power k X_z = z^k, k in {0, 1, 2}; zeros of degree k and 2 - k
///   stereographic_power -1  X_z = conj(z) / (1 + |z|^2)^2; degree -1 and +3
///   constant (torus)      X = (a, b)
///   custom                X = (expr_u, expr_v) in chart 0 (sphere) or the torus chart
struct VectorFieldSpec {
  std::string type = "rotational";
  int power = 1;
  Vec2 direction{1.0, 0.0};
  std::string expr_u;
  std::string expr_v;
};

/// Parses `rotational`, `height_gradient`, `constant`, `constant(a,b)`,
/// `stereographic_power(k)` and `custom(expr_u; expr_v)`.
VectorFieldSpec parse_vector_field(const std::string& id);
SectionField make_vector_field(const Atlas& atlas, const VectorFieldSpec& spec);

}  // namespace fgbc
