#pragma once

// Numerical integration on the built-in surfaces and the finite-difference
// exterior calculus on sphere-bundle charts.

#include <functional>
#include <vector>

#include "fgbc/algebra.hpp"
#include "fgbc/gauss.hpp"
#include "fgbc/manifolds.hpp"

namespace fgbc {

using Vec3 = Eigen::Vector3d;

/// Form on the sphere-bundle chart (x1, x2, theta); form dimension 3.
using FormField = std::function<PointwiseForm(int chart, const Vec3& xi)>;
/// Scalar density on a base chart (coefficient of dx1 ^ dx2).
using BaseDensity = std::function<double(int chart, const Vec2& x)>;
/// Base 1-form (coefficients of dx1, dx2).
using BaseOneForm = std::function<Vec2(int chart, const Vec2& x)>;

/// d f at xi: central differences with steps h and h/2 and Richardson
/// extrapolation on every coefficient.
PointwiseForm exterior_derivative(const FormField& f, int chart, const Vec3& xi,
                                  double h = 1e-4);
FormField exterior_derivative(FormField f, double h = 1e-4);

/// d of a form given its partial derivatives d_a f (a = 0..dim-1).
PointwiseForm exterior_derivative(const std::vector<PointwiseForm>& partials);

/// Pullback of a sphere-bundle form under x -> (x, theta(x)); returns a base
/// form of dimension 2.
PointwiseForm pullback_by_section(const PointwiseForm& f, const Vec2& dtheta);

struct ExcisedDisk {
  int chart = 0;
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
};

struct ExcisedDomain {
  const Atlas* atlas = nullptr;
  std::vector<ExcisedDisk> disks;
};

struct QuadratureOptions {
  int order = 48;       // Gauss-Legendre points per direction
  int threads = 0;      // 0: hardware concurrency
};

/// Integral of a 2-form density over M minus the disks. Disks centred at a
/// sphere chart origin are handled by polar annuli; any other disk by a
/// smooth bump partition with a polar annulus inside the bump.
double base_integral_excised(const BaseDensity& f, const ExcisedDomain& dom,
                             const QuadratureOptions& opt = {});

/// Counter-clockwise line integral of a base 1-form over a coordinate circle.
double boundary_circle_integral(const BaseOneForm& f, int chart, const Vec2& center, double radius,
                                int order = 64);

/// Integral over theta in [0, 2 pi) of the dtheta-coefficient.
double fiber_integral(const std::function<double(double)>& dtheta_coefficient, int order = 64);

/// Polynomial extrapolation of samples (h_i, v_i) to h = 0 (Neville).
struct Extrapolation {
  double value = 0.0;
  double error_estimate = 0.0;  // |difference to the next-lower-order estimate|
};
Extrapolation extrapolate_to_zero(const std::vector<double>& h, const std::vector<double>& v);

/// Evaluates f at each index in [0, n) on worker threads and returns the
/// results in index order.
std::vector<double> parallel_map(std::size_t n, const std::function<double(std::size_t)>& f,
                                 int threads = 0);

}  // namespace fgbc
