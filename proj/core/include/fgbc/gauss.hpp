#pragma once

#include <vector>

namespace fgbc {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess;
/// rules are cached per order.
const GaussRule& gauss_legendre(int order);

/// Integral of f over [a, b] with `panels` equal panels of the given order.
template <typename F>
double integrate(F&& f, double a, double b, int order, int panels = 1) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

/// Pairwise (cascade) summation; the result does not depend on how the
/// input was produced, only on its order.
double pairwise_sum(const double* v, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace fgbc
