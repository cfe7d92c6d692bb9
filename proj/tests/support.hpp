#pragma once

#include <random>

#include "fgbc/algebra.hpp"

namespace fgbc::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 g(20240611);
  return g;
}

inline double uniform(double lo = -1.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

/// Random element of A^{p,q} (real coefficients), or of every bidegree when p < 0.
inline BigradedElement random_element(int rank, int form_dim, int p, int q, bool complex = false) {
  BigradedElement e(rank, form_dim);
  for (Mask f = 0; f < (Mask{1} << form_dim); ++f)
    for (Mask v = 0; v < (Mask{1} << rank); ++v) {
      if (p >= 0 && (degree(f) != p || degree(v) != q)) continue;
      e.add(f, v, Complex(uniform(), complex ? uniform() : 0.0));
    }
  return e;
}

inline PointwiseForm random_form(int dim, int k) {
  PointwiseForm f(dim);
  for (Mask m = 0; m < (Mask{1} << dim); ++m)
    if (degree(m) == k) f[m] = uniform();
  return f;
}

}  // namespace fgbc::testing
