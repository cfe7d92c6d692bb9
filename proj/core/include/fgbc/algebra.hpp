#pragma once

// Bigraded algebra A = sum A^{i,j} of (form degree i) x (fibre degree j)
// elements over a point, with the Berezin integral, the Pfaffian and
// truncated exponentials.
//
// Multi-indices are stored as bit masks: bit k set means index k+1 is
// present, so a mask is automatically an increasing multi-index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "fgbc/error.hpp"

namespace fgbc {

using Complex = std::complex<double>;
using Mask = std::uint32_t;

inline int degree(Mask m) { return __builtin_popcount(m); }

/// (-1)^(number of pairs p in a, q in b with p > q): the sign picked up when
/// the wedge of the increasing index sets a and b is reordered. Returns 0 if
/// the sets intersect.
int merge_sign(Mask a, Mask b);

/// Parity of an index list (1-based indices) computed by counting the swaps
/// of an insertion sort. Returns the increasing mask and the sign, or sign 0
/// if an index repeats.
std::pair<Mask, int> sort_indices(std::span<const int> indices);

/// Differential form at a single point of a `dim`-dimensional chart. Mixed
/// degrees are allowed; coefficients are indexed by the mask of dxi's.
template <typename Scalar>
class BasicForm {
 public:
  explicit BasicForm(int dim = 3) : dim_(dim), c_(std::size_t{1} << dim, Scalar{}) {
    if (dim < 0 || dim > 10) throw Error(ErrorKind::Structural, "form dimension out of range");
  }

  static BasicForm basis(int dim, Mask m, Scalar c = Scalar{1}) {
    BasicForm f(dim);
    f[m] = c;
    return f;
  }
  static BasicForm scalar(int dim, Scalar c) { return basis(dim, 0, c); }
  /// One-form sum_a c[a] dxi^a.
  static BasicForm one_form(std::span<const Scalar> c) {
    BasicForm f(static_cast<int>(c.size()));
    for (std::size_t a = 0; a < c.size(); ++a) f[Mask{1} << a] = c[a];
    return f;
  }

  int dim() const { return dim_; }
  std::size_t size() const { return c_.size(); }
  const Scalar& operator[](Mask m) const { return c_[m]; }
  Scalar& operator[](Mask m) { return c_[m]; }

  BasicForm& operator+=(const BasicForm& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  BasicForm& operator-=(const BasicForm& o) {
    check(o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  BasicForm& operator*=(Scalar s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend BasicForm operator+(BasicForm a, const BasicForm& b) { return a += b; }
  friend BasicForm operator-(BasicForm a, const BasicForm& b) { return a -= b; }
  friend BasicForm operator-(BasicForm a) { return a *= Scalar{-1}; }
  friend BasicForm operator*(BasicForm a, Scalar s) { return a *= s; }
  friend BasicForm operator*(Scalar s, BasicForm a) { return a *= s; }
  friend BasicForm operator/(BasicForm a, Scalar s) { return a *= Scalar{1} / s; }

  friend BasicForm wedge(const BasicForm& a, const BasicForm& b) {
    a.check(b);
    BasicForm r(a.dim_);
    for (Mask i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == Scalar{}) continue;
      for (Mask j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j] == Scalar{} || (i & j)) continue;
        r.c_[i | j] += static_cast<double>(merge_sign(i, j)) * a.c_[i] * b.c_[j];
      }
    }
    return r;
  }

  /// Homogeneous part of degree k.
  BasicForm degree_part(int k) const {
    BasicForm r(dim_);
    for (Mask i = 0; i < c_.size(); ++i)
      if (degree(i) == k) r.c_[i] = c_[i];
    return r;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : c_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  void check(const BasicForm& o) const {
    if (o.dim_ != dim_) throw Error(ErrorKind::Structural, "form dimension mismatch");
  }

  int dim_;
  std::vector<Scalar> c_;
};

using PointwiseForm = BasicForm<double>;
using ComplexForm = BasicForm<Complex>;

/// Real part of a complex form; throws if the imaginary residue exceeds tol.
PointwiseForm real_part(const ComplexForm& f, double tol = 1e-10);
ComplexForm complexify(const PointwiseForm& f);

/// Element of the bigraded algebra of a rank-n fibre over a form_dim-dimensional
/// cotangent space: sparse map (form mask, fibre mask) -> complex coefficient.
class BigradedElement {
 public:
  using Key = std::pair<Mask, Mask>;

  BigradedElement(int rank, int form_dim);

  static BigradedElement scalar(int rank, int form_dim, Complex c);
  static BigradedElement term(int rank, int form_dim, Mask form, Mask fiber, Complex c = 1.0);
  /// omega (x) e_{i1} ^ ... ^ e_{ik} for an arbitrary (possibly unsorted) index list.
  static BigradedElement tensor(const ComplexForm& omega, std::span<const int> fiber_indices,
                                int rank);
  static BigradedElement tensor(const PointwiseForm& omega, std::span<const int> fiber_indices,
                                int rank);

  int rank() const { return rank_; }
  int form_dim() const { return form_dim_; }
  const std::map<Key, Complex>& terms() const { return terms_; }

  Complex coefficient(Mask form, Mask fiber) const;
  void add(Mask form, Mask fiber, Complex c);
  bool is_zero(double tol = 0.0) const;
  double max_abs() const;

  BigradedElement& operator+=(const BigradedElement& o);
  BigradedElement& operator-=(const BigradedElement& o);
  BigradedElement& operator*=(Complex s);
  friend BigradedElement operator+(BigradedElement a, const BigradedElement& b) { return a += b; }
  friend BigradedElement operator-(BigradedElement a, const BigradedElement& b) { return a -= b; }
  friend BigradedElement operator-(BigradedElement a) { return a *= -1.0; }
  friend BigradedElement operator*(BigradedElement a, Complex s) { return a *= s; }
  friend BigradedElement operator*(Complex s, BigradedElement a) { return a *= s; }

  /// (a (x) b)(c (x) d) = (-1)^{deg b * deg c} (a ^ c) (x) (b ^ d).
  friend BigradedElement operator*(const BigradedElement& a, const BigradedElement& b);

  void check_compatible(const BigradedElement& o) const;

 private:
  int rank_;
  int form_dim_;
  std::map<Key, Complex> terms_;
};

BigradedElement bigraded_product(const BigradedElement& a, const BigradedElement& b);
BigradedElement power(const BigradedElement& a, int k);

/// Berezin integral: coefficient form of the top fibre multivector e_1^...^e_n.
ComplexForm berezin(const BigradedElement& a);

/// Projection onto A^{i,j}.
BigradedElement component(const BigradedElement& a, int form_degree, int fiber_degree);

/// exp(a) = e^{c} * sum_k (a - c)^k / k!, where c is the scalar part of a.
/// Terms of total bidegree above max_total_degree are dropped; a negative value
/// keeps everything (the series then terminates by nilpotency).
BigradedElement exp_truncated(const BigradedElement& a, int max_total_degree = -1);

/// n x n matrix of forms, antisymmetric in (i, j), e.g. a curvature Omega_i^j
/// in an orthonormal frame.
class SkewMatrixValuedForm {
 public:
  SkewMatrixValuedForm(int rank, int form_dim);
  /// Validates antisymmetry to `tol`; throws a validation error otherwise.
  SkewMatrixValuedForm(std::vector<std::vector<PointwiseForm>> entries, double tol = 1e-12);

  int rank() const { return rank_; }
  int form_dim() const { return form_dim_; }
  const PointwiseForm& operator()(int i, int j) const { return entries_[i][j]; }
  /// Sets entry (i, j) and (j, i) = -value.
  void set(int i, int j, const PointwiseForm& value);

  /// 1/2 sum_{i,j} Omega_i^j (x) e_i ^ e_j.
  BigradedElement to_bivector() const;

 private:
  int rank_;
  int form_dim_;
  std::vector<std::vector<PointwiseForm>> entries_;
};

/// Pf(-Omega) = B(exp(-Omega)) with Omega identified with a bivector.
/// Identically zero for odd rank.
ComplexForm pfaffian(const SkewMatrixValuedForm& omega);

}  // namespace fgbc
