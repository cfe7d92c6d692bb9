#include "fgbc/algebra.hpp"

#include <cmath>

namespace fgbc {

int merge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  int swaps = 0;
  // For each index q in b, count indices p in a with p > q.
  for (Mask rest = b; rest; rest &= rest - 1) {
    const Mask q = rest & (~rest + 1);
    const Mask above = ~((q << 1) - 1);
    swaps += degree(a & above);
  }
  return (swaps & 1) ? -1 : 1;
}

std::pair<Mask, int> sort_indices(std::span<const int> indices) {
  std::vector<int> v(indices.begin(), indices.end());
  int swaps = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    for (std::size_t j = i; j > 0 && v[j - 1] > v[j]; --j) {
      std::swap(v[j - 1], v[j]);
      ++swaps;
    }
  }
  Mask m = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < 1 || v[i] > 32) throw Error(ErrorKind::Validation, "index out of range");
    if (i > 0 && v[i] == v[i - 1]) return {0, 0};
    m |= Mask{1} << (v[i] - 1);
  }
  return {m, (swaps & 1) ? -1 : 1};
}

PointwiseForm real_part(const ComplexForm& f, double tol) {
  PointwiseForm r(f.dim());
  for (Mask i = 0; i < f.size(); ++i) {
    if (std::abs(f[i].imag()) > tol * std::max(1.0, std::abs(f[i].real())))
      throw Error(ErrorKind::Numerical, "imaginary residue in a form expected to be real");
    r[i] = f[i].real();
  }
  return r;
}

ComplexForm complexify(const PointwiseForm& f) {
  ComplexForm r(f.dim());
  for (Mask i = 0; i < f.size(); ++i) r[i] = f[i];
  return r;
}

BigradedElement::BigradedElement(int rank, int form_dim) : rank_(rank), form_dim_(form_dim) {
  if (rank < 1 || rank > 8) throw Error(ErrorKind::Structural, "fibre rank out of range");
  if (form_dim < 0 || form_dim > 10)
    throw Error(ErrorKind::Structural, "form dimension out of range");
}

BigradedElement BigradedElement::scalar(int rank, int form_dim, Complex c) {
  return term(rank, form_dim, 0, 0, c);
}

BigradedElement BigradedElement::term(int rank, int form_dim, Mask form, Mask fiber, Complex c) {
  BigradedElement e(rank, form_dim);
  if ((form >> form_dim) != 0 || (fiber >> rank) != 0)
    throw Error(ErrorKind::Structural, "multi-index exceeds algebra dimensions");
  e.add(form, fiber, c);
  return e;
}

BigradedElement BigradedElement::tensor(const ComplexForm& omega,
                                        std::span<const int> fiber_indices, int rank) {
  BigradedElement e(rank, omega.dim());
  const auto [fiber, sign] = sort_indices(fiber_indices);
  if (sign == 0) return e;
  if ((fiber >> rank) != 0) throw Error(ErrorKind::Structural, "fibre index exceeds rank");
  for (Mask m = 0; m < omega.size(); ++m)
    if (omega[m] != Complex{}) e.add(m, fiber, static_cast<double>(sign) * omega[m]);
  return e;
}

BigradedElement BigradedElement::tensor(const PointwiseForm& omega,
                                        std::span<const int> fiber_indices, int rank) {
  return tensor(complexify(omega), fiber_indices, rank);
}

Complex BigradedElement::coefficient(Mask form, Mask fiber) const {
  const auto it = terms_.find({form, fiber});
  return it == terms_.end() ? Complex{} : it->second;
}

void BigradedElement::add(Mask form, Mask fiber, Complex c) {
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace({form, fiber}, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

bool BigradedElement::is_zero(double tol) const { return max_abs() <= tol; }

double BigradedElement::max_abs() const {
  double m = 0.0;
  for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void BigradedElement::check_compatible(const BigradedElement& o) const {
  if (o.rank_ != rank_) throw Error(ErrorKind::Structural, "fibre rank mismatch");
  if (o.form_dim_ != form_dim_) throw Error(ErrorKind::Structural, "form dimension mismatch");
}

BigradedElement& BigradedElement::operator+=(const BigradedElement& o) {
  check_compatible(o);
  for (const auto& [key, c] : o.terms_) add(key.first, key.second, c);
  return *this;
}

BigradedElement& BigradedElement::operator-=(const BigradedElement& o) {
  check_compatible(o);
  for (const auto& [key, c] : o.terms_) add(key.first, key.second, -c);
  return *this;
}

BigradedElement& BigradedElement::operator*=(Complex s) {
  if (s == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto& [key, c] : terms_) c *= s;
  return *this;
}

BigradedElement operator*(const BigradedElement& a, const BigradedElement& b) {
  a.check_compatible(b);
  BigradedElement r(a.rank_, a.form_dim_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      if ((ka.first & kb.first) || (ka.second & kb.second)) continue;
      int sign = merge_sign(ka.first, kb.first) * merge_sign(ka.second, kb.second);
      if ((degree(ka.second) * degree(kb.first)) & 1) sign = -sign;
      r.add(ka.first | kb.first, ka.second | kb.second, static_cast<double>(sign) * ca * cb);
    }
  }
  return r;
}

BigradedElement bigraded_product(const BigradedElement& a, const BigradedElement& b) {
  return a * b;
}

BigradedElement power(const BigradedElement& a, int k) {
  BigradedElement r = BigradedElement::scalar(a.rank(), a.form_dim(), 1.0);
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

ComplexForm berezin(const BigradedElement& a) {
  ComplexForm r(a.form_dim());
  const Mask top = (Mask{1} << a.rank()) - 1;
  for (const auto& [key, c] : a.terms())
    if (key.second == top) r[key.first] += c;
  return r;
}

BigradedElement component(const BigradedElement& a, int form_degree, int fiber_degree) {
  BigradedElement r(a.rank(), a.form_dim());
  for (const auto& [key, c] : a.terms())
    if (degree(key.first) == form_degree && degree(key.second) == fiber_degree)
      r.add(key.first, key.second, c);
  return r;
}

namespace {
BigradedElement drop_above(const BigradedElement& a, int max_total_degree) {
  if (max_total_degree < 0) return a;
  BigradedElement r(a.rank(), a.form_dim());
  for (const auto& [key, c] : a.terms())
    if (degree(key.first) + degree(key.second) <= max_total_degree)
      r.add(key.first, key.second, c);
  return r;
}
}  // namespace

BigradedElement exp_truncated(const BigradedElement& a, int max_total_degree) {
  const Complex c = a.coefficient(0, 0);
  BigradedElement nilpotent = a;
  nilpotent.add(0, 0, -c);

  BigradedElement sum = BigradedElement::scalar(a.rank(), a.form_dim(), 1.0);
  BigradedElement term = sum;
  // Every term of `nilpotent` has total degree >= 1, so its k-th power
  // vanishes once k exceeds rank + form_dim.
  const int k_max = a.rank() + a.form_dim();
  for (int k = 1; k <= k_max; ++k) {
    term = drop_above(term * nilpotent, max_total_degree) * (1.0 / k);
    if (term.terms().empty()) break;
    sum += term;
  }
  return sum * std::exp(c);
}

SkewMatrixValuedForm::SkewMatrixValuedForm(int rank, int form_dim)
    : rank_(rank),
      form_dim_(form_dim),
      entries_(rank, std::vector<PointwiseForm>(rank, PointwiseForm(form_dim))) {}

SkewMatrixValuedForm::SkewMatrixValuedForm(std::vector<std::vector<PointwiseForm>> entries,
                                           double tol)
    : rank_(static_cast<int>(entries.size())),
      form_dim_(entries.empty() || entries[0].empty() ? 0 : entries[0][0].dim()),
      entries_(std::move(entries)) {
  for (int i = 0; i < rank_; ++i) {
    if (static_cast<int>(entries_[i].size()) != rank_)
      throw Error(ErrorKind::Structural, "matrix of forms is not square");
    for (int j = 0; j < rank_; ++j) {
      const double r = (entries_[i][j] + entries_[j][i]).max_abs();
      if (r > tol) throw Error(ErrorKind::Validation, "matrix of forms is not skew");
    }
  }
}

void SkewMatrixValuedForm::set(int i, int j, const PointwiseForm& value) {
  if (i == j) throw Error(ErrorKind::Validation, "diagonal of a skew matrix is zero");
  entries_[i][j] = value;
  entries_[j][i] = -value;
}

BigradedElement SkewMatrixValuedForm::to_bivector() const {
  BigradedElement r(rank_, form_dim_);
  for (int i = 0; i < rank_; ++i) {
    for (int j = 0; j < rank_; ++j) {
      if (i == j) continue;
      const int idx[2] = {i + 1, j + 1};
      r += BigradedElement::tensor(entries_[i][j], idx, rank_) * 0.5;
    }
  }
  return r;
}

ComplexForm pfaffian(const SkewMatrixValuedForm& omega) {
  // Bivector powers have even fibre degree, so odd rank yields zero.
  return berezin(exp_truncated(-omega.to_bivector()));
}

}  // namespace fgbc
