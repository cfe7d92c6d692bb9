#include "fgbc/chern_forms.hpp"

#include <cmath>
#include <numbers>

#include "fgbc/gauss.hpp"

namespace fgbc {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) { return std::tgamma(n + 1.0); }

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

// 1/2 sum_{a,b < n} Omega_a^b e_a ^ e_b (indices restricted to the
// orthogonal complement of e_n).
BigradedElement tangential_bivector(const SkewMatrixValuedForm& Omega) {
  const int n = Omega.rank();
  BigradedElement r(n, Omega.form_dim());
  for (int a = 0; a < n - 1; ++a)
    for (int b = 0; b < n - 1; ++b) {
      if (a == b) continue;
      const int idx[2] = {a + 1, b + 1};
      r += BigradedElement::tensor(Omega(a, b), idx, n) * 0.5;
    }
  return r;
}

void check_pair(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi) {
  if (Omega.rank() != varpi.rank()) throw Error(ErrorKind::Structural, "rank mismatch");
  if (Omega.form_dim() != varpi.form_dim())
    throw Error(ErrorKind::Structural, "form dimension mismatch");
}

}  // namespace

PointwiseForm phi_k(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi, int k) {
  check_pair(Omega, varpi);
  const int n = Omega.rank();
  const int m = n - 1 - 2 * k;
  if (k < 0 || m < 0) throw Error(ErrorKind::Validation, "Phi_k index out of range");
  // w = sum_a varpi_a^n (x) e_a
  BigradedElement w(n, varpi.form_dim());
  for (int a = 0; a < n - 1; ++a) {
    const int idx[1] = {a + 1};
    w += BigradedElement::tensor(varpi(a, n - 1), idx, n);
  }
  const BigradedElement prod = power(tangential_bivector(Omega), k) * power(w, m);
  // Omega'^k carries 2^{-k}; reordering the m odd-odd factors gives (-1)^{m(m-1)/2}.
  const double scale = std::ldexp(1.0, k) * (((m * (m - 1) / 2) % 2) ? -1.0 : 1.0);
  const Mask top = (Mask{1} << (n - 1)) - 1;
  ComplexForm c(varpi.form_dim());
  for (const auto& [key, v] : prod.terms())
    if (key.second == top) c[key.first] += v;
  return real_part(c) * scale;
}

double pi_coefficient(int n, int k) {
  const double sign = ((n - 1 + k) % 2) ? -1.0 : 1.0;
  return sign / std::pow(kPi, 0.5 * n) * std::tgamma(0.5 * (n - 2 * k)) /
         (factorial(k) * factorial(n - 1 - 2 * k) * std::ldexp(1.0, 2 * k + 1));
}

double pi_coefficient_closed(int n, int k) {
  if (n % 2 == 0) {
    const int p = n / 2;
    const double sign = (k % 2) ? 1.0 : -1.0;
    return sign / (std::pow(2.0 * kPi, p) * double_factorial(2 * p - 2 * k - 1) * factorial(k) *
                   std::ldexp(1.0, k));
  }
  const int p = (n - 1) / 2;
  const double sign = (k % 2) ? -1.0 : 1.0;
  const double binom = factorial(p) / (factorial(k) * factorial(p - k));
  return sign * binom / (std::pow(kPi, p) * std::ldexp(1.0, 2 * p + 1) * factorial(p));
}

PointwiseForm pi_form(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi) {
  const int n = Omega.rank();
  PointwiseForm r(Omega.form_dim());
  for (int k = 0; 2 * k <= n - 1; ++k) r += phi_k(Omega, varpi, k) * pi_coefficient(n, k);
  return r;
}

PointwiseForm omega_pfaffian(const SkewMatrixValuedForm& Omega) {
  const int n = Omega.rank();
  if (n % 2) return PointwiseForm(Omega.form_dim());
  return real_part(pfaffian(Omega)) / std::pow(2.0 * kPi, 0.5 * n);
}

PointwiseForm upsilon1(const SkewMatrixValuedForm& varpi) {
  const int n = varpi.rank();
  SkewMatrixValuedForm zero(n, varpi.form_dim());
  const double sign = (n % 2) ? 1.0 : -1.0;
  const double c = sign * std::tgamma(0.5 * n) / (2.0 * std::pow(kPi, 0.5 * n) * factorial(n - 1));
  return phi_k(zero, varpi, 0) * c;
}

PointwiseForm upsilon2(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi) {
  const int n = Omega.rank();
  PointwiseForm r(Omega.form_dim());
  for (int k = 1; 2 * k <= n - 1; ++k) r += phi_k(Omega, varpi, k) * pi_coefficient(n, k);
  return r;
}

PointwiseForm chern_weil_upsilon0(const SkewMatrixValuedForm& delta,
                                  const std::function<SkewMatrixValuedForm(double)>& omega_s,
                                  int order) {
  const int n = delta.rank();
  const BigradedElement d = delta.to_bivector();
  // B(Omega_s^k . d) needs fibre degree 2k + 2 = n.
  const bool needs_curvature = n >= 4;
  ComplexForm acc(delta.form_dim());
  const GaussRule& rule = gauss_legendre(order);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = 0.5 * (rule.nodes[i] + 1.0);
    BigradedElement e = BigradedElement::scalar(n, delta.form_dim(), 1.0);
    if (needs_curvature) e = exp_truncated(-omega_s(s).to_bivector());
    acc += berezin(e * d) * Complex(0.5 * rule.weights[i]);
  }
  return real_part(acc) / std::pow(2.0 * kPi, 0.5 * n);
}

PointwiseForm frak_e(const PointwiseForm& d_upsilon0, const PointwiseForm& dlog_v,
                     const PointwiseForm& upsilon_1, const PointwiseForm& d_upsilon2) {
  return -d_upsilon0 - wedge(dlog_v, upsilon_1) - d_upsilon2;
}

BigradedElement nabla_ell(const SkewMatrixValuedForm& varpi) {
  const int n = varpi.rank();
  BigradedElement r(n, varpi.form_dim());
  for (int a = 0; a < n; ++a) {
    if (a == n - 1) continue;
    const int idx[1] = {a + 1};
    r += BigradedElement::tensor(varpi(n - 1, a), idx, n);
  }
  return r;
}

MathaiQuillenState mathai_quillen_Ut(double t, const BigradedElement& grad_l,
                                     const BigradedElement& Omega) {
  grad_l.check_compatible(Omega);
  MathaiQuillenState st;
  st.t = t;
  const Complex it(0.0, t);
  const BigradedElement nil = grad_l * it + Omega;
  st.Theta = nil + BigradedElement::scalar(Omega.rank(), Omega.form_dim(), 0.5 * t * t);
  // The Gaussian factor is split off so that large t cannot overflow the series.
  st.U = berezin(exp_truncated(-nil)) * Complex(std::exp(-0.5 * t * t));
  return st;
}

ComplexForm mq_transgression(double t, const BigradedElement& grad_l,
                             const BigradedElement& Omega) {
  const int n = Omega.rank();
  const BigradedElement nil = grad_l * Complex(0.0, t) + Omega;
  const int idx[1] = {n};
  const BigradedElement ell =
      BigradedElement::tensor(ComplexForm::scalar(Omega.form_dim(), 1.0), idx, n);
  return berezin(ell * exp_truncated(-nil)) * Complex(std::exp(-0.5 * t * t));
}

BigradedElement xi_closed_form(double t, const BigradedElement& grad_l,
                               const BigradedElement& Omega) {
  const int n = Omega.rank();
  BigradedElement r(n, Omega.form_dim());
  const BigradedElement tl = grad_l * Complex(t);
  for (int k = 0; 2 * k <= n - 1; ++k) {
    const int m = n - 1 - 2 * k;
    r += power(tl, m) * power(Omega, k) * Complex(1.0 / (factorial(k) * factorial(m)));
  }
  return r * std::pow(Complex(0.0, -1.0), n - 1);
}

}  // namespace fgbc
