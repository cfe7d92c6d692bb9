#pragma once

// Characteristic and transgression forms of a modified metric-compatible
// connection, evaluated pointwise. Inputs are orthonormal-frame connection
// and curvature forms (rank n <= 4) over a cotangent space of any dimension.

#include <functional>

#include "fgbc/algebra.hpp"

namespace fgbc {

/// Phi_k = sum eps_{a_1..a_{n-1}} Omega_{a1}^{a2} ^ ... ^ Omega_{a_{2k-1}}^{a_{2k}}
///         ^ varpi_{a_{2k+1}}^n ^ ... ^ varpi_{a_{n-1}}^n,
/// evaluated as a Berezin-type coefficient in the bigraded algebra.
PointwiseForm phi_k(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi, int k);

/// Coefficient of Phi_k in Pi from the gamma-function expression.
double pi_coefficient(int n, int k);
/// The same coefficient from the closed (2 pi)-normalised display
/// (double factorials for even n, binomials for odd n).
double pi_coefficient_closed(int n, int k);

/// Pi = sum_k pi_coefficient(n, k) Phi_k.
PointwiseForm pi_form(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi);

/// (2 pi)^{-n/2} Pf(-Omega); zero for odd n.
PointwiseForm omega_pfaffian(const SkewMatrixValuedForm& Omega);

/// Upsilon_1 = (-1)^{n-1} Gamma(n/2) / (2 pi^{n/2} (n-1)!) Phi_0.
PointwiseForm upsilon1(const SkewMatrixValuedForm& varpi);
/// Upsilon_2 = Pi - Upsilon_1 (the k >= 1 terms).
PointwiseForm upsilon2(const SkewMatrixValuedForm& Omega, const SkewMatrixValuedForm& varpi);

/// Upsilon_0 = int_0^1 (2 pi)^{-n/2} B(exp(-Omega_s) . dD_s/ds) ds with
/// dD_s/ds = varpi^nabla - varpi^D. `omega_s` is only consulted when a
/// curvature power can reach the top fibre degree (n >= 4).
PointwiseForm chern_weil_upsilon0(const SkewMatrixValuedForm& delta,
                                  const std::function<SkewMatrixValuedForm(double)>& omega_s,
                                  int order = 8);

/// E = -dUpsilon_0 - dlog V ^ Upsilon_1 - dUpsilon_2.
PointwiseForm frak_e(const PointwiseForm& d_upsilon0, const PointwiseForm& dlog_v,
                     const PointwiseForm& upsilon_1, const PointwiseForm& d_upsilon2);

// ---------------------------------------------------------------------------
// Mathai-Quillen family

/// grad l = varpi_n^a (x) e_a in A^{1,1}.
BigradedElement nabla_ell(const SkewMatrixValuedForm& varpi);

struct MathaiQuillenState {
  double t = 0.0;
  BigradedElement Theta{2, 0};  // t^2/2 + i t grad l + Omega
  ComplexForm U{0};             // B(exp(-Theta_t))
};

MathaiQuillenState mathai_quillen_Ut(double t, const BigradedElement& grad_l,
                                     const BigradedElement& Omega);

/// B(l . exp(-Theta_t)) with l = 1 (x) e_n.
ComplexForm mq_transgression(double t, const BigradedElement& grad_l,
                             const BigradedElement& Omega);

/// Closed form of the A^{n-1,n-1} component of exp(-(i t grad l + Omega)):
/// (-i)^{n-1} sum_k (t grad l)^{n-1-2k} Omega^k / (k! (n-1-2k)!).
BigradedElement xi_closed_form(double t, const BigradedElement& grad_l,
                               const BigradedElement& Omega);

}  // namespace fgbc
