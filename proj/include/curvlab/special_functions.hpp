#pragma once

namespace curvlab {

/// phi(Phi^{-1}(x)) on [0,1]; exactly 0 at both endpoints.
double isoperimetric_I(double x);
/// I'(x) = -Phi^{-1}(x) on (0,1).
double isoperimetric_I_prime(double x);
/// I''(x) = -1 / I(x) on (0,1).
double isoperimetric_I_second(double x);

/// k(u) = u^2/2 + log of the Gaussian integral up to u, and its first two derivatives.
struct KJet {
  double k;
  double k1;
  double k2;
  double r;  // phi(u) / Phi(u)
};
KJet exp_integrability_k(double u);

/// Solves k'(u) = s for s > 0.
double exp_integrability_k_inverse(double s);

/// F(s) = integral over [0, s] of exp(k((k')^{-1}(tau))).
double exp_integrability_F(double s);
double exp_integrability_F_prime(double s);
double exp_integrability_F_second(double s);

}  // namespace curvlab
