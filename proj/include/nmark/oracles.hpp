// oracles.hpp — independent reference computations the tests compare against
//
// Nothing here calls into the nmark closed forms; each oracle re-derives its value
// from the defining integral or ODE.

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "nmark/model.hpp"

namespace nmark::oracle {

using cplx = std::complex<double>;

/// Cross correlation by direct quadrature of
///   int dw J(w) sin(w d)/(w d) e^{-i (w - omega0) t}
/// over the whole real line (Lorentzian extended to negative w). Truncated at
/// |w - omega0| = cutoff.
cplx f2_quadrature(double t, const CavityParams& p, double cutoff = 1e4);

/// Plain bisection for a sign change of f on [a, b].
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-13);

/// First n zeros of lambda + |Omega| cot(|Omega| t / 2) (Omega imaginary), found by
/// bisection inside each cot branch.
std::vector<double> cot_denominator_roots(double lambda, double omega_abs, int n);

/// Amplitude of r' = -kappa int_0^t e^{-lambda (t-s)} r(s) ds, r(0) = 1: solves
/// r'' + lambda r' + kappa r = 0 with complex arithmetic.
struct Amplitude {
    cplx r;
    cplx rdot;
};
Amplitude exponential_kernel_amplitude(double t, double lambda, double kappa);

/// gamma = -2 Re(r'/r) for the kernel above.
double exponential_kernel_gamma(double t, double lambda, double kappa);

/// int over one period [tau_i, T] of sqrt(g0), g0 = (8 gamma0^2 / 3)[1/(lambda + |Omega2| cot(|Omega2| s/2))]^-,
/// with tau_i = T [1 - arccot(lambda/|Omega2|)/pi]. tanh-sinh handles the 1/sqrt edge.
double I0_numeric(const CavityParams& p);

/// Adaptive Gauss-Kronrod integral of a smooth function.
double integrate(const std::function<double(double)>& f, double a, double b);

}  // namespace nmark::oracle
