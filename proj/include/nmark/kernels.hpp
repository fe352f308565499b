// kernels.hpp — Lorentzian cavity correlation functions and Volterra kernels

#pragma once

#include <complex>

#include "nmark/model.hpp"

namespace nmark {

using cplx = std::complex<double>;

struct KernelId {
    enum class Kind { F1, F2, K };
    Kind kind{Kind::K};
    int m{1};  // channel for Kind::K

    static KernelId f1() { return {Kind::F1, 0}; }
    static KernelId f2() { return {Kind::F2, 0}; }
    static KernelId channel(int m);
};

/// J(w) = gamma0^2 lambda / (2 pi ((w - omega0)^2 + lambda^2)); w may be negative.
double spectral_density(double omega, const CavityParams& p) noexcept;

/// (gamma0^2 / 2) exp(-lambda t).
cplx f1(double t, const CavityParams& p) noexcept;

/// Cross correlation between the atoms.
///
/// For t >= d it is a single damped exponential, for t < d it also carries a growing
/// exponential and an oscillating e^{i omega0 t} term. theta(0) = 1/2 at t = d.
/// Throws DomainError for d = 0; returns 0 for the infinite-distance sentinel.
cplx f2(double t, const CavityParams& p);

/// K_m = f1 + f2 for m = 1 and f1 - f2 for m = 2. Handles d = 0 (K1 = 2 f1, K2 = 0)
/// and d = infinity (K1 = K2 = f1).
cplx kernel(KernelId id, double t, const CavityParams& p);

/// Exponential-sum coefficients of f2, referenced to the seam so nothing overflows
/// at large d:
///   t >= d :  A e^{-lambda (t - d)}
///   t <  d :  P e^{-lambda t} + Q e^{lambda (t - d)} + R e^{i omega0 t}
struct F2Coefficients {
    cplx A, P, Q, R;
};

F2Coefficients f2_coefficients(const CavityParams& p);

/// K_m with the coefficients computed once; the solvers evaluate it millions of times.
class ChannelKernel {
public:
    ChannelKernel(int m, const CavityParams& p);

    cplx operator()(double tau) const noexcept;

    /// True when the kernel has a finite memory window (0 < d < infinity).
    bool windowed() const noexcept { return windowed_; }
    double sign() const noexcept { return sign_; }
    double f1_scale() const noexcept { return kappa_; }
    const F2Coefficients& coefficients() const noexcept { return c_; }

private:
    CavityParams p_;
    double kappa_{0.0};  // amplitude of the f1 part, doubled at d = 0
    double sign_{0.0};   // +1 or -1 in front of f2, 0 when f2 drops out
    bool windowed_{false};
    F2Coefficients c_{};
};

}  // namespace nmark
