// kernels.cpp — closed-form correlation functions of the Lorentzian cavity

#include "nmark/kernels.hpp"

#include <cmath>
#include <numbers>

#include "nmark/errors.hpp"

namespace nmark {

KernelId KernelId::channel(int m) {
    if (m != 1 && m != 2) throw Error(Errc::DomainError, "channel index must be 1 or 2");
    return {Kind::K, m};
}

double spectral_density(double omega, const CavityParams& p) noexcept {
    const double dw = omega - p.omega0;
    return p.gamma0 * p.gamma0 * p.lambda / (2.0 * std::numbers::pi * (dw * dw + p.lambda * p.lambda));
}

cplx f1(double t, const CavityParams& p) noexcept {
    return {0.5 * p.gamma0 * p.gamma0 * std::exp(-p.lambda * t), 0.0};
}

F2Coefficients f2_coefficients(const CavityParams& p) {
    if (p.d == 0.0) throw Error(Errc::DomainError, "f2 at d = 0 coincides with f1");
    if (p.infinite_distance()) return {};
    const double g2 = p.gamma0 * p.gamma0;
    const double d = p.d;
    const cplx a{p.lambda, p.omega0};   // lambda + i omega0
    const cplx b{p.lambda, -p.omega0};  // lambda - i omega0
    const cplx phase = std::exp(cplx{0.0, p.omega0 * d});
    F2Coefficients c;
    c.A = g2 * (phase - std::exp(-2.0 * p.lambda * d) / phase) / (4.0 * d * a);
    c.P = -g2 * std::exp(-a * d) / (4.0 * d * a);
    c.Q = -g2 * phase / (4.0 * d * b);
    c.R = g2 * 2.0 * p.lambda / (4.0 * d * (p.omega0 * p.omega0 + p.lambda * p.lambda));
    return c;
}

cplx f2(double t, const CavityParams& p) {
    if (p.infinite_distance()) return {0.0, 0.0};
    const auto c = f2_coefficients(p);
    const cplx outer = c.A * std::exp(-p.lambda * (t - p.d));
    if (t > p.d) return outer;
    const cplx inner = c.P * std::exp(-p.lambda * t) + c.Q * std::exp(p.lambda * (t - p.d)) +
                       c.R * std::exp(cplx{0.0, p.omega0 * t});
    if (t < p.d) return inner;
    return 0.5 * (inner + outer);
}

cplx kernel(KernelId id, double t, const CavityParams& p) {
    switch (id.kind) {
        case KernelId::Kind::F1: return f1(t, p);
        case KernelId::Kind::F2:
            return p.coincident() ? f1(t, p) : f2(t, p);
        case KernelId::Kind::K: {
            if (id.m != 1 && id.m != 2) throw Error(Errc::DomainError, "channel index must be 1 or 2");
            const double sign = id.m == 1 ? 1.0 : -1.0;
            if (p.coincident()) return id.m == 1 ? 2.0 * f1(t, p) : cplx{0.0, 0.0};
            return f1(t, p) + sign * f2(t, p);
        }
    }
    return {0.0, 0.0};
}

ChannelKernel::ChannelKernel(int m, const CavityParams& p) : p_(p) {
    if (m != 1 && m != 2) throw Error(Errc::DomainError, "channel index must be 1 or 2");
    const double half = 0.5 * p.gamma0 * p.gamma0;
    if (p.coincident()) {
        kappa_ = m == 1 ? 2.0 * half : 0.0;
    } else {
        kappa_ = half;
        if (!p.infinite_distance()) {
            sign_ = m == 1 ? 1.0 : -1.0;
            windowed_ = true;
            c_ = f2_coefficients(p);
        }
    }
}

cplx ChannelKernel::operator()(double tau) const noexcept {
    cplx k{kappa_ * std::exp(-p_.lambda * tau), 0.0};
    if (!windowed_) return k;
    const double d = p_.d;
    const cplx outer = c_.A * std::exp(-p_.lambda * (tau - d));
    if (tau > d) return k + sign_ * outer;
    const cplx inner = c_.P * std::exp(-p_.lambda * tau) + c_.Q * std::exp(p_.lambda * (tau - d)) +
                       c_.R * std::exp(cplx{0.0, p_.omega0 * tau});
    if (tau < d) return k + sign_ * inner;
    return k + sign_ * 0.5 * (inner + outer);
}

}  // namespace nmark
