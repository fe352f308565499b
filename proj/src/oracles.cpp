// oracles.cpp — reference quadratures and root finders for the test suite

#include "nmark/oracles.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <stdexcept>

namespace nmark::oracle {

namespace {
constexpr double kPi = boost::math::constants::pi<double>();

double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}
}  // namespace

cplx f2_quadrature(double t, const CavityParams& p, double cutoff) {
    using boost::math::quadrature::gauss;
    const double pref = p.gamma0 * p.gamma0 * p.lambda / (2.0 * kPi);
    auto f = [&](double x) -> cplx {
        const double w = p.omega0 + x;
        return pref / (x * x + p.lambda * p.lambda) * sinc(w * p.d) * std::exp(cplx(0.0, -x * t));
    };
    // Breakpoints: geometric through the Lorentzian core, then about a quarter of the
    // fastest oscillation period, so a 20-point Gauss rule per panel is converged.
    std::vector<double> cuts{0.0};
    for (double x = p.lambda / 16.0; x < 1.0; x *= 1.5) cuts.push_back(x);
    const double h = std::min(0.25, 0.5 * kPi / (t + p.d + 1.0));
    for (double x = 1.0; x < cutoff; x += h) cuts.push_back(x);
    cuts.push_back(cutoff);

    cplx sum = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double a = cuts[k], b = cuts[k + 1];
        sum += gauss<double, 20>::integrate(f, a, b);
        sum += gauss<double, 20>::integrate(f, -b, -a);
    }
    return sum;
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol) {
    double fa = f(a);
    const double fb = f(b);
    if (fa * fb > 0.0) throw std::invalid_argument("bisect: no sign change");
    while (b - a > tol * std::max(1.0, std::abs(a))) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> cot_denominator_roots(double lambda, double omega_abs, int n) {
    const double T = 2.0 * kPi / omega_abs;
    auto D = [&](double t) { return lambda + omega_abs / std::tan(0.5 * omega_abs * t); };
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        // cot branch (kT, (k+1)T): +inf -> -inf
        const double a = k * T + 1e-9 * T, b = (k + 1) * T - 1e-9 * T;
        out.push_back(bisect(D, a, b));
    }
    return out;
}

Amplitude exponential_kernel_amplitude(double t, double lambda, double kappa) {
    // characteristic roots s = (-lambda +- Omega)/2
    const cplx Om = std::sqrt(cplx(lambda * lambda - 4.0 * kappa, 0.0));
    if (std::abs(Om) < 1e-12) {
        const double e = std::exp(-0.5 * lambda * t);
        return {e * (1.0 + 0.5 * lambda * t), -kappa * t * e};
    }
    const cplx s1 = 0.5 * (-lambda + Om), s2 = 0.5 * (-lambda - Om);
    // r = A e^{s1 t} + B e^{s2 t}, A + B = 1, A s1 + B s2 = 0
    const cplx A = -s2 / (s1 - s2), B = s1 / (s1 - s2);
    const cplx e1 = std::exp(s1 * t), e2 = std::exp(s2 * t);
    return {A * e1 + B * e2, A * s1 * e1 + B * s2 * e2};
}

double exponential_kernel_gamma(double t, double lambda, double kappa) {
    const auto a = exponential_kernel_amplitude(t, lambda, kappa);
    return -2.0 * std::real(a.rdot / a.r);
}

double I0_numeric(const CavityParams& p) {
    const double l = p.lambda, g0 = p.gamma0;
    const double w = std::sqrt(4.0 * g0 * g0 - l * l);
    const double T = 2.0 * kPi / w;
    const double ti = T * (1.0 - std::atan(w / l) / kPi);  // arccot(x) = atan(1/x)
    auto root_g = [&](double s) {
        const double den = l + w / std::tan(0.5 * w * s);
        const double gamma1 = 4.0 * g0 * g0 / den;
        const double neg = 0.5 * (std::abs(gamma1) - gamma1);
        return std::sqrt(2.0 / 3.0 * neg);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(root_g, ti, T);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, 1e-14);
}

}  // namespace nmark::oracle
