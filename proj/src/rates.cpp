// rates.cpp — master-equation coefficients from amplitudes, plus analytic rate families

#include "nmark/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "nmark/csv.hpp"
#include "nmark/errors.hpp"
#include "nmark/hermite.hpp"

namespace nmark {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool same_grid(const TimeGrid& a, const TimeGrid& b) {
    return a.nodes == b.nodes;
}

bool same_params(const CavityParams& a, const CavityParams& b) {
    return a.gamma0 == b.gamma0 && a.lambda == b.lambda && a.omega0 == b.omega0 && a.d == b.d;
}

// gamma and S from one log-derivative; a pole node gets -inf on the decay side.
void channel_rates(const AmplitudeTrajectory& tr, std::size_t i, double& gamma, double& S) {
    const auto ld = log_derivative(tr, i);
    if (ld.pole) {
        // r'/r ~ 1/(t - t*) changes sign across t*; at the node itself store the
        // divergence that points into the negative-rate side.
        gamma = -kInf;
        S = 0.0;
        return;
    }
    gamma = -2.0 * ld.value.real();
    S = -2.0 * ld.value.imag();
}

}  // namespace

std::optional<AmplitudeMinimum> amplitude_minimum(const AmplitudeTrajectory& traj, std::size_t i) {
    const auto& t = traj.grid.nodes;
    const double a = t[i], b = t[i + 1];
    auto model = [&](double s) {
        return hermite(a, b, traj.r[i], traj.r[i + 1], traj.rdot[i], traj.rdot[i + 1], s);
    };
    // Cheap rejection: a zero needs |r| small compared with what r' can cover.
    const double reach = (b - a) * std::max(std::abs(traj.rdot[i]), std::abs(traj.rdot[i + 1]));
    if (std::min(std::abs(traj.r[i]), std::abs(traj.r[i + 1])) > 2.0 * reach) return std::nullopt;

    constexpr int kSamples = 8;
    double s = a;
    double best_abs = kInf;
    for (int k = 0; k <= kSamples; ++k) {
        const double x = a + (b - a) * k / kSamples;
        const double v = std::abs(model(x).value);
        if (v < best_abs) {
            best_abs = v;
            s = x;
        }
    }
    // Gauss-Newton on |R(s)|^2.
    for (int it = 0; it < 60; ++it) {
        const auto hp = model(s);
        const double den = std::norm(hp.derivative);
        if (den == 0.0) break;
        const double next = std::clamp(s - std::real(std::conj(hp.derivative) * hp.value) / den, a, b);
        const double step = s - next;
        s = next;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(s))) break;
    }
    const auto hp = model(s);
    return AmplitudeMinimum{s, std::abs(hp.value), hp.derivative};
}

std::vector<Pole> find_amplitude_zeros(const AmplitudeTrajectory& traj) {
    std::vector<Pole> out;
    const double h_tol = 1e-9 * std::max(1.0, traj.grid.t_end);
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const auto mn = amplitude_minimum(traj, i);
        if (!mn) continue;
        // Relative to the local amplitude: the envelope decays by many decades over long
        // windows, so a global max|r| reference would flag every late node.
        const double h = traj.grid.step(i);
        const double scale = std::max({std::abs(traj.r[i]), std::abs(traj.r[i + 1]),
                                       h * std::abs(traj.rdot[i]), h * std::abs(traj.rdot[i + 1])});
        if (mn->abs >= kZeroTol * scale) continue;
        if (!out.empty() && std::abs(out.back().time - mn->time) <= h_tol) continue;
        Pole pole;
        pole.channel = traj.m;
        pole.time = mn->time;
        pole.slope = mn->derivative;
        pole.order = h * std::abs(mn->derivative) > 1e-6 * scale ? 1 : 2;
        out.push_back(pole);
    }
    return out;
}

RateTrajectory rates_from_amplitudes(const AmplitudeTrajectory& t1, const AmplitudeTrajectory& t2) {
    if (!same_grid(t1.grid, t2.grid) || !same_params(t1.params, t2.params)) {
        throw Error(Errc::GridMismatch, "channel trajectories must share grid and parameters");
    }
    if (t1.m != 1 || t2.m != 2) {
        throw Error(Errc::GridMismatch, "expected channel 1 then channel 2");
    }
    RateTrajectory out;
    out.grid = t1.grid;
    const std::size_t n = t1.size();
    out.gamma1.resize(n);
    out.gamma2.resize(n);
    out.S1.resize(n);
    out.S2.resize(n);
    out.g.resize(n);
    out.g_uc.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        channel_rates(t1, i, out.gamma1[i], out.S1[i]);
        channel_rates(t2, i, out.gamma2[i], out.S2[i]);
        out.g[i] = g_total(out.gamma1[i], out.gamma2[i]);
        const double sum = out.gamma1[i] + out.gamma2[i];
        out.g_uc[i] = std::isinf(sum) ? kInf : g_uncorrelated(out.gamma1[i], out.gamma2[i]);
    }
    out.poles = find_amplitude_zeros(t1);
    const auto p2 = find_amplitude_zeros(t2);
    out.poles.insert(out.poles.end(), p2.begin(), p2.end());
    std::sort(out.poles.begin(), out.poles.end(),
              [](const Pole& a, const Pole& b) { return a.time < b.time; });
    out.amp1 = t1;
    out.amp2 = t2;
    return out;
}

// ---------------------------------------------------------------------------

double omega_N_sq(int N, const CavityParams& p) noexcept {
    return p.lambda * p.lambda - 2.0 * N * p.gamma0 * p.gamma0;
}

double gamma_N(double t, int N, const CavityParams& p) {
    if (N < 1) throw Error(Errc::DomainError, "N must be >= 1");
    if (t <= 0.0) return 0.0;
    const double num = 2.0 * N * p.gamma0 * p.gamma0;
    const double w2 = omega_N_sq(N, p);
    if (w2 > 0.0) {
        // Omega coth(x) = Omega / tanh(x); multiply through by tanh to stay finite at t -> 0.
        const double W = std::sqrt(w2);
        const double th = std::tanh(0.5 * W * t);
        return num * th / (p.lambda * th + W);
    }
    if (w2 < 0.0) {
        // Omega = i w: Omega coth(i w t/2) = w cot(w t/2).
        const double w = std::sqrt(-w2);
        const double x = 0.5 * w * t;
        const double den = p.lambda * std::sin(x) + w * std::cos(x);
        if (den == 0.0) return std::sin(x) > 0.0 ? kInf : -kInf;
        return num * std::sin(x) / den;
    }
    // Omega -> 0: Omega coth(Omega t/2) -> 2/t.
    return num * t / (p.lambda * t + 2.0);
}

double gamma_single(double t, const CavityParams& p) {
    return gamma_N(t, 1, p);
}

double g_atom(double t, const CavityParams& p) {
    return neg_part(gamma_single(t, p));
}

double g_N(double t, int N, const CavityParams& p) {
    return 2.0 / (N + 1) * neg_part(gamma_N(t, N, p));
}

std::vector<double> pole_times_N(const CavityParams& p, int N, int n_max) {
    const double w2 = omega_N_sq(N, p);
    if (!(w2 < 0.0)) throw Error(Errc::NoPoles, "rate has no poles for lambda >= sqrt(2N) gamma0");
    const double w = std::sqrt(-w2);
    // arccot(lambda/w) = atan(w/lambda) for lambda > 0.
    const double shift = std::atan(w / p.lambda);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(0, n_max)));
    for (int n = 1; n <= n_max; ++n) out.push_back(2.0 / w * (std::numbers::pi * n - shift));
    return out;
}

std::vector<double> pole_times(const CavityParams& p, int n_max) {
    return pole_times_N(p, 1, n_max);
}

double c_plus_N(double t, int N, const CavityParams& p) {
    const double w2 = omega_N_sq(N, p);
    const double env = std::exp(-0.5 * p.lambda * t);
    if (w2 > 0.0) {
        // Expanded into the two exponentials so large t does not overflow cosh.
        const double W = std::sqrt(w2);
        return 0.5 * ((1.0 + p.lambda / W) * std::exp(0.5 * (W - p.lambda) * t) +
                      (1.0 - p.lambda / W) * std::exp(-0.5 * (W + p.lambda) * t));
    }
    if (w2 < 0.0) {
        const double w = std::sqrt(-w2);
        return env * (std::cos(0.5 * w * t) + p.lambda / w * std::sin(0.5 * w * t));
    }
    return env * (1.0 + 0.5 * p.lambda * t);
}

double r1_closed_d0(double t, const CavityParams& p) {
    return c_plus_N(t, 2, p);
}

double g_two_atoms_d0(double t, const CavityParams& p) {
    return 2.0 / 3.0 * neg_part(gamma_N(t, 2, p));
}

CriticalN critical_N(const CavityParams& p) {
    const double x = p.lambda * p.lambda / (2.0 * p.gamma0 * p.gamma0);
    CriticalN out;
    const double nearest = std::round(x);
    if (nearest >= 1.0 && std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) {
        out.boundary = true;
        out.value = static_cast<int>(nearest);
    } else {
        out.value = std::max(1, static_cast<int>(std::ceil(x)));
    }
    return out;
}

bool nonmarkovian_N(int N, const CavityParams& p) {
    const double x = p.lambda * p.lambda / (2.0 * p.gamma0 * p.gamma0);
    if (std::abs(N - x) <= 1e-9 * std::max(1.0, x)) return false;
    return N > x;
}

std::vector<cplx> uncorrelated_amplitudes(const RateTrajectory& rates) {
    const auto& r1 = rates.amp1.r;
    const auto& r2 = rates.amp2.r;
    std::vector<cplx> u(r1.size());
    if (u.empty()) return u;
    u[0] = std::sqrt(r1[0] * r2[0]);
    // Multiply up sqrt of the step ratios so the branch follows the trajectory.
    for (std::size_t i = 1; i < u.size(); ++i) {
        const cplx prod_prev = r1[i - 1] * r2[i - 1];
        const cplx prod = r1[i] * r2[i];
        if (prod_prev == cplx{0.0, 0.0}) {
            u[i] = std::sqrt(prod);
            continue;
        }
        u[i] = u[i - 1] * std::sqrt(prod / prod_prev);
    }
    return u;
}

cplx u_uncorrelated(const RateTrajectory& rates, std::size_t i) {
    if (i >= rates.size()) throw Error(Errc::DomainError, "node index out of range");
    return uncorrelated_amplitudes(rates)[i];
}

void write_rates_csv(std::ostream& os, const RateTrajectory& rates) {
    os << "t,gamma1,gamma2,S1,S2,g,g_uc\n";
    for (std::size_t i = 0; i < rates.size(); ++i) {
        write_csv_row(os, {rates.grid.nodes[i], rates.gamma1[i], rates.gamma2[i], rates.S1[i],
                           rates.S2[i], rates.g[i], rates.g_uc[i]});
    }
}

}  // namespace nmark
