// rates.hpp — time-local decay rates, g-functions and the closed-form analytic families

#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nmark/model.hpp"
#include "nmark/volterra.hpp"

namespace nmark {

/// Negative part x^- = (|x| - x) / 2.
inline double neg_part(double x) noexcept { return x < 0.0 ? -x : 0.0; }

/// (2/3)(g1^- + g2^-)
inline double g_total(double gamma1, double gamma2) noexcept {
    return 2.0 / 3.0 * (neg_part(gamma1) + neg_part(gamma2));
}

/// (1/3)(|g1 + g2| - g1 - g2)
inline double g_uncorrelated(double gamma1, double gamma2) noexcept {
    const double s = gamma1 + gamma2;
    return (std::abs(s) - s) / 3.0;
}

/// Zero of an amplitude: r'/r ~ order / (t - time) nearby.
struct Pole {
    int channel{1};
    double time{0.0};
    int order{1};
    cplx slope;  // r'(time)
};

struct RateTrajectory {
    TimeGrid grid;
    std::vector<double> gamma1, gamma2, S1, S2, g, g_uc;
    std::vector<Pole> poles;  // sorted by time
    // Source amplitudes, kept for the continuous rate model used by the quadrature.
    AmplitudeTrajectory amp1, amp2;

    std::size_t size() const noexcept { return gamma1.size(); }
};

/// gamma_m = -2 Re(r'/r), S_m = -2 Im(r'/r); g, g_uc per the definitions above. Nodes
/// that sit on an amplitude zero get signed infinities.
RateTrajectory rates_from_amplitudes(const AmplitudeTrajectory& t1, const AmplitudeTrajectory& t2);

/// Closest approach of the Hermite amplitude model to zero on grid interval i.
struct AmplitudeMinimum {
    double time;
    double abs;
    cplx derivative;
};

/// Only intervals where r can plausibly reach zero are searched (Gauss-Newton on
/// |R|^2 from the best of a few samples); empty otherwise.
std::optional<AmplitudeMinimum> amplitude_minimum(const AmplitudeTrajectory& traj, std::size_t i);

/// Zeros of the Hermite amplitude model where |r| < kZeroTol max|r|.
std::vector<Pole> find_amplitude_zeros(const AmplitudeTrajectory& traj);

// --- closed forms ---------------------------------------------------------

/// Omega_N^2 = lambda^2 - 2 N gamma0^2.
double omega_N_sq(int N, const CavityParams& p) noexcept;

/// 2 N gamma0^2 / (lambda + Omega_N coth(Omega_N t / 2)), continued to imaginary Omega_N
/// through the cot form. 0 at t = 0, +-inf exactly on a pole.
double gamma_N(double t, int N, const CavityParams& p);

/// Single atom (N = 1).
double gamma_single(double t, const CavityParams& p);

/// gamma^- of the single atom.
double g_atom(double t, const CavityParams& p);

/// 2/(N+1) gamma_N^-.
double g_N(double t, int N, const CavityParams& p);

/// Zeros of the single-atom amplitude t_n = (2/|Omega_1|)[pi n - arccot(lambda/|Omega_1|)].
/// Throws NoPoles when lambda >= sqrt(2) gamma0.
std::vector<double> pole_times(const CavityParams& p, int n_max);

/// Same for N collective atoms at d = 0 (N = 2 gives the two-atom symmetric channel).
std::vector<double> pole_times_N(const CavityParams& p, int N, int n_max);

/// c_+(t)/c_+(0) = e^{-lambda t/2}[cosh(Omega_N t/2) + (lambda/Omega_N) sinh(Omega_N t/2)].
double c_plus_N(double t, int N, const CavityParams& p);

/// Symmetric amplitude at d = 0 (N = 2 collective solution).
double r1_closed_d0(double t, const CavityParams& p);

/// (2/3) gamma_1^- at d = 0.
double g_two_atoms_d0(double t, const CavityParams& p);

struct CriticalN {
    int value{1};          // ceil(lambda^2 / (2 gamma0^2))
    bool boundary{false};  // lambda = sqrt(2 N) gamma0 within 1e-9 relative
};

CriticalN critical_N(const CavityParams& p);

/// lambda < sqrt(2N) gamma0, strict; false on the boundary.
bool nonmarkovian_N(int N, const CavityParams& p);

/// u(t) = sqrt(r1 r2), the amplitude of the uncorrelated (product) dynamics, on every
/// node. Continuous branch; only |u| enters the fidelity.
std::vector<cplx> uncorrelated_amplitudes(const RateTrajectory& rates);
cplx u_uncorrelated(const RateTrajectory& rates, std::size_t i);

/// CSV with header t,gamma1,gamma2,S1,S2,g,g_uc.
void write_rates_csv(std::ostream& os, const RateTrajectory& rates);

}  // namespace nmark
