// volterra.hpp — amplitude equations r'(t) = -int_0^t K_m(t - s) r(s) ds

#pragma once

#include <complex>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "nmark/kernels.hpp"
#include "nmark/model.hpp"

namespace nmark {

enum class Scheme { Direct, Fast };

std::string_view to_string(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);

/// Pole flag threshold relative to the local amplitude scale (|r| at the neighbouring
/// nodes); the envelope itself decays by many decades over long windows.
inline constexpr double kZeroTol = 1e-9;

/// Normalized amplitude r_m(t) / r_m(0) sampled on a grid, with r' at the nodes.
struct AmplitudeTrajectory {
    TimeGrid grid;
    std::vector<cplx> r;
    std::vector<cplx> rdot;
    int m{1};
    Scheme scheme{Scheme::Fast};
    CavityParams params;

    std::size_t size() const noexcept { return r.size(); }
    double max_abs() const;

    /// Cubic Hermite model through (r, r') at the nodes.
    cplx value_at(double t) const;
    cplx derivative_at(double t) const;
};

AmplitudeTrajectory solve_direct(int m, const CavityParams& p, const TimeGrid& grid);
AmplitudeTrajectory solve_fast(int m, const CavityParams& p, const TimeGrid& grid);
AmplitudeTrajectory solve(int m, const CavityParams& p, const TimeGrid& grid, Scheme scheme);

struct LogDerivative {
    cplx value;       // r'/r
    bool pole{false}; // |r| < kZeroTol * local scale
    cplx slope;       // r' at the node, the local linearization of r near its zero
};

LogDerivative log_derivative(const AmplitudeTrajectory& traj, std::size_t i);

/// CSV with header t,re_r,im_r,re_rdot,im_rdot.
void write_trajectory_csv(std::ostream& os, const AmplitudeTrajectory& traj);

}  // namespace nmark
