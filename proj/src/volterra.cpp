// volterra.cpp — direct (trapezoid in history) and fast (exponential accumulator) solvers

#include "nmark/volterra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "nmark/csv.hpp"
#include "nmark/errors.hpp"
#include "nmark/hermite.hpp"

namespace nmark {

std::string_view to_string(Scheme s) noexcept {
    return s == Scheme::Direct ? "direct" : "fast";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "direct") return Scheme::Direct;
    if (name == "fast") return Scheme::Fast;
    throw Error(Errc::DomainError, "unknown scheme '" + std::string(name) + "'");
}

double AmplitudeTrajectory::max_abs() const {
    double m = 0.0;
    for (const auto& v : r) m = std::max(m, std::abs(v));
    return m;
}

namespace {
// the Hermite model is only trusted on the grid; a cubic runs off quickly outside it
void require_on_grid(const TimeGrid& g, double t) {
    const double slack = 1e-12 * std::max(1.0, g.nodes.back());
    if (!(t >= g.nodes.front() - slack && t <= g.nodes.back() + slack)) {
        throw Error(Errc::DomainError, "time outside the solved window");
    }
}
}  // namespace

cplx AmplitudeTrajectory::value_at(double t) const {
    require_on_grid(grid, t);
    const auto i = grid.interval_of(t);
    return hermite(grid.nodes[i], grid.nodes[i + 1], r[i], r[i + 1], rdot[i], rdot[i + 1], t).value;
}

cplx AmplitudeTrajectory::derivative_at(double t) const {
    require_on_grid(grid, t);
    const auto i = grid.interval_of(t);
    return hermite(grid.nodes[i], grid.nodes[i + 1], r[i], r[i + 1], rdot[i], rdot[i + 1], t)
        .derivative;
}

namespace {

constexpr double kGrowthLimit = 1e-3;

AmplitudeTrajectory empty_trajectory(int m, const CavityParams& p, const TimeGrid& grid,
                                     Scheme scheme) {
    if (m != 1 && m != 2) throw Error(Errc::DomainError, "channel index must be 1 or 2");
    require_valid(p);
    if (grid.size() < 2) throw Error(Errc::InvalidGrid, "grid needs at least two nodes");
    AmplitudeTrajectory traj;
    traj.grid = grid;
    traj.m = m;
    traj.scheme = scheme;
    traj.params = p;
    traj.r.assign(grid.size(), cplx{0.0, 0.0});
    traj.rdot.assign(grid.size(), cplx{0.0, 0.0});
    traj.r[0] = 1.0;
    return traj;
}

// d = 0 antisymmetric channel: the kernel vanishes and the state is dark.
bool fill_dark(AmplitudeTrajectory& traj) {
    if (!(traj.params.coincident() && traj.m == 2)) return false;
    std::fill(traj.r.begin(), traj.r.end(), cplx{1.0, 0.0});
    std::fill(traj.rdot.begin(), traj.rdot.end(), cplx{0.0, 0.0});
    return true;
}

void check_growth(cplx r, double t) {
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) || std::abs(r) > 1.0 + kGrowthLimit) {
        throw Error(Errc::NumericalInstability,
                    "|r| exceeded 1 at t = " + fmt17(t) + " (grid too coarse?)");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Direct scheme: composite trapezoid over the stored history, implicit in the newest
// node. Intervals whose lags reach into the memory window [0, d) are subdivided and r
// is interpolated linearly there, so the oscillating branch and the kink at lag d are
// resolved without refining the whole grid.

AmplitudeTrajectory solve_direct(int m, const CavityParams& p, const TimeGrid& grid) {
    auto traj = empty_trajectory(m, p, grid, Scheme::Direct);
    if (fill_dark(traj)) return traj;

    const ChannelKernel K(m, p);
    const auto& t = grid.nodes;
    const int sub = std::max(1, grid.window_refinement);
    auto& r = traj.r;
    auto& rd = traj.rdot;

    // Weights (ca, cb) with int_a^b K(tn - s) r(s) ds ~ ca r(a) + cb r(b).
    auto interval_weights = [&](double tn, double a, double b, cplx& ca, cplx& cb) {
        if (!K.windowed() || tn - b >= p.d) {
            ca = 0.5 * (b - a) * K(tn - a);
            cb = 0.5 * (b - a) * K(tn - b);
            return;
        }
        const double hs = (b - a) / sub;
        ca = cb = 0.0;
        for (int k = 0; k <= sub; ++k) {
            const double theta = static_cast<double>(k) / sub;
            const double w = (k == 0 || k == sub) ? 0.5 * hs : hs;
            const cplx kv = w * K(tn - (a + theta * (b - a)));
            ca += (1.0 - theta) * kv;
            cb += theta * kv;
        }
    };

    for (std::size_t n = 1; n < t.size(); ++n) {
        const double tn = t[n];
        cplx acc{0.0, 0.0};
        cplx ca, cb;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            interval_weights(tn, t[j], t[j + 1], ca, cb);
            acc += ca * r[j] + cb * r[j + 1];
        }
        interval_weights(tn, t[n - 1], tn, ca, cb);
        const double h = tn - t[n - 1];
        const cplx G = -(acc + ca * r[n - 1]);
        r[n] = (r[n - 1] + 0.5 * h * (rd[n - 1] + G)) / (1.0 + 0.5 * h * cb);
        rd[n] = G - cb * r[n];
        check_growth(r[n], tn);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Fast scheme. Every branch of K is an exponential, so the memory integral is a fixed
// linear combination of accumulators
//   Y  = int_0^{t-d} e^{-lambda (t-d-s)} r ds
//   Wm = int_win e^{-lambda (t-s)} r ds,  Wp = int_win e^{lambda (t-s-d)} r ds,
//   Wo = int_win e^{i omega0 (t-s)} r ds,  win = [max(0, t-d), t]
// which obey linear ODEs driven by r(t) and the delayed r(t-d). Classic RK4 with the
// delayed value taken from a Hermite model of the stored history (method of steps).
// Without a window (d = 0 or infinity) only Wm survives and covers all of [0, t].

namespace {

struct FastState {
    cplx r, Y, Wm, Wp, Wo;
};

FastState axpy(const FastState& x, double a, const FastState& k) {
    return {x.r + a * k.r, x.Y + a * k.Y, x.Wm + a * k.Wm, x.Wp + a * k.Wp, x.Wo + a * k.Wo};
}

class FastSolver {
public:
    FastSolver(int m, const CavityParams& p) : p_(p), K_(m, p) {
        lam_ = p.lambda;
        if (K_.windowed()) {
            decay_d_ = std::exp(-lam_ * p.d);
            phase_d_ = std::exp(cplx{0.0, p.omega0 * p.d});
        }
    }

    void run(AmplitudeTrajectory& traj) {
        const auto& nodes = traj.grid.nodes;
        FastState x{1.0, 0.0, 0.0, 0.0, 0.0};
        push_history(0.0, x.r, cplx{0.0, 0.0});
        double last_sync = 0.0;
        const double sync_every = 0.1 / lam_;

        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double a = nodes[i];
            const double b = nodes[i + 1];
            double hmax = b - a;
            if (K_.windowed()) hmax = std::min({hmax, p_.d, 0.1 / p_.omega0});
            const auto nsub =
                static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / hmax - 1e-9)));
            const double h = (b - a) / static_cast<double>(nsub);
            for (std::size_t k = 0; k < nsub; ++k) {
                const double t0 = a + h * static_cast<double>(k);
                const double t1 = (k + 1 == nsub) ? b : t0 + h;
                // The delayed drive is switched on for whole steps; d is a grid node.
                const bool delayed = K_.windowed() && t0 >= p_.d - 1e-12 * std::max(1.0, p_.d);
                x = rk4(x, t0, t1 - t0, delayed);
                check_growth(x.r, t1);
                const cplx rdot = rhs(x, t1, delayed).r;
                push_history(t1, x.r, rdot);
                if (delayed && t1 - last_sync >= sync_every) {
                    resync(x, t1);
                    last_sync = t1;
                }
            }
            traj.r[i + 1] = x.r;
            traj.rdot[i + 1] = ht_.empty() ? cplx{} : hrd_.back();
        }
    }

private:
    FastState rhs(const FastState& x, double t, bool delayed) {
        FastState dx;
        if (!K_.windowed()) {
            dx.r = -K_.f1_scale() * x.Wm;
            dx.Wm = -lam_ * x.Wm + x.r;
            return dx;
        }
        const auto& c = K_.coefficients();
        const cplx conv = K_.f1_scale() * (x.Wm + decay_d_ * x.Y) +
                          K_.sign() * (c.A * x.Y + c.P * x.Wm + c.Q * x.Wp + c.R * x.Wo);
        dx.r = -conv;
        const cplx rd = delayed ? history_at(t - p_.d) : cplx{0.0, 0.0};
        dx.Y = -lam_ * x.Y + rd;
        dx.Wm = -lam_ * x.Wm + x.r - decay_d_ * rd;
        dx.Wp = lam_ * x.Wp + decay_d_ * x.r - rd;
        dx.Wo = cplx{0.0, p_.omega0} * x.Wo + x.r - phase_d_ * rd;
        return dx;
    }

    FastState rk4(const FastState& x, double t, double h, bool delayed) {
        const FastState k1 = rhs(x, t, delayed);
        const FastState k2 = rhs(axpy(x, 0.5 * h, k1), t + 0.5 * h, delayed);
        const FastState k3 = rhs(axpy(x, 0.5 * h, k2), t + 0.5 * h, delayed);
        const FastState k4 = rhs(axpy(x, h, k3), t + h, delayed);
        FastState y = x;
        y.r += h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
        y.Y += h / 6.0 * (k1.Y + 2.0 * k2.Y + 2.0 * k3.Y + k4.Y);
        y.Wm += h / 6.0 * (k1.Wm + 2.0 * k2.Wm + 2.0 * k3.Wm + k4.Wm);
        y.Wp += h / 6.0 * (k1.Wp + 2.0 * k2.Wp + 2.0 * k3.Wp + k4.Wp);
        y.Wo += h / 6.0 * (k1.Wo + 2.0 * k2.Wo + 2.0 * k3.Wo + k4.Wo);
        return y;
    }

    void push_history(double t, cplx r, cplx rdot) {
        ht_.push_back(t);
        hr_.push_back(r);
        hrd_.push_back(rdot);
    }

    // Delayed arguments only move forward, so a cursor avoids repeated searches.
    cplx history_at(double s) {
        const std::size_t last = ht_.size() - 1;
        if (s >= ht_[last]) return hr_[last];
        if (s <= 0.0) return hr_[0];
        while (cursor_ > 0 && ht_[cursor_] > s) --cursor_;
        while (cursor_ + 1 < last && ht_[cursor_ + 1] <= s) ++cursor_;
        const std::size_t k = cursor_;
        return hermite(ht_[k], ht_[k + 1], hr_[k], hr_[k + 1], hrd_[k], hrd_[k + 1], s).value;
    }

    // Wp carries the growing mode e^{lambda t}; round-off in it is amplified, so the
    // window accumulators are periodically recomputed by quadrature over the history.
    void resync(FastState& x, double t) {
        static constexpr std::array<double, 4> node{-0.8611363115940526, -0.3399810435848563,
                                                    0.3399810435848563, 0.8611363115940526};
        static constexpr std::array<double, 4> weight{0.3478548451374538, 0.6521451548625461,
                                                      0.6521451548625461, 0.3478548451374538};
        const double lo = t - p_.d;
        auto it = std::upper_bound(ht_.begin(), ht_.end(), lo);
        std::size_t k = it == ht_.begin() ? 0 : static_cast<std::size_t>(it - ht_.begin()) - 1;
        cplx wm{0.0, 0.0}, wp{0.0, 0.0}, wo{0.0, 0.0};
        const cplx iw{0.0, p_.omega0};
        for (; k + 1 < ht_.size(); ++k) {
            const double a = std::max(ht_[k], lo);
            const double b = ht_[k + 1];
            if (b <= a) continue;
            const double mid = 0.5 * (a + b);
            const double half = 0.5 * (b - a);
            for (std::size_t q = 0; q < 4; ++q) {
                const double s = mid + half * node[q];
                const cplx rv =
                    hermite(ht_[k], ht_[k + 1], hr_[k], hr_[k + 1], hrd_[k], hrd_[k + 1], s).value;
                const double w = half * weight[q];
                wm += w * std::exp(-lam_ * (t - s)) * rv;
                wp += w * std::exp(lam_ * (t - s - p_.d)) * rv;
                wo += w * std::exp(iw * (t - s)) * rv;
            }
        }
        x.Wm = wm;
        x.Wp = wp;
        x.Wo = wo;
    }

    CavityParams p_;
    ChannelKernel K_;
    double lam_{0.0};
    double decay_d_{0.0};
    cplx phase_d_{0.0, 0.0};
    std::vector<double> ht_;
    std::vector<cplx> hr_, hrd_;
    std::size_t cursor_{0};
};

}  // namespace

AmplitudeTrajectory solve_fast(int m, const CavityParams& p, const TimeGrid& grid) {
    auto traj = empty_trajectory(m, p, grid, Scheme::Fast);
    if (fill_dark(traj)) return traj;
    FastSolver solver(m, p);
    solver.run(traj);
    return traj;
}

AmplitudeTrajectory solve(int m, const CavityParams& p, const TimeGrid& grid, Scheme scheme) {
    return scheme == Scheme::Direct ? solve_direct(m, p, grid) : solve_fast(m, p, grid);
}

LogDerivative log_derivative(const AmplitudeTrajectory& traj, std::size_t i) {
    if (i >= traj.size()) throw Error(Errc::DomainError, "node index out of range");
    LogDerivative out;
    out.slope = traj.rdot[i];
    double scale = 0.0;
    if (i > 0) scale = std::max(scale, std::abs(traj.r[i - 1]));
    if (i + 1 < traj.size()) scale = std::max(scale, std::abs(traj.r[i + 1]));
    out.pole = std::abs(traj.r[i]) < kZeroTol * scale;
    out.value = traj.rdot[i] / traj.r[i];
    return out;
}

void write_trajectory_csv(std::ostream& os, const AmplitudeTrajectory& traj) {
    os << "t,re_r,im_r,re_rdot,im_rdot\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        write_csv_row(os, {traj.grid.nodes[i], traj.r[i].real(), traj.r[i].imag(),
                           traj.rdot[i].real(), traj.rdot[i].imag()});
    }
}

}  // namespace nmark
