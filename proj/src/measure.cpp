// measure.cpp — weight, RHP and regularized measures with pole-aware quadrature

#include "nmark/measure.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "nmark/csv.hpp"
#include "nmark/errors.hpp"
#include "nmark/hermite.hpp"

namespace nmark {

std::string_view to_string(MeasureVariant v) noexcept {
    switch (v) {
        case MeasureVariant::RHP: return "rhp";
        case MeasureVariant::Weighted: return "weighted";
        case MeasureVariant::SqrtWeighted: return "sqrt_weighted";
        case MeasureVariant::SqrtWeightedUncorrelated: return "sqrt_weighted_uncorrelated";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// weight

Weight weight(const std::vector<double>& F, const TimeGrid& grid) {
    if (F.size() != grid.size()) throw Error(Errc::GridMismatch, "fidelity samples do not match grid");
    Weight out;
    out.logF.resize(F.size());
    bool moved = false;
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (!(F[i] > 0.0) || F[i] > 1.0 + 1e-9) {
            throw Error(Errc::DomainError, "fidelity must lie in (0, 1]");
        }
        out.logF[i] = std::min(0.0, std::log(F[i]));
        if (out.logF[i] < 0.0) moved = true;
    }
    if (!moved) throw Error(Errc::DegenerateWeight, "F == 1 everywhere, the weight is undefined");
    double Z = 0.0;
    for (std::size_t i = 0; i + 1 < F.size(); ++i) {
        Z += 0.5 * grid.step(i) * (out.logF[i] + out.logF[i + 1]);
    }
    if (!(Z < 0.0)) throw Error(Errc::DegenerateWeight, "integral of log F vanishes");
    out.w.resize(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) out.w[i] = out.logF[i] / Z;
    out.relaxation_estimate = -Z;
    return out;
}

std::vector<double> fidelity_profile(const std::vector<ChannelSnapshot<double>>& snapshots,
                                     const TimeGrid& grid, const ChoiMatrix<double>& reference,
                                     int stride) {
    if (snapshots.size() != grid.size()) throw Error(Errc::GridMismatch, "snapshots do not match grid");
    if (stride < 1) throw Error(Errc::DomainError, "fidelity stride must be >= 1");
    const FidelityReference<double> fid(reference.entries);
    const std::size_t n = grid.size();
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(stride)) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);

    std::vector<double> logF(n);
    for (auto i : idx) {
        const double F = std::clamp(fid(choi(snapshots[i]).entries), 1e-300, 1.0);
        logF[i] = std::log(F);
    }
    for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
        const std::size_t a = idx[k], b = idx[k + 1];
        const double ta = grid.nodes[a], tb = grid.nodes[b];
        for (std::size_t i = a + 1; i < b; ++i) {
            const double s = (grid.nodes[i] - ta) / (tb - ta);
            logF[i] = (1.0 - s) * logF[a] + s * logF[b];
        }
    }
    std::vector<double> F(n);
    for (std::size_t i = 0; i < n; ++i) F[i] = std::exp(logF[i]);
    return F;
}

// ---------------------------------------------------------------------------
// rate signal

RateSignal RateSignal::from_rates(const RateTrajectory& rates, SignalKind kind) {
    if (kind == SignalKind::Single) throw Error(Errc::DomainError, "use from_single for one channel");
    RateSignal s;
    s.kind_ = kind;
    s.amps_ = {std::make_shared<const AmplitudeTrajectory>(rates.amp1),
               std::make_shared<const AmplitudeTrajectory>(rates.amp2)};
    const double h_tol = 1e-9 * std::max(1.0, rates.grid.t_end);
    for (const auto& p : rates.poles) {
        // r'/r ~ order/(t - t*) gives gamma ~ -2 order/(t - t*) after the zero, for
        // both the separate and the summed (uncorrelated) negative part.
        const double residue = 2.0 / 3.0 * 2.0 * p.order;
        if (!s.poles_.empty() && std::abs(s.poles_.back().time - p.time) <= h_tol) {
            s.poles_.back().residue += residue;
            s.poles_.back().order = std::max(s.poles_.back().order, p.order);
        } else {
            s.poles_.push_back({p.time, p.order, residue});
        }
    }
    return s;
}

RateSignal RateSignal::from_single(const AmplitudeTrajectory& amp) {
    RateSignal s;
    s.kind_ = SignalKind::Single;
    s.amps_ = {std::make_shared<const AmplitudeTrajectory>(amp)};
    for (const auto& p : find_amplitude_zeros(amp)) s.poles_.push_back({p.time, p.order, 2.0 * p.order});
    return s;
}

RateSignal RateSignal::scaled(double factor) const {
    RateSignal s = *this;
    s.scale_ *= factor;
    for (auto& p : s.poles_) p.residue *= factor;
    return s;
}

double RateSignal::prefactor() const noexcept {
    return (kind_ == SignalKind::Single ? 1.0 : 2.0 / 3.0) * scale_;
}

namespace {

double model_gamma(const AmplitudeTrajectory& a, std::size_t i, double t) {
    const auto hp = hermite(a.grid.nodes[i], a.grid.nodes[i + 1], a.r[i], a.r[i + 1], a.rdot[i],
                            a.rdot[i + 1], t);
    return -2.0 * std::real(hp.derivative / hp.value);
}

}  // namespace

double RateSignal::at(double t) const {
    const auto i = grid().interval_of(t);
    switch (kind_) {
        case SignalKind::Single: return prefactor() * neg_part(model_gamma(*amps_[0], i, t));
        case SignalKind::Total:
            return prefactor() * (neg_part(model_gamma(*amps_[0], i, t)) +
                                  neg_part(model_gamma(*amps_[1], i, t)));
        case SignalKind::Uncorrelated:
            return prefactor() * neg_part(model_gamma(*amps_[0], i, t) + model_gamma(*amps_[1], i, t));
    }
    return 0.0;
}

std::vector<double> RateSignal::samples() const {
    const auto& nodes = grid().nodes;
    std::vector<double> out(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double g1 = -2.0 * std::real(amps_[0]->rdot[i] / amps_[0]->r[i]);
        double g2 = amps_.size() > 1 ? -2.0 * std::real(amps_[1]->rdot[i] / amps_[1]->r[i]) : 0.0;
        switch (kind_) {
            case SignalKind::Single: out[i] = prefactor() * neg_part(g1); break;
            case SignalKind::Total: out[i] = prefactor() * (neg_part(g1) + neg_part(g2)); break;
            case SignalKind::Uncorrelated: out[i] = prefactor() * neg_part(g1 + g2); break;
        }
    }
    return out;
}

std::vector<double> RateSignal::near_zeros(std::size_t interval) const {
    std::vector<double> out;
    const double a = grid().nodes[interval], b = grid().nodes[interval + 1];
    for (const auto& amp : amps_) {
        const auto mn = amplitude_minimum(*amp, interval);
        if (!mn) continue;
        const double margin = 1e-12 * (b - a);
        if (mn->time > a + margin && mn->time < b - margin) out.push_back(mn->time);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// measures

namespace {

void refuse_poles(const std::vector<double>& g, const TimeGrid& grid, const std::vector<Pole>& poles) {
    for (const auto& p : poles) {
        if (p.time <= grid.t_end) {
            throw Error(Errc::NonIntegrablePole,
                        "g has a simple pole at t = " + fmt17(p.time) + "; use the regularized measure");
        }
    }
    for (double v : g) {
        if (!std::isfinite(v)) throw Error(Errc::NonIntegrablePole, "g diverges on the grid");
    }
}

double interp(const std::vector<double>& v, const TimeGrid& grid, std::size_t i, double t) {
    const double s = (t - grid.nodes[i]) / grid.step(i);
    return (1.0 - s) * v[i] + s * v[i + 1];
}

}  // namespace

MeasureResult measure_rhp(const std::vector<double>& g, const TimeGrid& grid,
                          const std::vector<Pole>& poles) {
    if (g.size() != grid.size()) throw Error(Errc::GridMismatch, "g samples do not match grid");
    refuse_poles(g, grid, poles);
    MeasureResult out;
    out.variant = MeasureVariant::RHP;
    out.t_end = grid.t_end;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) out.value += 0.5 * grid.step(i) * (g[i] + g[i + 1]);
    return out;
}

MeasureResult measure_weighted(const std::vector<double>& g, const Weight& w, const TimeGrid& grid,
                               const std::vector<Pole>& poles) {
    if (g.size() != grid.size() || w.w.size() != grid.size()) {
        throw Error(Errc::GridMismatch, "samples do not match grid");
    }
    refuse_poles(g, grid, poles);
    MeasureResult out;
    out.variant = MeasureVariant::Weighted;
    out.t_end = grid.t_end;
    out.relaxation_estimate = w.relaxation_estimate;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        out.value += 0.5 * grid.step(i) * (g[i] * w.w[i] + g[i + 1] * w.w[i + 1]);
    }
    return out;
}

MeasureResult measure_sqrt(const RateSignal& g, const Weight& w, SqrtOptions opt) {
    using boost::math::quadrature::gauss_kronrod;
    const TimeGrid& grid = g.grid();
    if (w.w.size() != grid.size()) throw Error(Errc::GridMismatch, "weight does not match grid");
    const double p = opt.reg.root_exponent();
    const double delta = opt.delta > 0.0 ? opt.delta : 10.0 * grid.dt;

    MeasureResult out;
    out.variant = MeasureVariant::SqrtWeighted;
    out.t_end = grid.t_end;
    out.reg = opt.reg;
    out.relaxation_estimate = w.relaxation_estimate;
    out.diagnostics.delta = delta;

    // Analytic windows (t*, t* + delta] right of each pole, where g ~ c/(t - t*).
    struct Window {
        double lo, hi;
    };
    std::vector<Window> windows;
    double window_sum = 0.0;
    for (const auto& site : g.poles()) {
        if (site.time >= grid.t_end) continue;
        if (site.order > opt.reg.alpha) {
            throw Error(Errc::PoleOrderMismatch, "pole of order " + std::to_string(site.order) +
                                                     " exceeds regularization order");
        }
        const double hi = std::min(site.time + delta, grid.t_end);
        const double width = hi - site.time;
        // int_0^width (c/tau)^p (w0 + w' tau) dtau, w linear over the window
        const double centre = site.time + width * (1.0 - p) / (2.0 - p);
        const double wc = interp(w.w, grid, grid.interval_of(centre), centre);
        window_sum += std::pow(site.residue, p) * std::pow(width, 1.0 - p) / (1.0 - p) * wc;
        windows.push_back({site.time, hi});
        ++out.pole_count;
    }
    out.diagnostics.pole_windows = windows.size();

    double sum = 0.0;
    double err_total = 0.0;
    std::size_t active = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid.nodes[i], b = grid.nodes[i + 1];
        // Breakpoints: interval ends, near-zeros of amplitudes, window edges.
        std::vector<double> cuts{a, b};
        const auto nz = g.near_zeros(i);
        cuts.insert(cuts.end(), nz.begin(), nz.end());
        out.diagnostics.split_points += nz.size();
        for (const auto& win : windows) {
            if (win.lo > a && win.lo < b) cuts.push_back(win.lo);
            if (win.hi > a && win.hi < b) cuts.push_back(win.hi);
        }
        std::sort(cuts.begin(), cuts.end());
        bool touched = false;
        auto f = [&](double t) {
            const double gv = g.at(t);
            return gv > 0.0 ? std::pow(gv, p) * interp(w.w, grid, i, t) : 0.0;
        };
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double x = cuts[k], y = cuts[k + 1];
            if (!(y > x)) continue;
            const double mid = 0.5 * (x + y);
            bool inside = false;
            for (const auto& win : windows) inside = inside || (mid > win.lo && mid < win.hi);
            if (inside) continue;
            // The Hermite derivative carries ~1e-11 relative rounding noise (difference
            // of nearly equal nodes over h); asking for more than 1e-8 only recurses.
            double err = 0.0;
            const double v = gauss_kronrod<double, 15>::integrate(f, x, y, 10, 1e-8, &err);
            if (v != 0.0) touched = true;
            sum += v;
            err_total += err;
        }
        if (touched) ++active;
    }
    out.diagnostics.intervals = active;
    out.diagnostics.error_estimate = err_total;
    const double total = sum + window_sum;
    out.diagnostics.pole_window_share = total > 0.0 ? window_sum / total : 0.0;
    out.value = std::pow(total, opt.reg.alpha + 1);
    return out;
}

std::vector<ChannelSnapshot<double>> channel_snapshots(const RateTrajectory& rates,
                                                       AsymptoticKind kind) {
    std::vector<ChannelSnapshot<double>> out;
    out.reserve(rates.size());
    if (kind == AsymptoticKind::Total) {
        for (std::size_t i = 0; i < rates.size(); ++i) {
            out.emplace_back(rates.amp1.r[i], rates.amp2.r[i], rates.grid.nodes[i]);
        }
    } else {
        const auto u = uncorrelated_amplitudes(rates);
        for (std::size_t i = 0; i < rates.size(); ++i) out.emplace_back(u[i], u[i], rates.grid.nodes[i]);
    }
    return out;
}

Weight uncorrelated_weight(const RateTrajectory& rates, int fidelity_stride) {
    const auto snaps = channel_snapshots(rates, AsymptoticKind::Uncorrelated);
    const auto ref = choi_asymptotic<double>(rates.amp1.params, AsymptoticKind::Uncorrelated);
    return weight(fidelity_profile(snaps, rates.grid, ref, fidelity_stride), rates.grid);
}

MeasureResult measure_sqrt_uncorrelated(const RateTrajectory& rates, SqrtOptions opt,
                                        int fidelity_stride) {
    const auto w = uncorrelated_weight(rates, fidelity_stride);
    auto out = measure_sqrt(RateSignal::from_rates(rates, SignalKind::Uncorrelated), w, opt);
    out.variant = MeasureVariant::SqrtWeightedUncorrelated;
    out.diagnostics.fidelity_stride = fidelity_stride;
    return out;
}

// ---------------------------------------------------------------------------
// d -> 0

namespace {

void require_d0_regime(const CavityParams& p) {
    if (!(p.lambda < 2.0 * p.gamma0)) {
        throw Error(Errc::NotApplicable, "d -> 0 limit needs lambda < 2 gamma0");
    }
}

}  // namespace

double measure_d0_limit(const CavityParams& p) {
    require_d0_regime(p);
    return (2.0 * p.gamma0 - p.lambda) / 3.0;
}

double d0_period_integral(const CavityParams& p) {
    require_d0_regime(p);
    return 2.0 * std::numbers::pi / std::sqrt(6.0 * p.gamma0 + 3.0 * p.lambda);
}

double d0_period(const CavityParams& p) {
    require_d0_regime(p);
    return 2.0 * std::numbers::pi / std::sqrt(-omega_N_sq(2, p));
}

// ---------------------------------------------------------------------------
// pipelines

RateTrajectory compute_rates(const CavityParams& p, const TimeGrid& grid, Scheme scheme) {
    return rates_from_amplitudes(solve(1, p, grid, scheme), solve(2, p, grid, scheme));
}

MeasureReport run_measure(const CavityParams& p, double t_end, double dt, const PipelineOptions& opt) {
    const auto grid = make_grid(p, t_end, dt);
    MeasureReport rep;
    rep.rates = compute_rates(p, grid, opt.scheme);
    const auto ref = choi_asymptotic<double>(p, AsymptoticKind::Total);
    const auto F = fidelity_profile(channel_snapshots(rep.rates, AsymptoticKind::Total), grid, ref,
                                    opt.fidelity_stride);
    rep.weight = weight(F, grid);
    rep.total = measure_sqrt(RateSignal::from_rates(rep.rates, SignalKind::Total), rep.weight, opt.sqrt);
    rep.total.diagnostics.fidelity_stride = opt.fidelity_stride;
    rep.uncorrelated = measure_sqrt_uncorrelated(rep.rates, opt.sqrt, opt.fidelity_stride);
    return rep;
}

void write_measure_csv(std::ostream& os, const TimeGrid& grid, const Weight& w,
                       const std::vector<double>& g) {
    os << "t,F,logF,w,sqrt_g\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        write_csv_row(os, {grid.nodes[i], std::exp(w.logF[i]), w.logF[i], w.w[i], std::sqrt(g[i])});
    }
}

}  // namespace nmark
