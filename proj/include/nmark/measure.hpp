// measure.hpp — fidelity weight, RHP measure and the root-power regularized measure

#pragma once

#include <iosfwd>
#include <memory>
#include <string_view>
#include <vector>

#include "nmark/model.hpp"
#include "nmark/quantum_map.hpp"
#include "nmark/rates.hpp"
#include "nmark/volterra.hpp"

namespace nmark {

enum class MeasureVariant { RHP, Weighted, SqrtWeighted, SqrtWeightedUncorrelated };

std::string_view to_string(MeasureVariant v) noexcept;

struct QuadratureDiagnostics {
    std::size_t intervals{0};        // grid intervals with a non-zero integrand
    std::size_t split_points{0};     // near-zeros of an amplitude used as breakpoints
    std::size_t pole_windows{0};
    double pole_window_share{0.0};   // fraction of the integral from analytic pole windows
    double delta{0.0};               // pole window width
    double error_estimate{0.0};      // summed Gauss-Kronrod error estimates
    int fidelity_stride{1};
    std::string_view normalization{"finite-window"};
};

struct MeasureResult {
    double value{0.0};
    double t_end{0.0};
    MeasureVariant variant{MeasureVariant::SqrtWeighted};
    RegOrder reg{};
    double relaxation_estimate{0.0};
    int pole_count{0};
    QuadratureDiagnostics diagnostics{};
};

// --- weight ------------------------------------------------------------------

struct Weight {
    std::vector<double> w;     // log F / int_0^{t_end} log F, per node
    std::vector<double> logF;  // per node
    double relaxation_estimate{0.0};  // -int_0^{t_end} log F
};

/// Finite-window weight from fidelity samples on every node (trapezoid normalization).
Weight weight(const std::vector<double>& F, const TimeGrid& grid);

/// F(t) = fidelity(choi(a(t)), reference) on every stride-th node (and the last one);
/// log F is interpolated linearly in between.
std::vector<double> fidelity_profile(const std::vector<ChannelSnapshot<double>>& snapshots,
                                     const TimeGrid& grid, const ChoiMatrix<double>& reference,
                                     int stride = 10);

// --- rate signal -------------------------------------------------------------

enum class SignalKind { Total, Uncorrelated, Single };

/// Continuous g(t) built from the Hermite model of the amplitudes, plus the flagged
/// poles and their residues: g(t) ~ residue / (t - t*) just after t*.
class RateSignal {
public:
    static RateSignal from_rates(const RateTrajectory& rates, SignalKind kind);
    /// One-channel signal g = gamma^- of the amplitude (single atom).
    static RateSignal from_single(const AmplitudeTrajectory& amp);

    /// g -> factor * g (n identical copies give factor n).
    RateSignal scaled(double factor) const;

    double at(double t) const;
    const TimeGrid& grid() const noexcept { return amps_.front()->grid; }
    std::vector<double> samples() const;

    struct PoleSite {
        double time;
        int order;
        double residue;
    };
    const std::vector<PoleSite>& poles() const noexcept { return poles_; }

    /// Interior points of [a, b] where some amplitude passes close to zero.
    std::vector<double> near_zeros(std::size_t interval) const;

private:
    std::vector<std::shared_ptr<const AmplitudeTrajectory>> amps_;
    SignalKind kind_{SignalKind::Total};
    double scale_{1.0};
    std::vector<PoleSite> poles_;
    double prefactor() const noexcept;
};

// --- measures ----------------------------------------------------------------

/// int_0^{t_end} g by trapezoid; NonIntegrablePole when a pole lies in the window.
MeasureResult measure_rhp(const std::vector<double>& g, const TimeGrid& grid,
                          const std::vector<Pole>& poles);

/// int g w; same refusal on poles.
MeasureResult measure_weighted(const std::vector<double>& g, const Weight& w, const TimeGrid& grid,
                               const std::vector<Pole>& poles);

struct SqrtOptions {
    RegOrder reg{};
    double delta{-1.0};  // pole window; < 0 selects 10 * dt
};

/// [int g^{1/(alpha+1)} w]^{alpha+1} with analytic pole windows (t*, t* + delta].
MeasureResult measure_sqrt(const RateSignal& g, const Weight& w, SqrtOptions opt = {});

/// Weight of the product dynamics u = sqrt(r1 r2).
Weight uncorrelated_weight(const RateTrajectory& rates, int fidelity_stride = 10);

/// Same integral with g_uc and the weight of the product dynamics u = sqrt(r1 r2).
MeasureResult measure_sqrt_uncorrelated(const RateTrajectory& rates, SqrtOptions opt = {},
                                        int fidelity_stride = 10);

// --- d -> 0 closed forms -----------------------------------------------------

/// (2 gamma0 - lambda) / 3; NotApplicable for lambda >= 2 gamma0.
double measure_d0_limit(const CavityParams& p);
/// 2 pi / sqrt(6 gamma0 + 3 lambda)
double d0_period_integral(const CavityParams& p);
/// 2 pi / |Omega_2|
double d0_period(const CavityParams& p);

// --- pipelines ---------------------------------------------------------------

struct PipelineOptions {
    Scheme scheme{Scheme::Fast};
    int fidelity_stride{10};
    SqrtOptions sqrt{};
};

RateTrajectory compute_rates(const CavityParams& p, const TimeGrid& grid, Scheme scheme);

/// Snapshots (r1, r2) or (u, u) on every node.
std::vector<ChannelSnapshot<double>> channel_snapshots(const RateTrajectory& rates,
                                                       AsymptoticKind kind);

struct MeasureReport {
    RateTrajectory rates;
    Weight weight;
    MeasureResult total;
    MeasureResult uncorrelated;
};

MeasureReport run_measure(const CavityParams& p, double t_end, double dt,
                          const PipelineOptions& opt = {});

/// CSV with header t,F,logF,w,sqrt_g.
void write_measure_csv(std::ostream& os, const TimeGrid& grid, const Weight& w,
                       const std::vector<double>& g);

}  // namespace nmark
