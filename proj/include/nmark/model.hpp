// model.hpp — cavity parameters, time grids and validity checks
//
// Units: hbar = c = 1 and frequencies are measured in units of omega0 (default 1),
// so distances and times share a unit.

#pragma once

#include <limits>
#include <string>
#include <vector>

namespace nmark {

/// Lorentzian cavity with two identical atoms a distance d apart.
///
/// d = +infinity is the explicit "infinitely separated atoms" configuration in
/// which the cross correlation f2 vanishes identically.
struct CavityParams {
    double gamma0{0.01};  // coupling strength
    double lambda{0.0165};  // cavity linewidth
    double omega0{1.0};   // atomic / cavity resonance
    double d{0.0};        // interatomic distance

    static constexpr double kInfinite = std::numeric_limits<double>::infinity();

    bool infinite_distance() const noexcept { return d == kInfinite; }
    bool coincident() const noexcept { return d == 0.0; }
};

struct ValidityIssue {
    enum class Kind { NonPositiveParameter, WeakCouplingViolated, NarrowLineViolated };
    Kind kind;
    std::string field;
    std::string message;
};

struct ValidityReport {
    std::vector<ValidityIssue> errors;
    std::vector<ValidityIssue> warnings;

    bool ok() const noexcept { return errors.empty(); }
};

/// Positivity errors and the two regime warnings (gamma0/omega0 > 0.1 and omega0/lambda < 10).
ValidityReport validate_params(const CavityParams& p);

/// Throws Error(NonPositiveParameter) when validate_params reports an error.
void require_valid(const CavityParams& p);

/// Sample times for the Volterra solvers.
///
/// Nodes start at 0, end at t_end and are strictly increasing. When 0 < d < t_end
/// the distance d is a node so the kernel kink at lag d falls on a step boundary.
struct TimeGrid {
    std::vector<double> nodes;
    double t_end{0.0};
    double dt{0.0};
    // Steps on [0, refined_until] are at most fine_step.
    double fine_step{0.0};
    double refined_until{0.0};
    // Sub-intervals per step used for memory-window quadrature over lags < d.
    int window_refinement{10};

    std::size_t size() const noexcept { return nodes.size(); }
    double step(std::size_t i) const { return nodes[i + 1] - nodes[i]; }
    /// Index i with nodes[i] <= t < nodes[i+1], clamped to the last interval.
    std::size_t interval_of(double t) const;
};

inline constexpr double kDefaultDt = 0.05;
inline constexpr int kDefaultWindowRefinement = 10;

TimeGrid make_grid(const CavityParams& p, double t_end, double dt = kDefaultDt);

/// Regularization order: the measure uses the (alpha+1)th root of g followed by an
/// (alpha+1)th power of the weighted integral.
struct RegOrder {
    int alpha{1};

    explicit RegOrder(int a = 1);
    double root_exponent() const noexcept { return 1.0 / (alpha + 1); }
};

}  // namespace nmark
