// model.cpp — parameter validation and grid construction

#include "nmark/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nmark/errors.hpp"

namespace nmark {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::NonPositiveParameter: return "NonPositiveParameter";
        case Errc::InvalidGrid: return "InvalidGrid";
        case Errc::DomainError: return "DomainError";
        case Errc::NumericalInstability: return "NumericalInstability";
        case Errc::GridMismatch: return "GridMismatch";
        case Errc::NoPoles: return "NoPoles";
        case Errc::NotApplicable: return "NotApplicable";
        case Errc::SingularIntermediateMap: return "SingularIntermediateMap";
        case Errc::NotPSD: return "NotPSD";
        case Errc::NotHermitian: return "NotHermitian";
        case Errc::DegenerateWeight: return "DegenerateWeight";
        case Errc::NonIntegrablePole: return "NonIntegrablePole";
        case Errc::PoleOrderMismatch: return "PoleOrderMismatch";
        case Errc::NoSignChange: return "NoSignChange";
        case Errc::BracketNotUnimodal: return "BracketNotUnimodal";
    }
    return "Unknown";
}

ValidityReport validate_params(const CavityParams& p) {
    ValidityReport report;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) {
            report.errors.push_back({ValidityIssue::Kind::NonPositiveParameter, name,
                                     std::string(name) + " must be positive"});
        }
    };
    positive(p.gamma0, "gamma0");
    positive(p.lambda, "lambda");
    positive(p.omega0, "omega0");
    if (!(p.d >= 0.0)) {
        report.errors.push_back({ValidityIssue::Kind::NonPositiveParameter, "d",
                                 "d must be non-negative"});
    }
    if (!report.ok()) return report;

    if (p.gamma0 / p.omega0 > 0.1) {
        report.warnings.push_back({ValidityIssue::Kind::WeakCouplingViolated, "gamma0",
                                   "gamma0/omega0 > 0.1: rotating-wave regime not satisfied"});
    }
    if (p.omega0 / p.lambda < 10.0) {
        report.warnings.push_back({ValidityIssue::Kind::NarrowLineViolated, "lambda",
                                   "omega0/lambda < 10: negative-frequency extension is inaccurate"});
    }
    return report;
}

void require_valid(const CavityParams& p) {
    const auto report = validate_params(p);
    if (!report.ok()) {
        throw Error(Errc::NonPositiveParameter, report.errors.front().message);
    }
}

std::size_t TimeGrid::interval_of(double t) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    if (it == nodes.begin()) return 0;
    const auto i = static_cast<std::size_t>(std::distance(nodes.begin(), it)) - 1;
    return std::min(i, nodes.size() - 2);
}

namespace {

// Appends nodes covering (from, to] with steps no larger than h_max.
void append_uniform(std::vector<double>& nodes, double from, double to, double h_max) {
    const double span = to - from;
    if (span <= 0.0) return;
    // Tolerate round-off so that e.g. 350/0.05 yields exactly 7000 steps.
    const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / h_max - 1e-9)));
    for (std::size_t k = 1; k < steps; ++k) {
        nodes.push_back(from + span * static_cast<double>(k) / static_cast<double>(steps));
    }
    nodes.push_back(to);
}

}  // namespace

TimeGrid make_grid(const CavityParams& p, double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0) || dt > t_end || !std::isfinite(t_end)) {
        throw Error(Errc::InvalidGrid, "require t_end > 0, dt > 0 and dt <= t_end");
    }
    TimeGrid grid;
    grid.t_end = t_end;
    grid.dt = dt;
    grid.window_refinement = kDefaultWindowRefinement;
    grid.fine_step = std::min(dt, 2.0 * std::numbers::pi / (20.0 * p.omega0));
    grid.nodes.push_back(0.0);

    const bool finite_window = p.d > 0.0 && !p.infinite_distance();
    if (finite_window && p.d < t_end) {
        grid.refined_until = p.d;
        append_uniform(grid.nodes, 0.0, p.d, grid.fine_step);
        // Continue on the coarse lattice k*dt so that results do not depend on d
        // beyond the inserted node.
        double next = std::floor(p.d / dt + 1e-9) * dt + dt;
        if (next - p.d < 1e-9 * dt) next += dt;
        double prev = p.d;
        while (next < t_end - 1e-9 * dt) {
            grid.nodes.push_back(next);
            prev = next;
            next += dt;
        }
        if (t_end - prev > 0.0) grid.nodes.push_back(t_end);
    } else {
        grid.refined_until = finite_window ? t_end : 0.0;
        append_uniform(grid.nodes, 0.0, t_end, finite_window ? grid.fine_step : dt);
    }
    return grid;
}

RegOrder::RegOrder(int a) : alpha(a) {
    if (a < 1) throw Error(Errc::DomainError, "regularization order alpha must be >= 1");
}

}  // namespace nmark
