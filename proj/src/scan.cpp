// scan.cpp — sweeps over d and the bisection / golden-section finders

#include "nmark/scan.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "nmark/csv.hpp"
#include "nmark/errors.hpp"

namespace nmark {

MinGamma min_gamma(double d, CavityParams p, double t_end, double dt, Scheme scheme) {
    p.d = d;
    const auto grid = make_grid(p, t_end, dt);
    const auto rates = compute_rates(p, grid, scheme);
    MinGamma out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    // t = 0 is skipped: both rates start at exactly 0 there.
    for (std::size_t i = 1; i < rates.size(); ++i) {
        const double g1 = rates.gamma1[i];
        const double s = g1 + rates.gamma2[i];
        if (std::isfinite(g1)) out.gamma1 = std::min(out.gamma1, g1);
        if (std::isfinite(s)) out.sum = std::min(out.sum, s);
    }
    return out;
}

ScanRow scan_row(const CavityParams& p, double d, double t_end, double dt, const PipelineOptions& opt) {
    ScanRow row;
    row.d = d;
    row.t_end = t_end;
    try {
        CavityParams q = p;
        q.d = d;
        const auto rep = run_measure(q, t_end, dt, opt);
        row.measure_total = rep.total.value;
        row.measure_uncorrelated = rep.uncorrelated.value;
        row.min_gamma1 = std::numeric_limits<double>::infinity();
        row.min_gamma_sum = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < rep.rates.size(); ++i) {
            const double g1 = rep.rates.gamma1[i];
            const double s = g1 + rep.rates.gamma2[i];
            if (std::isfinite(g1)) row.min_gamma1 = std::min(row.min_gamma1, g1);
            if (std::isfinite(s)) row.min_gamma_sum = std::min(row.min_gamma_sum, s);
        }
    } catch (const std::exception& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.ok = false;
        row.error = e.what();
        row.measure_total = row.measure_uncorrelated = row.min_gamma1 = row.min_gamma_sum = nan;
    }
    return row;
}

std::vector<ScanRow> sweep_distance(const CavityParams& p, const std::vector<double>& d_list,
                                    double t_end, double dt, bool include_inf,
                                    const PipelineOptions& opt) {
    if (d_list.empty() && !include_inf) throw Error(Errc::DomainError, "empty distance list");
    std::vector<ScanRow> rows;
    rows.reserve(d_list.size() + 1);
    for (double d : d_list) rows.push_back(scan_row(p, d, t_end, dt, opt));
    if (include_inf) rows.push_back(scan_row(p, CavityParams::kInfinite, t_end, dt, opt));
    return rows;
}

double default_critical_horizon(const CavityParams& p) {
    return 40.0 / p.gamma0;
}

CriticalResult critical_distance(const CavityParams& p, double lo, double hi, bool uncorrelated,
                                 const CriticalOptions& opt) {
    if (!(lo < hi) || lo < 0.0) throw Error(Errc::DomainError, "bracket must satisfy 0 <= lo < hi");
    const double horizon = opt.horizon > 0.0 ? opt.horizon : default_critical_horizon(p);
    CriticalResult out;
    out.kind = uncorrelated ? CriticalKind::Uncorrelated : CriticalKind::Total;
    out.tolerance = opt.tol;
    auto negative = [&](double d) {
        ++out.evaluations;
        const auto m = min_gamma(d, p, horizon, opt.dt, opt.scheme);
        return (uncorrelated ? m.sum : m.gamma1) < 0.0;
    };
    if (!negative(lo) || negative(hi)) {
        throw Error(Errc::NoSignChange, "minimum rate does not change sign across the bracket");
    }
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        if (negative(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++out.iterations;
    }
    out.lo = lo;
    out.hi = hi;
    out.d_star = 0.5 * (lo + hi);
    return out;
}

CriticalResult find_dmax(const CavityParams& p, double lo, double hi, double t_end, double tol,
                         double dt, const PipelineOptions& opt) {
    if (!(lo < hi)) throw Error(Errc::DomainError, "bracket must satisfy lo < hi");
    CriticalResult out;
    out.kind = CriticalKind::MaxMeasure;
    out.tolerance = tol;
    auto f = [&](double d) {
        ++out.evaluations;
        CavityParams q = p;
        q.d = d;
        return run_measure(q, t_end, dt, opt).total.value;
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    const double fa = f(a), fb = f(b);
    // A unimodal peak inside the bracket must beat both ends at one interior probe.
    if (std::max(f1, f2) <= std::max(fa, fb)) {
        throw Error(Errc::BracketNotUnimodal, "no interior point exceeds the bracket ends");
    }
    while (b - a > tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
        ++out.iterations;
    }
    out.lo = a;
    out.hi = b;
    out.d_star = f1 >= f2 ? x1 : x2;
    out.peak = std::max(f1, f2);
    return out;
}

std::vector<NAtomRow> natom_scan(const CavityParams& p, const std::vector<int>& N_list) {
    const auto nc = critical_N(p);
    std::vector<NAtomRow> rows;
    rows.reserve(N_list.size());
    for (int N : N_list) {
        if (N < 1) throw Error(Errc::DomainError, "atom numbers must be positive");
        rows.push_back({N, omega_N_sq(N, p), nonmarkovian_N(N, p), nc.value});
    }
    return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows) {
    os << "d,measure_total,measure_uncorrelated,min_gamma1,min_gamma_sum,t_end\n";
    for (const auto& r : rows) {
        write_csv_row(os, {r.d, r.measure_total, r.measure_uncorrelated, r.min_gamma1, r.min_gamma_sum,
                           r.t_end});
    }
}

void write_natoms_csv(std::ostream& os, const std::vector<NAtomRow>& rows) {
    os << "N,omega_N_sq,nonmarkovian,N_c\n";
    for (const auto& r : rows) {
        os << r.N << ',' << fmt17(r.omega_N_sq) << ',' << (r.nonmarkovian ? 1 : 0) << ',' << r.N_c
           << '\n';
    }
}

}  // namespace nmark
