// scan.hpp — distance sweeps, critical distances, d_max search and N-atom thresholds

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nmark/measure.hpp"
#include "nmark/model.hpp"

namespace nmark {

struct MinGamma {
    double gamma1{0.0};  // min_t gamma1(t) over finite samples, t > 0
    double sum{0.0};     // min_t gamma1(t) + gamma2(t)
};

/// Solve at distance d and take grid minima of gamma1 and gamma1 + gamma2.
MinGamma min_gamma(double d, CavityParams p, double t_end, double dt = kDefaultDt,
                   Scheme scheme = Scheme::Fast);

struct ScanRow {
    double d{0.0};
    double measure_total{0.0};
    double measure_uncorrelated{0.0};
    double min_gamma1{0.0};
    double min_gamma_sum{0.0};
    double t_end{0.0};
    bool ok{true};
    std::string error;  // set when the row failed; numeric columns are NaN then
};

/// One independent pipeline per distance, in input order; the infinite-distance row is
/// appended when include_inf is set. Row failures are recorded, not thrown.
std::vector<ScanRow> sweep_distance(const CavityParams& p, const std::vector<double>& d_list,
                                    double t_end, double dt = kDefaultDt, bool include_inf = false,
                                    const PipelineOptions& opt = {});

ScanRow scan_row(const CavityParams& p, double d, double t_end, double dt,
                 const PipelineOptions& opt = {});

enum class CriticalKind { Total, Uncorrelated, MaxMeasure };

struct CriticalResult {
    double d_star{0.0};
    double lo{0.0};
    double hi{0.0};
    double tolerance{0.0};
    int iterations{0};
    int evaluations{0};  // full pipeline runs
    CriticalKind kind{CriticalKind::Total};
    double peak{0.0};    // measure at d_star for MaxMeasure
};

/// Default horizon for the sign test: 40/gamma0. A rate that first dips below zero
/// only after several hundred 1/gamma0 would be missed by a short window.
double default_critical_horizon(const CavityParams& p);

struct CriticalOptions {
    double tol{5e-3};
    double horizon{-1.0};  // <= 0 selects default_critical_horizon
    double dt{0.1};
    Scheme scheme{Scheme::Fast};
};

/// Bisection on the sign of min gamma1 (total) or min (gamma1 + gamma2) (uncorrelated).
/// Negative at lo, non-negative at hi; NoSignChange otherwise.
CriticalResult critical_distance(const CavityParams& p, double lo, double hi, bool uncorrelated,
                                 const CriticalOptions& opt = {});

/// Golden-section maximization of the total measure over [lo, hi].
CriticalResult find_dmax(const CavityParams& p, double lo, double hi, double t_end, double tol,
                         double dt = kDefaultDt, const PipelineOptions& opt = {});

struct NAtomRow {
    int N{1};
    double omega_N_sq{0.0};
    bool nonmarkovian{false};
    int N_c{1};
};

std::vector<NAtomRow> natom_scan(const CavityParams& p, const std::vector<int>& N_list);

/// d,measure_total,measure_uncorrelated,min_gamma1,min_gamma_sum,t_end
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows);
/// N,omega_N_sq,nonmarkovian,N_c
void write_natoms_csv(std::ostream& os, const std::vector<NAtomRow>& rows);

}  // namespace nmark
