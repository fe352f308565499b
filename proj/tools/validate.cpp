// validate.cpp — `nmark validate`: analytic and quadrature oracles against the solvers

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "nmark/csv.hpp"
#include "nmark/kernels.hpp"
#include "nmark/measure.hpp"
#include "nmark/oracles.hpp"
#include "nmark/quantum_map.hpp"
#include "nmark/rates.hpp"
#include "nmark/scan.hpp"

namespace nmark::cli {

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct Check {
    std::string name;
    bool quick;  // part of --quick
    std::function<Outcome()> run;
};

std::string num(double x) {
    std::ostringstream s;
    s.precision(4);
    s << x;
    return s.str();
}

Outcome within(double err, double tol) {
    return {err <= tol, "err=" + num(err) + " tol=" + num(tol)};
}

CavityParams params(double lambda_over_gamma0, double d) {
    CavityParams p;
    p.gamma0 = 0.01;
    p.lambda = lambda_over_gamma0 * p.gamma0;
    p.d = d;
    return p;
}

// max relative error of gamma1 against an oracle over nodes t in (0, t_max], skipping
// a neighbourhood of the oracle's own poles.
double gamma_error(const RateTrajectory& r, const std::function<double(double)>& oracle, double t_max) {
    double worst = 0.0;
    for (std::size_t i = 1; i < r.size() && r.grid.nodes[i] <= t_max; ++i) {
        const double ref = oracle(r.grid.nodes[i]);
        if (!std::isfinite(ref) || std::abs(ref) > 1e3) continue;
        const double scale = std::max(std::abs(ref), 1e-12);
        worst = std::max(worst, std::abs(r.gamma1[i] - ref) / scale);
    }
    return worst;
}

std::vector<Check> build_checks(double dt) {
    std::vector<Check> c;

    c.push_back({"f2 closed form vs frequency quadrature", true, [] {
        double worst = 0.0;
        for (auto [t, d] : std::vector<std::pair<double, double>>{{1, 2}, {3, 2}, {5, 0.5}, {2, 2}}) {
            auto p = params(1.65, d);
            const auto q = oracle::f2_quadrature(t, p);
            worst = std::max(worst, std::abs(q - f2(t, p)) / std::abs(q));
        }
        return within(worst, 1e-8);
    }});

    c.push_back({"f2 quadrature property on random (t, d)", false, [] {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.05, 20.0);
        double worst = 0.0;
        for (int k = 0; k < 12; ++k) {
            auto p = params(1.65, u(rng));
            const double t = u(rng);
            worst = std::max(worst, std::abs(oracle::f2_quadrature(t, p) - f2(t, p)) / (p.gamma0 * p.gamma0));
        }
        return within(worst, 1e-7);
    }});

    c.push_back({"f2 continuity across t = d", true, [] {
        double worst = 0.0;
        for (double d : {0.3, 1.0, 1.9, 7.5, 40.0}) {
            auto p = params(1.65, d);
            const double e = 1e-9 * d;
            worst = std::max(worst, std::abs(f2(d - e, p) - f2(d + e, p)) / (p.gamma0 * p.gamma0));
        }
        return within(worst, 1e-10);
    }});

    for (double lg : {2.0, 1.65}) {
        for (Scheme s : {Scheme::Fast, Scheme::Direct}) {
            c.push_back({"single-atom gamma (" + std::string(to_string(s)) + ", lambda=" + num(lg) +
                             " gamma0)",
                         true, [=] {
                             auto p = params(lg, CavityParams::kInfinite);
                             const auto r = compute_rates(p, make_grid(p, 300.0, dt), s);
                             const double kappa = 0.5 * p.gamma0 * p.gamma0;
                             return within(gamma_error(r, [&](double t) {
                                 return oracle::exponential_kernel_gamma(t, p.lambda, kappa);
                             }, 300.0), 1e-5);
                         }});
        }
    }

    c.push_back({"d=0 gamma1 vs collective closed form, gamma2 = 0", true, [=] {
        auto p = params(1.65, 0.0);
        const auto r = compute_rates(p, make_grid(p, 350.0, dt), Scheme::Fast);
        const double kappa = p.gamma0 * p.gamma0;
        const double e = gamma_error(r, [&](double t) {
            return oracle::exponential_kernel_gamma(t, p.lambda, kappa);
        }, 350.0);
        double g2 = 0.0;
        for (double x : r.gamma2) g2 = std::max(g2, std::abs(x));
        return Outcome{e <= 1e-5 && g2 <= 1e-10, "err=" + num(e) + " max|gamma2|=" + num(g2)};
    }});

    c.push_back({"d=inf g = (4/3) g_atom", true, [=] {
        auto p = params(0.7, CavityParams::kInfinite);
        const auto r = compute_rates(p, make_grid(p, 350.0, dt), Scheme::Fast);
        const double kappa = 0.5 * p.gamma0 * p.gamma0;
        double worst = 0.0;
        for (std::size_t i = 1; i < r.size(); ++i) {
            const double ref = 4.0 / 3.0 * neg_part(oracle::exponential_kernel_gamma(r.grid.nodes[i], p.lambda, kappa));
            if (!std::isfinite(r.g[i]) || ref > 1.0) continue;
            worst = std::max(worst, std::abs(r.g[i] - ref));
        }
        return within(worst, 1e-8);
    }});

    c.push_back({"fast vs direct scheme (d=1.5)", true, [=] {
        auto p = params(1.65, 1.5);
        const auto g = make_grid(p, 100.0, dt);
        double worst = 0.0;
        for (int m : {1, 2}) {
            const auto a = solve_fast(m, p, g), b = solve_direct(m, p, g);
            for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a.r[i] - b.r[i]));
        }
        return within(worst, 1e-5);
    }});

    c.push_back({"direct scheme second-order convergence (d=0)", false, [=] {
        auto p = params(1.65, 0.0);
        std::vector<double> err;
        for (double h : {dt, dt / 2, dt / 4}) {
            const auto a = solve_direct(1, p, make_grid(p, 100.0, h));
            double e = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                e = std::max(e, std::abs(a.r[i] - oracle::exponential_kernel_amplitude(a.grid.nodes[i], p.lambda,
                                                                                       p.gamma0 * p.gamma0).r));
            }
            err.push_back(e);
        }
        const double r1 = err[0] / err[1], r2 = err[1] / err[2];
        return Outcome{r1 > 3.0 && r1 < 5.0 && r2 > 3.0 && r2 < 5.0 && err[0] < 1e-5,
                       "errors " + num(err[0]) + " " + num(err[1]) + " " + num(err[2])};
    }});

    c.push_back({"single-atom pole times vs bisection", true, [] {
        auto p = params(0.7, CavityParams::kInfinite);
        const auto t = pole_times(p, 5);
        const auto o = oracle::cot_denominator_roots(p.lambda, std::sqrt(-omega_N_sq(1, p)), 5);
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) worst = std::max(worst, std::abs(t[i] - o[i]));
        return within(worst, 1e-8);
    }});

    c.push_back({"d->0 limit: (I0/T)^2 identity and I0 quadrature", true, [] {
        auto p = params(1.65, 0.0);
        const double lim = measure_d0_limit(p);
        const double I0 = d0_period_integral(p), T = d0_period(p);
        const double id = std::abs(std::pow(I0 / T, 2) - lim) / lim;
        const double q = std::abs(oracle::I0_numeric(p) - I0) / I0;
        return Outcome{id <= 1e-12 && q <= 1e-4, "identity=" + num(id) + " quadrature=" + num(q)};
    }});

    c.push_back({"Choi trace-norm and fidelity multiplicativity", true, [] {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto rnd = [&] { return std::polar(u(rng), 6.283185307179586 * u(rng)); };
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const auto a = choi(ChannelSnapshot<double>(rnd(), rnd()));
            const auto b = choi(ChannelSnapshot<double>(rnd(), rnd()));
            const auto a2 = intermediate_choi(ChannelSnapshot<double>(rnd(), rnd(), 1.0),
                                              ChannelSnapshot<double>(rnd(), rnd(), 0.0));
            worst = std::max(worst, std::abs(trace_norm(kron(a2, b)) - trace_norm(a2) * trace_norm(b)));
            const auto c2 = choi(ChannelSnapshot<double>(rnd(), rnd()));
            const auto d2 = choi(ChannelSnapshot<double>(rnd(), rnd()));
            worst = std::max(worst, std::abs(fidelity(kron(a, b), kron(c2, d2)) - fidelity(a, c2) * fidelity(b, d2)));
        }
        return within(worst, 1e-10);
    }});

    c.push_back({"g from rates vs finite-difference Choi g", true, [=] {
        auto p = params(0.7, CavityParams::kInfinite);
        const auto g = make_grid(p, 700.0, dt);
        const auto r = compute_rates(p, g, Scheme::Fast);
        const auto poles = pole_times(p, 1);
        double worst = 0.0;
        int n = 0;
        for (int k = 0; k < 20; ++k) {
            const double t = poles[0] + 5.0 + 10.0 * k;
            auto snap = [&](double s) {
                return ChannelSnapshot<double>(r.amp1.value_at(s), r.amp2.value_at(s), s);
            };
            const double ref = 4.0 / 3.0 * g_atom(t, p);
            if (ref <= 0.0) continue;
            const double num_g = g_numeric_extrapolated(snap, t, 1e-2);
            worst = std::max(worst, std::abs(num_g - ref) / ref);
            ++n;
        }
        return Outcome{n >= 10 && worst <= 1e-4, "samples=" + std::to_string(n) + " err=" + num(worst)};
    }});

    c.push_back({"N-atom thresholds and N_c", true, [] {
        bool ok = true;
        for (double lg : {0.7, 1.65, 3.0, 10.0}) {
            auto p = params(lg, 0.0);
            const int nc = static_cast<int>(std::ceil(lg * lg / 2.0 - 1e-12));
            ok = ok && critical_N(p).value == std::max(1, nc);
            for (int N = 1; N <= 50; ++N) ok = ok && (nonmarkovian_N(N, p) == (lg < std::sqrt(2.0 * N)));
            for (double t : {0.5, 10.0, 123.0}) ok = ok && gamma_N(t, 1, p) == gamma_single(t, p);
        }
        return Outcome{ok, ok ? "all cases" : "mismatch"};
    }});

    c.push_back({"c_plus_N log-derivative identity", true, [] {
        double worst = 0.0;
        for (int N : {1, 2, 5}) {
            auto p = params(1.65, 0.0);
            for (double t : {3.0, 50.0, 200.0}) {
                const double h = 1e-3;
                const double fd = -2.0 * (std::log(std::abs(c_plus_N(t + h, N, p))) -
                                          std::log(std::abs(c_plus_N(t - h, N, p)))) / (2 * h);
                const double ref = gamma_N(t, N, p);
                worst = std::max(worst, std::abs(fd - ref) / std::max(std::abs(ref), 1e-6));
            }
        }
        return within(worst, 1e-6);
    }});

    c.push_back({"Markovian control lambda=2.5 gamma0: g = 0", true, [=] {
        double worst = 0.0;
        for (double d : {0.0, 1.0, CavityParams::kInfinite}) {
            auto p = params(2.5, d);
            const auto r = compute_rates(p, make_grid(p, 350.0, dt), Scheme::Fast);
            for (double x : r.g) worst = std::max(worst, x);
        }
        return within(worst, 1e-10);
    }});

    return c;
}

}  // namespace

int run_validate(const ValidateOptions& opt, std::ostream& out) {
    int failed = 0, ran = 0;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& check : build_checks(opt.dt)) {
        if (opt.quick && !check.quick) continue;
        ++ran;
        Outcome o;
        try {
            o = check.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        if (!o.pass) ++failed;
        out << (o.pass ? "PASS " : "FAIL ") << check.name << "  [" << o.detail << "]\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << ran - failed << '/' << ran << " checks passed in " << num(secs) << " s (dt=" << num(opt.dt) << ")\n";
    return failed == 0 ? kOk : kValidation;
}

}  // namespace nmark::cli
