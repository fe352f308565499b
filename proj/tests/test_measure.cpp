// test_measure.cpp — weights, raw and regularized measures, d -> 0 closed forms

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nmark/errors.hpp"
#include "nmark/measure.hpp"
#include "nmark/oracles.hpp"

using namespace nmark;

namespace {
CavityParams params(double lg, double d) { return {0.01, lg * 0.01, 1.0, d}; }

double trapezoid(const std::vector<double>& f, const TimeGrid& g) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) s += 0.5 * g.step(i) * (f[i] + f[i + 1]);
    return s;
}

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return static_cast<Errc>(-1);
}

Weight uniform_weight(const TimeGrid& g) {
    Weight w;
    w.w.assign(g.size(), 1.0 / g.t_end);
    w.logF.assign(g.size(), -1.0);
    w.relaxation_estimate = g.t_end;
    return w;
}

// single-atom amplitude from the closed form, on a grid
AmplitudeTrajectory closed_form_single(const CavityParams& p, const TimeGrid& g) {
    AmplitudeTrajectory a;
    a.grid = g;
    a.params = p;
    for (double t : g.nodes) {
        const auto o = oracle::exponential_kernel_amplitude(t, p.lambda, 0.5 * p.gamma0 * p.gamma0);
        a.r.push_back(o.r);
        a.rdot.push_back(o.rdot);
    }
    return a;
}
}  // namespace

TEST_CASE("weight") {
    const auto p = params(0.7, 1.0);
    const auto r = compute_rates(p, make_grid(p, 350.0, 0.1), Scheme::Fast);
    const auto snaps = channel_snapshots(r, AsymptoticKind::Total);
    const auto F = fidelity_profile(snaps, r.grid, choi_asymptotic<double>(p));
    const auto w = weight(F, r.grid);
    CHECK(trapezoid(w.w, r.grid) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(F.front() < 1.0);
    for (double x : w.w) CHECK(x >= 0.0);
    CHECK(w.relaxation_estimate > 0.0);
    CHECK(uncorrelated_weight(r).w.size() == r.size());
    CHECK(trapezoid(uncorrelated_weight(r).w, r.grid) == doctest::Approx(1.0).epsilon(1e-10));

    // two copies: F -> F^2, w unchanged
    std::vector<double> F2(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) F2[i] = F[i] * F[i];
    const auto w2 = weight(F2, r.grid);
    for (std::size_t i = 0; i < F.size(); i += 11) CHECK(w2.w[i] == doctest::Approx(w.w[i]).epsilon(1e-10));
    // and F^2 is what the fidelity of the Kronecker products gives
    const auto ref = choi_asymptotic<double>(p);
    for (std::size_t i = 0; i < snaps.size(); i += 500) {
        const auto c = choi(snaps[i]);
        CHECK(fidelity(kron(c, c), kron(ref, ref)) == doctest::Approx(F[i] * F[i]).epsilon(1e-9));
    }

    const std::vector<double> ones(r.size(), 1.0);
    CHECK(code_of([&] { weight(ones, r.grid); }) == Errc::DegenerateWeight);
}

TEST_CASE("measure_rhp") {
    const auto p = params(2.5, 1.0);
    const auto r = compute_rates(p, make_grid(p, 350.0, 0.1), Scheme::Fast);
    CHECK(measure_rhp(r.g, r.grid, r.poles).value == 0.0);

    const auto q = params(0.7, CavityParams::kInfinite);
    const auto rq = compute_rates(q, make_grid(q, 350.0, 0.1), Scheme::Fast);
    REQUIRE_FALSE(rq.poles.empty());
    CHECK(code_of([&] { measure_rhp(rq.g, rq.grid, rq.poles); }) == Errc::NonIntegrablePole);
    const auto w = weight(fidelity_profile(channel_snapshots(rq, AsymptoticKind::Total), rq.grid, choi_asymptotic<double>(q)), rq.grid);
    CHECK(code_of([&] { measure_weighted(rq.g, w, rq.grid, rq.poles); }) == Errc::NonIntegrablePole);

    // smooth positive g on a dense grid against adaptive quadrature
    const auto grid = make_grid(params(1.0, 0.0), 100.0, 0.01);
    auto f = [](double t) { return 1e-3 * (1.1 + std::sin(0.05 * t)) * std::exp(-t / 80.0); };
    std::vector<double> g;
    for (double t : grid.nodes) g.push_back(f(t));
    const double ref = oracle::integrate(f, 0.0, 100.0);
    CHECK(measure_rhp(g, grid, {}).value == doctest::Approx(ref).epsilon(1e-6));
    const auto uw = uniform_weight(grid);
    CHECK(measure_weighted(g, uw, grid, {}).value == doctest::Approx(ref / 100.0).epsilon(1e-6));
}

TEST_CASE("measure_sqrt: zero and copy additivity") {
    const auto p = params(2.5, 1.0);
    const auto rep = run_measure(p, 350.0, 0.1);
    CHECK(rep.total.value == 0.0);
    CHECK(rep.uncorrelated.value == 0.0);
    CHECK(measure_rhp(rep.rates.g, rep.rates.grid, rep.rates.poles).value == 0.0);
    CHECK(measure_weighted(rep.rates.g, rep.weight, rep.rates.grid, rep.rates.poles).value == 0.0);

    const auto q = params(0.7, 1.3);
    const auto rq = run_measure(q, 700.0, 0.1);
    REQUIRE(rq.total.value > 0.0);
    const auto signal = RateSignal::from_rates(rq.rates, SignalKind::Total);
    const double one = measure_sqrt(signal, rq.weight).value;
    CHECK(one == doctest::Approx(rq.total.value).epsilon(1e-12));
    CHECK(measure_sqrt(signal.scaled(2.0), rq.weight).value == doctest::Approx(2.0 * one).epsilon(1e-8));
    CHECK(measure_sqrt(signal.scaled(3.0), rq.weight).value == doctest::Approx(3.0 * one).epsilon(1e-8));
    // higher root order: still additive
    SqrtOptions o2;
    o2.reg = RegOrder(2);
    const double a2 = measure_sqrt(signal, rq.weight, o2).value;
    CHECK(measure_sqrt(signal.scaled(2.0), rq.weight, o2).value == doctest::Approx(2.0 * a2).epsilon(1e-8));
}

TEST_CASE("measure_sqrt against a substitution oracle") {
    // single atom, uniform weight: [int sqrt(gamma^-) / T]^2
    const auto p = params(0.7, CavityParams::kInfinite);
    const double T = 1000.0;
    const auto grid = make_grid(p, T, 0.05);
    const auto amp = closed_form_single(p, grid);
    const auto signal = RateSignal::from_single(amp);
    REQUIRE(signal.poles().size() == 2);
    const double got = measure_sqrt(signal, uniform_weight(grid)).value;

    const auto poles = pole_times(p, 2);
    double integral = 0.0;
    for (double ts : poles) {
        // g > 0 on (t*, t_z]; t = t* + s^2 removes the inverse square root
        const double tz = oracle::bisect([&](double t) { return gamma_single(t, p); }, ts + 1e-6,
                                         ts + 0.9 * (poles[1] - poles[0]));
        auto h = [&](double s) { return 2.0 * s * std::sqrt(g_atom(ts + s * s, p)); };
        integral += oracle::integrate(h, 0.0, std::sqrt(std::min(tz, T) - ts));
    }
    const double ref = std::pow(integral / T, 2);
    CAPTURE(ref);
    CHECK(got == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("pole order mismatch") {
    // r = ((t - 5.05) / 5)^2: double zero between nodes
    CavityParams p = params(1.0, CavityParams::kInfinite);
    const auto grid = make_grid(p, 10.0, 0.1);
    AmplitudeTrajectory a;
    a.grid = grid;
    a.params = p;
    for (double t : grid.nodes) {
        const double x = (t - 5.05) / 5.0;
        a.r.push_back(x * x);
        a.rdot.push_back(2.0 * x / 5.0);
    }
    const auto signal = RateSignal::from_single(a);
    REQUIRE(signal.poles().size() == 1);
    CHECK(signal.poles()[0].order == 2);
    CHECK(code_of([&] { measure_sqrt(signal, uniform_weight(grid)); }) == Errc::PoleOrderMismatch);
    SqrtOptions o;
    o.reg = RegOrder(2);
    CHECK(measure_sqrt(signal, uniform_weight(grid), o).value > 0.0);
}

TEST_CASE("pole window width") {
    const auto p = params(0.7, CavityParams::kInfinite);
    const auto rep = run_measure(p, 700.0, 0.1);
    const auto signal = RateSignal::from_rates(rep.rates, SignalKind::Total);
    std::vector<double> v;
    for (double delta : {1e-2, 5e-3, 2.5e-3}) {
        SqrtOptions o;
        o.delta = delta;
        v.push_back(measure_sqrt(signal, rep.weight, o).value);
    }
    const double d1 = std::abs(v[1] - v[0]), d2 = std::abs(v[2] - v[1]);
    CAPTURE(v[0]);
    CAPTURE(d1);
    CAPTURE(d2);
    CHECK(d1 <= 1e-3 * v[0]);
    CHECK(d2 <= d1 / std::sqrt(2.0) * 1.5 + 1e-12 * v[0]);
}

TEST_CASE("regularized measure at infinite distance") {
    // long window: at t_end = 350 the finite-window weight has not reached the poles
    const auto p = params(0.7, CavityParams::kInfinite);
    const auto rep = run_measure(p, 2000.0, 0.05);
    CHECK(rep.total.value == doctest::Approx(1.2112e-6).epsilon(0.05));
    CHECK(rep.uncorrelated.value == doctest::Approx(rep.total.value).epsilon(1e-6));
    CHECK(rep.total.pole_count >= 2);
}

TEST_CASE("uncorrelated measure") {
    for (double d : {0.0, 0.8, 1.9, CavityParams::kInfinite}) {
        const auto r = run_measure(params(2.5, d), 350.0, 0.1);
        CHECK(r.uncorrelated.value == 0.0);
    }
    // beyond d_uc the summed rate never goes negative
    for (double d : {1.88, 2.0, 2.4}) {
        const auto r = run_measure(params(1.65, d), 350.0, 0.1);
        CAPTURE(d);
        CHECK(r.uncorrelated.value == 0.0);
    }
    // correlations add to the non-Markovianity inside the non-Markovian region
    for (double d : {0.5, 1.0}) {
        const auto r = run_measure(params(1.65, d), 2000.0, 0.1);
        CAPTURE(d);
        CHECK(r.uncorrelated.value < r.total.value);
        CHECK(r.total.value > 0.0);
    }
}

TEST_CASE("d -> 0 closed forms") {
    const auto p = params(1.65, 0.0);
    CHECK(measure_d0_limit(p) == doctest::Approx(0.0035 / 3.0).epsilon(1e-14));
    CHECK(measure_d0_limit(p) == doctest::Approx(1.1667e-3).epsilon(1e-4));
    const double I0 = d0_period_integral(p), T = d0_period(p);
    CHECK(std::pow(I0 / T, 2) == doctest::Approx(measure_d0_limit(p)).epsilon(1e-12));
    CHECK(oracle::I0_numeric(p) == doctest::Approx(I0).epsilon(1e-4));
    for (double lg : {0.5, 1.0, 1.9}) {
        const auto q = params(lg, 0.0);
        CHECK(oracle::I0_numeric(q) == doctest::Approx(d0_period_integral(q)).epsilon(1e-4));
    }
    CHECK(code_of([] { measure_d0_limit(params(2.0, 0.0)); }) == Errc::NotApplicable);
    CHECK(code_of([] { d0_period_integral(params(2.5, 0.0)); }) == Errc::NotApplicable);
}

TEST_CASE("zero on CP-divisible dynamics") {
    for (double d : {0.0, 0.3, 2.2, CavityParams::kInfinite}) {
        const auto r = run_measure(params(3.0, d), 500.0, 0.1);
        for (double x : r.rates.g) CHECK(x == 0.0);
        CHECK(r.total.value == 0.0);
        CHECK(r.uncorrelated.value == 0.0);
        CHECK(measure_rhp(r.rates.g, r.rates.grid, r.rates.poles).value == 0.0);
        CHECK(measure_weighted(r.rates.g, r.weight, r.rates.grid, r.rates.poles).value == 0.0);
    }
}

TEST_CASE("d = 0 discontinuity grows with the window") {
    const auto p0 = params(1.65, 0.0), ps = params(1.65, 0.01);
    double prev_gap = 0.0;
    for (double t_end : {1500.0, 3000.0}) {
        const double at0 = run_measure(p0, t_end, 0.1).total.value;
        const double small = run_measure(ps, t_end, 0.1).total.value;
        CAPTURE(t_end);
        CHECK(small > at0);
        CHECK(small - at0 > prev_gap);
        prev_gap = small - at0;
    }
}

TEST_CASE("measure CSV") {
    const auto p = params(0.7, 1.0);
    const auto rep = run_measure(p, 1.0, 0.5);
    std::ostringstream os;
    write_measure_csv(os, rep.rates.grid, rep.weight, rep.rates.g);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,F,logF,w,sqrt_g");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == static_cast<int>(rep.rates.size()));
}
