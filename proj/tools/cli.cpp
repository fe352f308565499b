// cli.cpp — option parsing, config files and the six subcommands

#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "nmark/csv.hpp"
#include "nmark/errors.hpp"
#include "nmark/measure.hpp"
#include "nmark/rates.hpp"
#include "nmark/scan.hpp"

namespace nmark::cli {

double parse_distance(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "Inf") return CavityParams::kInfinite;
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(text, &used);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--d", "expected a number or 'inf', got '" + text + "'");
    }
    if (used != text.size() || !(d >= 0.0)) {
        throw CLI::ValidationError("--d", "expected a number >= 0 or 'inf', got '" + text + "'");
    }
    return d;
}

namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Where CSV goes: the --out file when given, the command's stdout otherwise.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw Usage("cannot open output file '" + path + "'");
            os_ = file_.get();
        }
    }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

std::string fmt_distance(double d) {
    return std::isinf(d) ? std::string("inf") : fmt17(d);
}

int exit_for(Errc c) {
    switch (c) {
        case Errc::NonPositiveParameter:
        case Errc::InvalidGrid:
        case Errc::DomainError:
        case Errc::NotApplicable:
            return kUsage;
        default:
            return kNumerical;
    }
}

void warn_validity(const CavityParams& p, std::ostream& err) {
    const auto rep = validate_params(p);
    for (const auto& w : rep.warnings) err << "warning: " << w.message << '\n';
    require_valid(p);
}

// --- commands -----------------------------------------------------------------

int cmd_rates(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    warn_validity(cfg.params, err);
    const auto grid = make_grid(cfg.params, cfg.t_end, cfg.dt);
    const auto rates = compute_rates(cfg.params, grid, cfg.scheme);
    Sink sink(cfg.out, out);
    write_rates_csv(*sink, rates);
    return kOk;
}

int cmd_measure(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    warn_validity(cfg.params, err);
    PipelineOptions opt;
    opt.scheme = cfg.scheme;
    opt.sqrt.reg = RegOrder(cfg.alpha);
    const auto rep = run_measure(cfg.params, cfg.t_end, cfg.dt, opt);
    const MeasureResult& main = cfg.uncorrelated ? rep.uncorrelated : rep.total;
    const auto& dg = main.diagnostics;
    out << "variant=" << to_string(main.variant) << '\n'
        << "value=" << fmt17(main.value) << '\n'
        << "measure_total=" << fmt17(rep.total.value) << '\n'
        << "measure_uncorrelated=" << fmt17(rep.uncorrelated.value) << '\n'
        << "relaxation_estimate=" << fmt17(main.relaxation_estimate) << '\n'
        << "pole_count=" << main.pole_count << '\n'
        << "t_end=" << fmt17(main.t_end) << '\n'
        << "dt=" << fmt17(cfg.dt) << '\n'
        << "d=" << fmt_distance(cfg.params.d) << '\n'
        << "scheme=" << to_string(cfg.scheme) << '\n'
        << "reg_order=" << main.reg.alpha << '\n'
        << "normalization=" << dg.normalization << '\n'
        << "pole_window=" << fmt17(dg.delta) << '\n'
        << "pole_window_share=" << fmt17(dg.pole_window_share) << '\n'
        << "quadrature_error=" << fmt17(dg.error_estimate) << '\n'
        << "fidelity_stride=" << dg.fidelity_stride << '\n';
    if (!cfg.out.empty()) {
        Sink sink(cfg.out, out);
        if (cfg.uncorrelated) {
            write_measure_csv(*sink, rep.rates.grid, uncorrelated_weight(rep.rates, opt.fidelity_stride),
                              rep.rates.g_uc);
        } else {
            write_measure_csv(*sink, rep.rates.grid, rep.weight, rep.rates.g);
        }
    }
    return kOk;
}

struct ScanFlags {
    double d_min{0.0};
    double d_max{2.5};
    int points{26};
    bool log_spacing{false};
    bool include_inf{false};
};

std::vector<double> distance_list(const ScanFlags& f) {
    if (f.points < 1) throw Usage("--points must be at least 1");
    if (!(f.d_min >= 0.0) || !(f.d_max >= f.d_min) || std::isinf(f.d_max)) {
        throw Usage("need 0 <= --d-min <= --d-max < inf");
    }
    if (f.log_spacing && !(f.d_min > 0.0)) throw Usage("--log-spacing needs --d-min > 0");
    std::vector<double> d;
    if (f.points == 1) return {f.d_min};
    for (int i = 0; i < f.points; ++i) {
        const double s = static_cast<double>(i) / (f.points - 1);
        d.push_back(f.log_spacing ? f.d_min * std::pow(f.d_max / f.d_min, s)
                                  : f.d_min + s * (f.d_max - f.d_min));
    }
    d.back() = f.d_max;
    return d;
}

int cmd_scan(const RunConfig& cfg, const ScanFlags& f, std::ostream& out, std::ostream& err) {
    warn_validity(cfg.params, err);
    PipelineOptions opt;
    opt.scheme = cfg.scheme;
    opt.sqrt.reg = RegOrder(cfg.alpha);
    const auto rows = sweep_distance(cfg.params, distance_list(f), cfg.t_end, cfg.dt, f.include_inf, opt);
    std::size_t ok = 0;
    for (const auto& r : rows) {
        if (r.ok) {
            ++ok;
        } else {
            err << "row d=" << fmt_distance(r.d) << " failed: " << r.error << '\n';
        }
    }
    Sink sink(cfg.out, out);
    write_scan_csv(*sink, rows);
    return ok > 0 ? kOk : kNumerical;
}

struct CriticalFlags {
    double lo{1.5};
    double hi{2.1};
    double tol{5e-3};
    double horizon{-1.0};
    std::string kind{"both"};
};

int cmd_critical(const RunConfig& cfg, const CriticalFlags& f, std::ostream& out, std::ostream& err) {
    warn_validity(cfg.params, err);
    if (f.kind == "max") {
        PipelineOptions opt;
        opt.scheme = cfg.scheme;
        const auto r = find_dmax(cfg.params, f.lo, f.hi, cfg.t_end, f.tol, cfg.dt, opt);
        out << "d_max=" << fmt17(r.d_star) << '\n'
            << "peak=" << fmt17(r.peak) << '\n'
            << "bracket=" << fmt17(r.lo) << ',' << fmt17(r.hi) << '\n'
            << "iterations=" << r.iterations << '\n'
            << "evaluations=" << r.evaluations << '\n'
            << "t_end=" << fmt17(cfg.t_end) << '\n';
        return kOk;
    }
    CriticalOptions opt;
    opt.tol = f.tol;
    opt.horizon = f.horizon;
    opt.dt = cfg.dt;
    opt.scheme = cfg.scheme;
    const double horizon = f.horizon > 0.0 ? f.horizon : default_critical_horizon(cfg.params);
    auto report = [&](const char* key, bool uncorrelated) {
        const auto r = critical_distance(cfg.params, f.lo, f.hi, uncorrelated, opt);
        out << key << '=' << fmt17(r.d_star) << '\n'
            << key << "_bracket=" << fmt17(r.lo) << ',' << fmt17(r.hi) << '\n'
            << key << "_iterations=" << r.iterations << '\n'
            << key << "_evaluations=" << r.evaluations << '\n';
    };
    if (f.kind == "total" || f.kind == "both") report("d_c", false);
    if (f.kind == "uncorrelated" || f.kind == "both") report("d_uc", true);
    out << "tolerance=" << fmt17(f.tol) << '\n' << "horizon=" << fmt17(horizon) << '\n';
    return kOk;
}

int cmd_natoms(const RunConfig& cfg, int n_max, std::ostream& out, std::ostream& err) {
    warn_validity(cfg.params, err);
    if (n_max < 1) throw Usage("--n-max must be at least 1");
    std::vector<int> N(n_max);
    for (int i = 0; i < n_max; ++i) N[i] = i + 1;
    const auto nc = critical_N(cfg.params);
    if (nc.boundary) err << "note: lambda = sqrt(2 N_c) gamma0 within rounding; N_c itself is Markovian\n";
    Sink sink(cfg.out, out);
    write_natoms_csv(*sink, natom_scan(cfg.params, N));
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-Markovianity of two atoms in a lossy cavity"};
    app.name(args.empty() ? "nmark" : args.front());
    app.fallthrough();
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value file; command-line flags take precedence", false);

    RunConfig cfg;
    std::string d_text = "0";
    std::string scheme_text = "fast";
    auto* o_gamma0 = app.add_option("--gamma0", cfg.params.gamma0, "coupling strength gamma0")
                         ->check(CLI::PositiveNumber);
    auto* o_lambda = app.add_option("--lambda", cfg.params.lambda, "cavity linewidth lambda")
                         ->check(CLI::PositiveNumber);
    app.add_option("--omega0", cfg.params.omega0, "resonance frequency")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--d", d_text, "interatomic distance, or 'inf'")->capture_default_str();
    app.add_option("--t-end", cfg.t_end, "end of the time window")->capture_default_str();
    app.add_option("--dt", cfg.dt, "base time step")->capture_default_str();
    app.add_option("--scheme", scheme_text, "Volterra solver")
        ->check(CLI::IsMember({"fast", "direct"}))
        ->capture_default_str();
    app.add_option("--out", cfg.out, "CSV output file (default: stdout)");

    auto* rates = app.add_subcommand("rates", "decay rates and g(t) as CSV");
    auto* measure = app.add_subcommand("measure", "regularized weighted measure");
    measure->add_flag("--uncorrelated", cfg.uncorrelated, "report the product-dynamics measure");
    measure->add_option("--alpha", cfg.alpha, "regularization order")->check(CLI::PositiveNumber);

    ScanFlags sf;
    auto* scan = app.add_subcommand("scan", "measure as a function of d");
    scan->add_option("--d-min", sf.d_min, "smallest distance")->capture_default_str();
    scan->add_option("--d-max", sf.d_max, "largest distance")->capture_default_str();
    scan->add_option("--points", sf.points, "number of distances")->capture_default_str();
    scan->add_flag("--log-spacing", sf.log_spacing, "geometric spacing");
    scan->add_flag("--include-inf", sf.include_inf, "append the infinite-distance row");

    CriticalFlags cf;
    auto* critical = app.add_subcommand("critical", "critical distances d_c, d_uc or d_max");
    critical->add_option("--d-min", cf.lo, "bracket lower end")->capture_default_str();
    critical->add_option("--d-max", cf.hi, "bracket upper end")->capture_default_str();
    critical->add_option("--tol", cf.tol, "bracket width at return")->capture_default_str();
    critical->add_option("--horizon", cf.horizon, "window for the rate sign test (default 40/gamma0)");
    critical->add_option("--kind", cf.kind, "total, uncorrelated, both or max")
        ->check(CLI::IsMember({"total", "uncorrelated", "both", "max"}))
        ->capture_default_str();

    int n_max = 10;
    auto* natoms = app.add_subcommand("natoms", "N-atom thresholds at d = 0");
    natoms->add_option("--n-max", n_max, "largest atom number")->capture_default_str();

    ValidateOptions vopt;
    auto* validate = app.add_subcommand("validate", "run the oracle suite");
    validate->add_flag("--quick", vopt.quick, "reduced suite");

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        cfg.params.d = parse_distance(d_text);
        cfg.scheme = parse_scheme(scheme_text);
        if (validate->parsed()) {
            vopt.dt = cfg.dt;
            return run_validate(vopt, out);
        }
        // Physical parameters have no silent defaults.
        if (o_gamma0->count() == 0 || o_lambda->count() == 0) {
            throw Usage("--gamma0 and --lambda are required (flag or config file)");
        }
        if (rates->parsed()) return cmd_rates(cfg, out, err);
        if (measure->parsed()) return cmd_measure(cfg, out, err);
        if (scan->parsed()) return cmd_scan(cfg, sf, out, err);
        if (critical->parsed()) return cmd_critical(cfg, cf, out, err);
        if (natoms->parsed()) return cmd_natoms(cfg, n_max, out, err);
    } catch (const Usage& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kUsage;
}

}  // namespace nmark::cli
