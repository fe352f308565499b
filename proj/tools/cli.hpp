// cli.hpp — command-line front end shared by the `nmark` binary and the tests

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nmark/model.hpp"
#include "nmark/volterra.hpp"

namespace nmark::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kValidation = 3 };

struct RunConfig {
    CavityParams params;
    double t_end{350.0};
    double dt{kDefaultDt};
    Scheme scheme{Scheme::Fast};
    bool uncorrelated{false};
    int alpha{1};
    std::string out;  // empty: stdout
};

/// "inf" / "infinity" select the infinite-distance sentinel; otherwise a number >= 0.
double parse_distance(const std::string& text);

/// Runs one command line. argv[0] is the program name. CSV and reports go to `out`,
/// diagnostics to `err`; the return value follows the exit-code contract.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ValidateOptions {
    bool quick{false};
    double dt{kDefaultDt};
};

/// Oracle suite: one PASS/FAIL line per check, kOk iff everything passed.
int run_validate(const ValidateOptions& opt, std::ostream& out);

}  // namespace nmark::cli
