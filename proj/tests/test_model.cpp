// test_model.cpp — parameter validation, grids and the regularization order

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nmark/errors.hpp"
#include "nmark/model.hpp"

using namespace nmark;

namespace {
bool has(const std::vector<ValidityIssue>& v, ValidityIssue::Kind k, const std::string& field = "") {
    for (const auto& i : v) {
        if (i.kind == k && (field.empty() || i.field == field)) return true;
    }
    return false;
}
}  // namespace

TEST_CASE("validate_params: reference configuration is clean") {
    CavityParams p{0.01, 0.0165, 1.0, 2.0};
    const auto r = validate_params(p);
    CHECK(r.ok());
    CHECK(r.warnings.empty());
}

TEST_CASE("validate_params: non-positive fields are errors") {
    CavityParams p{0.0, 0.0165, 1.0, 0.0};
    auto r = validate_params(p);
    CHECK_FALSE(r.ok());
    CHECK(has(r.errors, ValidityIssue::Kind::NonPositiveParameter, "gamma0"));
    CHECK_THROWS_AS(require_valid(p), Error);
    try {
        require_valid(p);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NonPositiveParameter);
    }
    p = {0.01, -1.0, 1.0, 0.0};
    CHECK(has(validate_params(p).errors, ValidityIssue::Kind::NonPositiveParameter, "lambda"));
    p = {0.01, 0.01, 0.0, 0.0};
    CHECK(has(validate_params(p).errors, ValidityIssue::Kind::NonPositiveParameter, "omega0"));
    p = {0.01, 0.01, 1.0, -0.5};
    CHECK(has(validate_params(p).errors, ValidityIssue::Kind::NonPositiveParameter, "d"));
}

TEST_CASE("validate_params: regime warnings do not invalidate") {
    CavityParams p{0.2, 0.01, 1.0, 0.0};
    auto r = validate_params(p);
    CHECK(r.ok());
    CHECK(has(r.warnings, ValidityIssue::Kind::WeakCouplingViolated));
    p = {0.01, 0.2, 1.0, 0.0};  // omega0 / lambda = 5 < 10
    r = validate_params(p);
    CHECK(r.ok());
    CHECK(has(r.warnings, ValidityIssue::Kind::NarrowLineViolated));
}

TEST_CASE("validate_params is idempotent and leaves its input alone") {
    const CavityParams p{0.2, 0.2, 1.0, 3.0};
    CavityParams copy = p;
    const auto a = validate_params(copy);
    const auto b = validate_params(copy);
    CHECK(copy.gamma0 == p.gamma0);
    CHECK(copy.lambda == p.lambda);
    CHECK(copy.d == p.d);
    CHECK(a.errors.size() == b.errors.size());
    CHECK(a.warnings.size() == b.warnings.size());
}

TEST_CASE("make_grid: the distance is a node") {
    CavityParams p{0.01, 0.0165, 1.0, 2.0};
    const auto g = make_grid(p, 350.0, 0.05);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == 350.0);
    CHECK(std::find(g.nodes.begin(), g.nodes.end(), 2.0) != g.nodes.end());
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g.step(i) > 0.0);
}

TEST_CASE("make_grid: coincident atoms give a uniform grid") {
    CavityParams p{0.01, 0.0165, 1.0, 0.0};
    const auto g = make_grid(p, 350.0, 0.05);
    CHECK(g.size() == 7001);
    for (std::size_t i = 0; i + 1 < g.size(); ++i) CHECK(g.step(i) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("make_grid: no insertion when d is beyond the window") {
    CavityParams p{0.01, 0.0165, 1.0, 400.0};
    const auto g = make_grid(p, 350.0, 0.05);
    CHECK(g.size() == 7001);
    CHECK(std::find(g.nodes.begin(), g.nodes.end(), 400.0) == g.nodes.end());
}

TEST_CASE("make_grid: refinement inside the memory window") {
    CavityParams p{0.01, 0.0165, 1.0, 5.0};
    const auto g = make_grid(p, 100.0, 0.5);
    const double fine = std::min(0.5, 2.0 * std::numbers::pi / 20.0);
    CHECK(g.fine_step == doctest::Approx(fine));
    CHECK(g.refined_until == 5.0);
    for (std::size_t i = 0; i + 1 < g.size() && g.nodes[i + 1] <= g.refined_until; ++i) {
        CHECK(g.step(i) <= fine + 1e-12);
    }
}

TEST_CASE("make_grid is deterministic") {
    CavityParams p{0.01, 0.0165, 1.0, 1.904};
    const auto a = make_grid(p, 350.0, 0.05);
    const auto b = make_grid(p, 350.0, 0.05);
    CHECK(a.nodes == b.nodes);
}

TEST_CASE("make_grid: invalid inputs") {
    CavityParams p;
    CHECK_THROWS_AS(make_grid(p, 0.0, 0.05), Error);
    CHECK_THROWS_AS(make_grid(p, 10.0, 0.0), Error);
    CHECK_THROWS_AS(make_grid(p, 10.0, -1.0), Error);
    CHECK_THROWS_AS(make_grid(p, 1.0, 2.0), Error);
    try {
        make_grid(p, -1.0, 0.05);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvalidGrid);
    }
}

TEST_CASE("TimeGrid::interval_of") {
    CavityParams p;
    const auto g = make_grid(p, 1.0, 0.25);
    CHECK(g.interval_of(0.0) == 0);
    CHECK(g.interval_of(0.3) == 1);
    CHECK(g.interval_of(1.0) == 3);
}

TEST_CASE("RegOrder") {
    CHECK(RegOrder().alpha == 1);
    CHECK(RegOrder().root_exponent() == 0.5);
    CHECK(RegOrder(2).root_exponent() == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(RegOrder(0), Error);
}
