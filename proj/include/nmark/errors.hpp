// errors.hpp — error codes and the single exception type used across nmark

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nmark {

enum class Errc {
    NonPositiveParameter,
    InvalidGrid,
    DomainError,
    NumericalInstability,
    GridMismatch,
    NoPoles,
    NotApplicable,
    SingularIntermediateMap,
    NotPSD,
    NotHermitian,
    DegenerateWeight,
    NonIntegrablePole,
    PoleOrderMismatch,
    NoSignChange,
    BracketNotUnimodal,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace nmark
