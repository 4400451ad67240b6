#pragma once

#include <stdexcept>
#include <string>

namespace padic {

// Thrown when an input file or option string cannot be parsed.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a documented precondition is violated (bad field parameters,
// non-disk precision requests, unsupported ramification, ...).
struct precondition_error : std::invalid_argument {
    explicit precondition_error(const std::string& what) : std::invalid_argument(what) {}
};

// Thrown when a computation would need data outside the stored range of a
// table or beyond a declared truncation budget.
struct coverage_error : std::runtime_error {
    explicit coverage_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a result is indistinguishable from zero at working precision
// but a definite value is required (e.g. inversion).
struct precision_error : std::runtime_error {
    explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace padic
