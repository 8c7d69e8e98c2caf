#pragma once

#include <stdexcept>
#include <string>

namespace hml {

// Error taxonomy. Every throwing path in the library uses one of these, so
// callers (and the CLI exit-code mapping) can distinguish "raise precision"
// from "the input is bad" from "the search failed".

struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Result cannot be certified at the working precision (ball too wide,
// recognition refused, series would need more terms than the cap, ...).
struct precision_error : error {
    explicit precision_error(const std::string& msg) : error(msg) {}
};

// Mathematical domain violation: pole of gamma, log touching the branch
// cut, division by a ball containing zero, ...
struct domain_error : error {
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Input data failed validation (index laws, parameter ranges, bad prime...).
struct validation_error : error {
    explicit validation_error(const std::string& msg) : error(msg) {}
};

// A search/fit completed without an acceptable candidate.
struct fit_error : error {
    explicit fit_error(const std::string& msg) : error(msg) {}
};

// Malformed serialized input (JSON, coefficient files, rational strings).
struct parse_error : error {
    explicit parse_error(const std::string& msg) : error(msg) {}
};

} // namespace hml
