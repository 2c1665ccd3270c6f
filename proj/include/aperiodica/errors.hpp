#pragma once

#include <stdexcept>
#include <string>

namespace aperiodica {

// Violated mathematical precondition; the message names the precondition.
// The CLI maps this family to exit code 2.
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

// Haar measure requested for an unbounded descriptor in a non-compact group.
struct measure_infinite_error : precondition_error {
    explicit measure_infinite_error(const std::string& what) : precondition_error(what) {}
};

// Bad experiment configuration (CLI exit code 1).
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A result failed its own consistency verification (CLI exit code 3).
struct internal_check_error : std::runtime_error {
    explicit internal_check_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace aperiodica
