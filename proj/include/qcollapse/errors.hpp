#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qc {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed references between objects (unknown ids, grid mismatches).
struct StructuralError : Error {
    using Error::Error;
};

// A state-model invariant would be violated by the requested operation.
struct InvariantViolation : Error {
    using Error::Error;
};

// Bad argument values (dt <= 0, empty extent, non-increasing boundaries...).
struct ArgumentError : Error {
    using Error::Error;
};

// The per-step hazard guard was exceeded; the caller must subdivide dt.
struct StepTooLarge : Error {
    using Error::Error;
};

// Non-finite amplitudes or other floating-point breakdown.
struct NumericalError : Error {
    using Error::Error;
};

// A metric is undefined for the given input (e.g. variance of a zero-norm state).
struct MetricUndefined : Error {
    using Error::Error;
};

// One config-file problem, tagged with the key path it concerns.
struct ConfigIssue {
    std::string key;
    std::string message;
};

// Carries the full list of validation problems, not just the first.
struct ConfigError : Error {
    std::vector<ConfigIssue> issues;

    explicit ConfigError(std::vector<ConfigIssue> list)
        : Error(join(list)), issues(std::move(list)) {}

private:
    static std::string join(const std::vector<ConfigIssue>& list) {
        std::string out = "config validation failed:";
        for (const auto& i : list) {
            out += "\n  " + i.key + ": " + i.message;
        }
        return out;
    }
};

} // namespace qc
