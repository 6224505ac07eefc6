#ifndef EQCOV_ERRORS_HPP
#define EQCOV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace eqcov {

// Invalid option combinations, out-of-range levels, malformed specs.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable files, schema mismatches, empty datasets.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A group-conditional guarantee cannot be issued (unknown group at
// prediction time, empty per-group calibration set, undersized group
// training set). Distinct from DataError so callers can report it as a
// refusal rather than a malformed input.
struct RefusalError : std::runtime_error {
    explicit RefusalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace eqcov

#endif  // EQCOV_ERRORS_HPP
